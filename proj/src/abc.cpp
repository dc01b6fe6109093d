#include "abcfs/abc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "abcfs/errors.hpp"

namespace abcfs {

namespace {

FeatureMask random_mask(std::size_t n_features, std::size_t popcount, Rng& rng)
{
    std::vector<std::size_t> all(n_features);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return FeatureMask::from_indices(n_features, sample_without_replacement(std::move(all), popcount, rng));
}

std::size_t draw_partner(std::size_t self, std::size_t population, Rng& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, population - 2);
    const std::size_t j = pick(rng);
    return j >= self ? j + 1 : j;
}

std::size_t roulette(std::span<const double> probabilities, Rng& rng)
{
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (probabilities[i] <= 0.0) {
            continue;
        }
        cumulative += probabilities[i];
        last_positive = i;
        if (u < cumulative) {
            return i;
        }
    }
    return last_positive;
}

double score(const FitnessFunction& fitness, const FeatureMask& mask)
{
    const double f = fitness(mask);
    if (!std::isfinite(f) || f < 0.0) {
        throw InternalError("fitness function returned " + std::to_string(f) + "; expected a finite value >= 0");
    }
    return f;
}

class Colony
{
public:
    Colony(const ColonyConfig& config, std::size_t n_features, const FitnessFunction& fitness)
        : config_(config), n_features_(n_features), window_(config.window()), fitness_(fitness), rng_(config.seed)
    {
    }

    RunResult search(const IterationObserver& observer)
    {
        sources_ = init_colony(config_, n_features_, rng_);
        for (auto& source : sources_) {
            check_window(source.mask);
            source.fitness = evaluate(source.mask);
        }
        result_.best_mask = sources_.front().mask;
        result_.best_fitness = sources_.front().fitness;
        update_best();
        result_.history.push_back(result_.best_fitness);

        for (std::size_t t = 0; t < config_.max_iterations && result_.best_fitness < 1.0; ++t) {
            employed_phase();
            onlooker_phase();
            scout_phase();
            update_best();
            result_.history.push_back(result_.best_fitness);
            if (observer) {
                observer(t, sources_);
            }
        }
        return std::move(result_);
    }

private:
    double evaluate(const FeatureMask& mask)
    {
        ++result_.evaluations;
        return score(fitness_, mask);
    }

    void check_window(const FeatureMask& mask) const
    {
        if (mask.size() != n_features_ || !window_.contains(mask.count())) {
            throw InternalError("candidate mask with popcount " + std::to_string(mask.count()) + " escaped window [" +
                                std::to_string(window_.lower) + ", " + std::to_string(window_.upper) + "]");
        }
    }

    void improve(std::size_t i, std::size_t partner)
    {
        FeatureMask child = generate_neighbor(sources_[i].mask, sources_[partner].mask, window_, rng_);
        check_window(child);
        const FitnessFunction counted = [this](const FeatureMask& m) { return evaluate(m); };
        sources_[i] = greedy_select(sources_[i], std::move(child), counted);
    }

    void employed_phase()
    {
        for (std::size_t i = 0; i < sources_.size(); ++i) {
            improve(i, draw_partner(i, sources_.size(), rng_));
        }
    }

    void onlooker_phase()
    {
        const auto probabilities = onlooker_probabilities(sources_);
        for (std::size_t k = 0; k < sources_.size(); ++k) {
            const std::size_t i = roulette(probabilities, rng_);
            improve(i, draw_partner(i, sources_.size(), rng_));
        }
    }

    void scout_phase()
    {
        std::size_t chosen = sources_.size();
        for (std::size_t i = 0; i < sources_.size(); ++i) {
            if (sources_[i].trials > config_.limit &&
                (chosen == sources_.size() || sources_[i].trials > sources_[chosen].trials)) {
                chosen = i;
            }
        }
        if (chosen == sources_.size()) {
            return;
        }
        FoodSource fresh;
        fresh.mask = scout_reset(config_, n_features_, rng_);
        check_window(fresh.mask);
        fresh.fitness = evaluate(fresh.mask);
        sources_[chosen] = std::move(fresh);
        ++result_.scout_events;
    }

    void update_best()
    {
        for (const auto& source : sources_) {
            if (source.fitness > result_.best_fitness) {
                result_.best_fitness = source.fitness;
                result_.best_mask = source.mask;
            }
        }
    }

    const ColonyConfig& config_;
    std::size_t n_features_;
    Bounds window_;
    const FitnessFunction& fitness_;
    Rng rng_;
    std::vector<FoodSource> sources_;
    RunResult result_;
};

}  // namespace

Bounds ColonyConfig::window() const noexcept
{
    return {std::max<std::size_t>(lower_bound, 1), upper_bound};
}

void validate(const ColonyConfig& config, std::size_t n_features)
{
    std::vector<std::string> violations;
    if (n_features == 0) {
        violations.emplace_back("feature dimension must be at least 1");
    }
    if (config.population_size < 2) {
        violations.push_back("population_size " + std::to_string(config.population_size) + " must be at least 2");
    }
    if (config.upper_bound < 1) {
        violations.emplace_back("upper_bound must be at least 1");
    }
    if (config.lower_bound > config.upper_bound) {
        violations.push_back("lower_bound " + std::to_string(config.lower_bound) + " exceeds upper_bound " +
                             std::to_string(config.upper_bound));
    }
    if (config.upper_bound > n_features) {
        violations.push_back("upper_bound " + std::to_string(config.upper_bound) + " exceeds feature dimension " +
                             std::to_string(n_features));
    }
    if (!violations.empty()) {
        throw ConfigError(std::move(violations));
    }
}

std::vector<FoodSource> init_colony(const ColonyConfig& config, std::size_t n_features, Rng& rng)
{
    validate(config, n_features);
    const Bounds window = config.window();
    std::uniform_int_distribution<std::size_t> size_dist(window.lower, window.upper);
    std::vector<FoodSource> colony(config.population_size);
    for (auto& source : colony) {
        source.mask = random_mask(n_features, size_dist(rng), rng);
    }
    return colony;
}

FeatureMask blend_masks(const FeatureMask& own, const FeatureMask& partner, double mixing, Rng& rng)
{
    if (own.size() != partner.size()) {
        throw DataError("cannot blend masks of length " + std::to_string(own.size()) + " and " +
                        std::to_string(partner.size()));
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    FeatureMask child = own;
    for (std::size_t i = 0; i < own.size(); ++i) {
        const bool theirs = partner.test(i);
        if (own.test(i) != theirs && coin(rng) < mixing) {
            child.set(i, theirs);
        }
    }
    return child;
}

FeatureMask generate_neighbor(const FeatureMask& own, const FeatureMask& partner, Bounds bounds, Rng& rng)
{
    const double phi = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    return repair_bounds(blend_masks(own, partner, std::abs(phi), rng), bounds, rng);
}

FeatureMask repair_bounds(FeatureMask mask, Bounds bounds, Rng& rng)
{
    const std::size_t count = mask.count();
    if (count < bounds.lower) {
        std::vector<std::size_t> unset;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask.test(i)) {
                unset.push_back(i);
            }
        }
        for (std::size_t i : sample_without_replacement(std::move(unset), bounds.lower - count, rng)) {
            mask.set(i);
        }
    } else if (count > bounds.upper) {
        for (std::size_t i : sample_without_replacement(mask.indices(), count - bounds.upper, rng)) {
            mask.reset(i);
        }
    }
    return mask;
}

FoodSource greedy_select(const FoodSource& current, FeatureMask candidate, const FitnessFunction& fitness)
{
    const double candidate_fitness = score(fitness, candidate);
    if (candidate_fitness > current.fitness) {
        return {std::move(candidate), candidate_fitness, 0};
    }
    FoodSource kept = current;
    ++kept.trials;
    return kept;
}

std::vector<double> onlooker_probabilities(std::span<const FoodSource> colony)
{
    double total = 0.0;
    for (const auto& source : colony) {
        if (!source.scored() || source.fitness < 0.0) {
            throw InternalError("onlooker selection over an unscored food source");
        }
        total += source.fitness;
    }
    std::vector<double> p(colony.size(), 1.0 / static_cast<double>(colony.size()));
    if (total > 0.0) {
        for (std::size_t i = 0; i < colony.size(); ++i) {
            p[i] = colony[i].fitness / total;
        }
    }
    return p;
}

FeatureMask scout_reset(const ColonyConfig& config, std::size_t n_features, Rng& rng)
{
    const Bounds window = config.window();
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto k = static_cast<std::size_t>(
        std::llround(static_cast<double>(window.lower) + u * static_cast<double>(window.upper - window.lower)));
    return random_mask(n_features, std::clamp(k, window.lower, window.upper), rng);
}

RunResult run(const ColonyConfig& config,
              std::size_t n_features,
              const FitnessFunction& fitness,
              const IterationObserver& observer)
{
    validate(config, n_features);
    Colony colony(config, n_features, fitness);
    RunResult result = colony.search(observer);

    for (std::size_t i = 1; i < result.history.size(); ++i) {
        if (result.history[i] < result.history[i - 1]) {
            throw InternalError("best-so-far history decreased at iteration " + std::to_string(i));
        }
    }
    if (!config.window().contains(result.best_mask.count())) {
        throw InternalError("best mask violates the popcount window");
    }
    return result;
}

RunResult run(const ColonyConfig& config, const Dataset& dataset, const FitnessProtocol& protocol)
{
    SubsetEvaluator evaluator(dataset, protocol);
    return run(config, dataset.n_features(), [&evaluator](const FeatureMask& m) { return evaluator(m); });
}

}  // namespace abcfs
