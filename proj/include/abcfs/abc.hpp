#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "abcfs/classifier.hpp"
#include "abcfs/dataset.hpp"
#include "abcfs/feature_mask.hpp"
#include "abcfs/random.hpp"

namespace abcfs {

/// Inclusive popcount window every candidate subset must satisfy.
struct Bounds
{
    std::size_t lower = 1;
    std::size_t upper = 1;

    bool contains(std::size_t popcount) const noexcept { return lower <= popcount && popcount <= upper; }
    friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct ColonyConfig
{
    std::size_t population_size = 20;
    std::size_t limit = 10;
    std::size_t lower_bound = 1;
    std::size_t upper_bound = 1;
    std::size_t max_iterations = 100;
    std::uint64_t seed = 0;

    /// The popcount window actually searched. A lower bound of 0 is accepted
    /// but an empty subset cannot be scored, so the floor is 1.
    Bounds window() const noexcept;

    friend bool operator==(const ColonyConfig&, const ColonyConfig&) = default;
};

/// Throws ConfigError listing every violated constraint.
void validate(const ColonyConfig& config, std::size_t n_features);

struct FoodSource
{
    static constexpr double kUnscored = -1.0;

    FeatureMask mask;
    double fitness = kUnscored;
    std::size_t trials = 0;

    bool scored() const noexcept { return fitness != kUnscored; }
};

struct RunResult
{
    FeatureMask best_mask;
    double best_fitness = 0.0;
    /// Best-so-far fitness after the initial evaluation and after each iteration.
    std::vector<double> history;
    std::size_t evaluations = 0;
    std::size_t scout_events = 0;
};

using FitnessFunction = std::function<double(const FeatureMask&)>;
using IterationObserver = std::function<void(std::size_t iteration, std::span<const FoodSource> colony)>;

/// population_size unscored sources; each popcount is uniform over the window.
std::vector<FoodSource> init_colony(const ColonyConfig& config, std::size_t n_features, Rng& rng);

/// Bitwise form of v_i = x_i + phi (x_i - x_k): starting from `own`, every
/// position where `partner` differs takes the partner's bit with probability
/// `mixing`. No bound repair.
FeatureMask blend_masks(const FeatureMask& own, const FeatureMask& partner, double mixing, Rng& rng);

/// Draws phi uniform in [-1, 1], blends with mixing |phi|, then repairs bounds.
FeatureMask generate_neighbor(const FeatureMask& own, const FeatureMask& partner, Bounds bounds, Rng& rng);

/// Sets (or clears) uniformly chosen bits until the popcount enters the window.
FeatureMask repair_bounds(FeatureMask mask, Bounds bounds, Rng& rng);

/// Strict improvement replaces the source and zeroes its trials; anything
/// else keeps the incumbent with one more trial.
FoodSource greedy_select(const FoodSource& current, FeatureMask candidate, const FitnessFunction& fitness);

/// Fitness-proportional roulette weights; uniform when every fitness is 0.
std::vector<double> onlooker_probabilities(std::span<const FoodSource> colony);

/// Fresh random subset of cardinality round(lower + u (upper - lower)),
/// u uniform in [0, 1).
FeatureMask scout_reset(const ColonyConfig& config, std::size_t n_features, Rng& rng);

/// The full search. Each iteration runs the employed phase (one neighbor per
/// source, partner drawn from the other sources), the onlooker phase
/// (population_size roulette picks), then at most one scout: the source with
/// the most trials above `limit`, lowest index on ties. Stops early once a
/// source scores 1.0.
RunResult run(const ColonyConfig& config,
              std::size_t n_features,
              const FitnessFunction& fitness,
              const IterationObserver& observer = {});

/// run() scored by a cached SubsetEvaluator over `dataset`.
RunResult run(const ColonyConfig& config, const Dataset& dataset, const FitnessProtocol& protocol);

}  // namespace abcfs
