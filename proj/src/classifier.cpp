#include "abcfs/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "abcfs/errors.hpp"
#include "abcfs/metrics.hpp"
#include "abcfs/random.hpp"

namespace abcfs {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void require_both_classes(const Dataset& d, const char* who)
{
    if (d.positives() == 0 || d.negatives() == 0) {
        throw DataError(std::string(who) + ": training data contains a single class");
    }
    if (d.n_features() == 0) {
        throw DataError(std::string(who) + ": training data has no features");
    }
}

// Scales the model by the alpha in [0, 1/(sqrt(lambda)|w|)] minimizing the
// objective. The objective is convex in alpha and alpha = 0 is the zero model.
// Positive scaling leaves every prediction unchanged.
void rescale_to_ray_minimum(LinearModel& model, const Dataset& d, double lambda)
{
    const double norm2 = dot(model.weights, model.weights) + model.bias * model.bias;
    if (!(norm2 > 0.0)) {
        return;
    }
    std::vector<double> margins(d.n_samples());
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        const double y = d.labels()[i] == 1 ? 1.0 : -1.0;
        margins[i] = y * (dot(model.weights, d.row(i)) + model.bias);
    }
    const auto objective = [&](double alpha) {
        double hinge = 0.0;
        for (double m : margins) {
            hinge += std::max(0.0, 1.0 - alpha * m);
        }
        return 0.5 * lambda * alpha * alpha * norm2 + hinge / static_cast<double>(margins.size());
    };

    double lo = 0.0;
    double hi = 1.0 / std::sqrt(lambda * norm2);
    for (int iter = 0; iter < 100; ++iter) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (objective(a) <= objective(b)) {
            hi = b;
        } else {
            lo = a;
        }
    }
    double alpha = 0.5 * (lo + hi);
    if (objective(1.0) <= objective(alpha)) {
        alpha = 1.0;
    }
    if (objective(0.0) < objective(alpha)) {
        alpha = 0.0;
    }
    if (alpha == 1.0) {
        return;
    }
    for (double& w : model.weights) {
        w *= alpha;
    }
    model.bias *= alpha;
}

}  // namespace

double LinearModel::score(std::span<const double> sample) const
{
    if (sample.size() != weights.size()) {
        throw DataError("sample length " + std::to_string(sample.size()) + " does not match model dimension " +
                        std::to_string(weights.size()));
    }
    return dot(weights, sample) + bias;
}

const char* to_string(EvaluatorKind kind)
{
    return kind == EvaluatorKind::svm ? "svm" : "centroid";
}

EvaluatorKind evaluator_from_string(std::string_view name)
{
    if (name == "svm") {
        return EvaluatorKind::svm;
    }
    if (name == "centroid") {
        return EvaluatorKind::centroid;
    }
    throw ConfigError({"unknown fitness evaluator '" + std::string(name) + "' (expected svm or centroid)"});
}

LinearModel train_linear_svm(const Dataset& train, const SvmHyperparams& params)
{
    std::vector<std::string> violations;
    if (params.epochs < 1) {
        violations.emplace_back("svm epochs must be at least 1");
    }
    if (!(params.regularization_strength > 0.0) || !std::isfinite(params.regularization_strength)) {
        violations.emplace_back("svm regularization_strength must be positive");
    }
    if (!(params.learning_rate_scale > 0.0) || !std::isfinite(params.learning_rate_scale)) {
        violations.emplace_back("svm learning_rate_scale must be positive");
    }
    if (!violations.empty()) {
        throw ConfigError(std::move(violations));
    }
    require_both_classes(train, "train_linear_svm");
    for (double v : train.features()) {
        if (!std::isfinite(v)) {
            throw DataError("train_linear_svm: non-finite feature value");
        }
    }

    const std::size_t dim = train.n_features();
    const double lambda = params.regularization_strength;

    // w = scale * v keeps the per-step shrink O(1). The bias rides along as
    // the weight of a constant-1 feature.
    std::vector<double> v(dim, 0.0);
    double v_bias = 0.0;
    double scale = 1.0;

    std::vector<std::size_t> order(train.n_samples());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(params.seed);

    // Running mean of the iterates over the last epoch.
    std::vector<double> mean(dim, 0.0);
    double mean_bias = 0.0;
    std::size_t averaged = 0;

    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const bool last_epoch = epoch + 1 == params.epochs;
        for (std::size_t i : order) {
            ++t;
            const auto x = train.row(i);
            const double y = train.labels()[i] == 1 ? 1.0 : -1.0;
            const double eta = params.learning_rate_scale / (lambda * static_cast<double>(t));
            const double margin = y * scale * (dot(v, x) + v_bias);

            const double shrink = 1.0 - eta * lambda;
            if (shrink <= 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                v_bias = 0.0;
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            if (margin < 1.0) {
                const double step = eta * y / scale;
                for (std::size_t k = 0; k < dim; ++k) {
                    v[k] += step * x[k];
                }
                v_bias += step;
            }
            if (scale < 1e-9) {
                for (double& vk : v) {
                    vk *= scale;
                }
                v_bias *= scale;
                scale = 1.0;
            }
            if (last_epoch) {
                ++averaged;
                const double rate = 1.0 / static_cast<double>(averaged);
                for (std::size_t k = 0; k < dim; ++k) {
                    mean[k] += rate * (scale * v[k] - mean[k]);
                }
                mean_bias += rate * (scale * v_bias - mean_bias);
            }
        }
    }

    LinearModel model{std::move(mean), mean_bias};
    rescale_to_ray_minimum(model, train, lambda);
    for (double w : model.weights) {
        if (!std::isfinite(w)) {
            throw InternalError("train_linear_svm produced a non-finite weight");
        }
    }
    if (!std::isfinite(model.bias)) {
        throw InternalError("train_linear_svm produced a non-finite bias");
    }
    return model;
}

double svm_objective(const LinearModel& model, const Dataset& d, double regularization_strength)
{
    double hinge = 0.0;
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        const double y = d.labels()[i] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * model.score(d.row(i)));
    }
    const double norm2 = dot(model.weights, model.weights) + model.bias * model.bias;
    return 0.5 * regularization_strength * norm2 + hinge / static_cast<double>(d.n_samples());
}

LinearModel train_centroid(const Dataset& train)
{
    require_both_classes(train, "train_centroid");
    const std::size_t dim = train.n_features();
    std::vector<double> mu0(dim, 0.0);
    std::vector<double> mu1(dim, 0.0);
    for (std::size_t i = 0; i < train.n_samples(); ++i) {
        auto& mu = train.labels()[i] == 1 ? mu1 : mu0;
        const auto x = train.row(i);
        for (std::size_t k = 0; k < dim; ++k) {
            mu[k] += x[k];
        }
    }
    const double n0 = static_cast<double>(train.negatives());
    const double n1 = static_cast<double>(train.positives());
    for (std::size_t k = 0; k < dim; ++k) {
        mu0[k] /= n0;
        mu1[k] /= n1;
    }

    LinearModel model;
    model.weights.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        model.weights[k] = mu1[k] - mu0[k];
    }
    model.bias = 0.5 * (dot(mu0, mu0) - dot(mu1, mu1));
    return model;
}

Label predict(const LinearModel& model, std::span<const double> sample)
{
    return model.score(sample) >= 0.0 ? 1 : 0;
}

std::vector<Label> predict_all(const LinearModel& model, const Dataset& d)
{
    std::vector<Label> out(d.n_samples());
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        out[i] = predict(model, d.row(i));
    }
    return out;
}

LinearModel train(const Dataset& train, const FitnessProtocol& protocol)
{
    return protocol.evaluator == EvaluatorKind::svm ? train_linear_svm(train, protocol.svm) : train_centroid(train);
}

namespace {

double masked_accuracy(const FeatureMask& mask, const Split& split, const FitnessProtocol& protocol)
{
    if (mask.none()) {
        throw DataError("cannot evaluate an empty feature subset");
    }
    const Dataset train_side = project(split.train, mask);
    const Dataset valid_side = project(split.test, mask);
    const LinearModel model = train(train_side, protocol);
    return accuracy(confusion(predict_all(model, valid_side), valid_side.labels()));
}

}  // namespace

double evaluate_subset(const FeatureMask& mask, const Dataset& d, const FitnessProtocol& protocol)
{
    if (mask.none()) {
        throw DataError("cannot evaluate an empty feature subset");
    }
    return masked_accuracy(mask, stratified_split(d, protocol.split), protocol);
}

SubsetEvaluator::SubsetEvaluator(const Dataset& d, FitnessProtocol protocol)
    : protocol_(protocol), split_(stratified_split(d, protocol.split))
{
}

double SubsetEvaluator::operator()(const FeatureMask& mask)
{
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(mask); it != cache_.end()) {
            return it->second;
        }
    }
    const double fitness = compute(mask);
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(mask, fitness).first->second;
}

std::size_t SubsetEvaluator::cache_size() const
{
    std::shared_lock lock(mutex_);
    return cache_.size();
}

double SubsetEvaluator::compute(const FeatureMask& mask) const
{
    return masked_accuracy(mask, split_, protocol_);
}

}  // namespace abcfs
