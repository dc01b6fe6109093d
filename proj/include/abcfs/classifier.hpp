#pragma once

#include <cstddef>
#include <cstdint>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "abcfs/dataset.hpp"
#include "abcfs/feature_mask.hpp"

namespace abcfs {

struct SvmHyperparams
{
    double regularization_strength = 1e-4;
    std::size_t epochs = 30;
    double learning_rate_scale = 1.0;
    std::uint64_t seed = 0;

    friend bool operator==(const SvmHyperparams&, const SvmHyperparams&) = default;
};

/// Decision function w.x + b; the score 0 belongs to the positive class.
struct LinearModel
{
    std::vector<double> weights;
    double bias = 0.0;

    double score(std::span<const double> sample) const;
};

enum class EvaluatorKind { svm, centroid };

struct FitnessProtocol
{
    SplitSpec split{0.7, true, 0};
    EvaluatorKind evaluator = EvaluatorKind::svm;
    SvmHyperparams svm;

    friend bool operator==(const FitnessProtocol&, const FitnessProtocol&) = default;
};

const char* to_string(EvaluatorKind kind);
EvaluatorKind evaluator_from_string(std::string_view name);

/// Primal linear SVM trained by stochastic subgradient descent on
///   lambda/2 (|w|^2 + b^2) + mean(max(0, 1 - y (w.x + b))),  y in {-1, +1},
/// with step lr_scale / (lambda t) at update t. The bias is treated as the
/// weight of a constant feature, so it shrinks with w. One pass per epoch
/// over a seeded permutation of the rows; the returned model is the mean of
/// the iterates visited during the final epoch.
LinearModel train_linear_svm(const Dataset& train, const SvmHyperparams& params);

/// The SVM objective above, evaluated on `d`.
double svm_objective(const LinearModel& model, const Dataset& d, double regularization_strength);

/// Nearest class mean written as a linear model:
///   w = mu1 - mu0,  b = (|mu0|^2 - |mu1|^2) / 2.
LinearModel train_centroid(const Dataset& train);

Label predict(const LinearModel& model, std::span<const double> sample);
std::vector<Label> predict_all(const LinearModel& model, const Dataset& d);

/// Trains the protocol's evaluator on `train`.
LinearModel train(const Dataset& train, const FitnessProtocol& protocol);

/// Splits `d` per the protocol, trains on the masked train side and returns
/// validation accuracy.
double evaluate_subset(const FeatureMask& mask, const Dataset& d, const FitnessProtocol& protocol);

/// evaluate_subset with the split computed once and results memoized per mask.
/// operator() is safe to call from several threads at once.
class SubsetEvaluator
{
public:
    SubsetEvaluator(const Dataset& d, FitnessProtocol protocol);

    double operator()(const FeatureMask& mask);

    const Split& split() const noexcept { return split_; }
    std::size_t n_features() const noexcept { return split_.train.n_features(); }
    std::size_t cache_size() const;

private:
    double compute(const FeatureMask& mask) const;

    FitnessProtocol protocol_;
    Split split_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<FeatureMask, double, FeatureMaskHash> cache_;
};

}  // namespace abcfs
