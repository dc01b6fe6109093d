#pragma once

#include <cstddef>
#include <span>

#include <json.hpp>

#include "abcfs/dataset.hpp"

namespace abcfs {

struct ConfusionMatrix
{
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    std::size_t actual_positives() const noexcept { return tp + fn; }
    std::size_t actual_negatives() const noexcept { return tn + fp; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricsReport
{
    double accuracy = 0.0;
    double recall = 0.0;
    double specificity = 0.0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);

// Each throws MetricError when its denominator is zero.
double accuracy(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double specificity(const ConfusionMatrix& cm);

/// All three metrics; requires at least one actual positive and one actual negative.
MetricsReport report(const ConfusionMatrix& cm);

/// Fixed four-decimal rendering used by every emitted table.
double round4(double v);

void to_json(nlohmann::json& j, const MetricsReport& m);
void from_json(const nlohmann::json& j, MetricsReport& m);
void to_json(nlohmann::json& j, const ConfusionMatrix& cm);

}  // namespace abcfs
