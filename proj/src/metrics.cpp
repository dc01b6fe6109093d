#include "abcfs/metrics.hpp"

#include <cmath>
#include <string>

#include "abcfs/errors.hpp"

namespace abcfs {

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual)
{
    if (predicted.size() != actual.size()) {
        throw DataError("prediction count " + std::to_string(predicted.size()) + " does not match label count " +
                        std::to_string(actual.size()));
    }
    if (predicted.empty()) {
        throw DataError("confusion matrix needs at least one prediction");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] > 1 || actual[i] > 1) {
            throw DataError("label at position " + std::to_string(i) + " is not 0 or 1");
        }
        if (predicted[i] == 1) {
            ++(actual[i] == 1 ? cm.tp : cm.fp);
        } else {
            ++(actual[i] == 0 ? cm.tn : cm.fn);
        }
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm)
{
    if (cm.total() == 0) {
        throw MetricError("accuracy undefined: empty confusion matrix");
    }
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double recall(const ConfusionMatrix& cm)
{
    if (cm.actual_positives() == 0) {
        throw MetricError("recall undefined: no actual positives (tp + fn == 0)");
    }
    return static_cast<double>(cm.tp) / static_cast<double>(cm.actual_positives());
}

double specificity(const ConfusionMatrix& cm)
{
    if (cm.actual_negatives() == 0) {
        throw MetricError("specificity undefined: no actual negatives (tn + fp == 0)");
    }
    return static_cast<double>(cm.tn) / static_cast<double>(cm.actual_negatives());
}

MetricsReport report(const ConfusionMatrix& cm)
{
    return {accuracy(cm), recall(cm), specificity(cm)};
}

double round4(double v)
{
    return std::round(v * 1e4) / 1e4;
}

void to_json(nlohmann::json& j, const MetricsReport& m)
{
    j = nlohmann::json{{"accuracy", m.accuracy}, {"recall", m.recall}, {"specificity", m.specificity}};
}

void from_json(const nlohmann::json& j, MetricsReport& m)
{
    j.at("accuracy").get_to(m.accuracy);
    j.at("recall").get_to(m.recall);
    j.at("specificity").get_to(m.specificity);
}

void to_json(nlohmann::json& j, const ConfusionMatrix& cm)
{
    j = nlohmann::json{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

}  // namespace abcfs
