#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "abcfs/abc.hpp"
#include "abcfs/classifier.hpp"
#include "abcfs/dataset.hpp"
#include "abcfs/metrics.hpp"

namespace abcfs {

inline constexpr int kResultsSchemaVersion = 1;

struct ExperimentConfig
{
    std::string data_path;
    std::string label_column = "class";
    ColonyConfig colony;
    FitnessProtocol protocol;
    std::optional<std::vector<std::size_t>> sweep_sizes;
    double final_test_fraction = 0.2;
    std::string output_path = "results";
    /// Reference accuracy carried into the report. Never asserted against.
    std::optional<double> baseline_accuracy;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError with every violation. In sweep mode the colony bounds
/// are replaced per size, so only the sweep sizes are range-checked.
void validate(const ExperimentConfig& config, std::size_t n_features);

/// One ABC search plus its held-out evaluation.
struct SingleRunReport
{
    std::uint64_t colony_seed = 0;
    RunResult run;
    std::vector<std::string> selected_features;
    /// Validation accuracy of the all-features mask on the fitness split.
    double baseline_fitness = 0.0;
    /// Final test partition, model retrained on the whole remainder.
    ConfusionMatrix confusion;
    MetricsReport metrics;
    ConfusionMatrix baseline_confusion;
    MetricsReport baseline_metrics;
    std::size_t distinct_masks = 0;
    std::size_t test_samples = 0;
    std::size_t fitness_samples = 0;
};

struct SweepEntry
{
    std::size_t size = 0;
    SingleRunReport report;
};

struct SweepResult
{
    std::vector<SweepEntry> entries;
    std::size_t chosen_size = 0;

    const SweepEntry& chosen() const;
};

/// Source-row partition used by run_single, exposed for leakage checks.
struct ExperimentPartition
{
    Dataset remainder;
    Dataset test;
};

ExperimentPartition partition_for_experiment(const Dataset& d, const ExperimentConfig& config);

/// Throws InternalError if any source row of `test` appears in `fitness`.
void assert_disjoint(const Dataset& test, const Split& fitness);

SingleRunReport run_single(const ExperimentConfig& config, const Dataset& d);
SingleRunReport run_single(const ExperimentConfig& config);

/// Largest final accuracy; ties go to the smaller size.
std::size_t choose_size(std::span<const SweepEntry> entries);

SweepResult run_sweep(const ExperimentConfig& config, const Dataset& d);
SweepResult run_sweep(const ExperimentConfig& config);

/// Writes results.json, sweep.csv and report.csv under `dir`.
void emit_results(const SweepResult& result, const ExperimentConfig& config, const std::filesystem::path& dir);
/// Writes results.json and report.csv under `dir`.
void emit_results(const SingleRunReport& result, const ExperimentConfig& config, const std::filesystem::path& dir);

nlohmann::json results_json(const SweepResult& result, const ExperimentConfig& config);
nlohmann::json results_json(const SingleRunReport& result, const ExperimentConfig& config);
std::string sweep_csv(const SweepResult& result);
std::string report_csv(const SingleRunReport& result, const ExperimentConfig& config);

void to_json(nlohmann::json& j, const ExperimentConfig& config);
void from_json(const nlohmann::json& j, ExperimentConfig& config);

}  // namespace abcfs
