// abcfs: bee-colony feature selection over a labelled CSV.
//
//   abcfs --data apps.csv --label-col class --lower 1 --upper 215 --out results
//   abcfs --data apps.csv --sweep 90,100,110,120,130,140,150,160 --out sweep

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abcfs/dataset.hpp"
#include "abcfs/errors.hpp"
#include "abcfs/harness.hpp"

namespace {

int fail(const std::string& kind, const std::string& message)
{
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv)
{
    abcfs::ExperimentConfig config;
    std::optional<std::size_t> lower;
    std::optional<std::size_t> upper;
    std::vector<std::size_t> sweep;
    std::string fitness = "svm";
    std::optional<double> baseline;

    CLI::App app{"Artificial bee colony wrapper feature selection"};
    app.add_option("--data", config.data_path, "CSV file with a header row")->required();
    app.add_option("--label-col", config.label_column, "Label column name (or zero-based index)")
        ->capture_default_str();
    app.add_option("--pop-size", config.colony.population_size, "Number of food sources")->capture_default_str();
    app.add_option("--limit", config.colony.limit, "Failed trials before a source is abandoned")
        ->capture_default_str();
    app.add_option("--lower", lower, "Minimum subset size (default 1)");
    app.add_option("--upper", upper, "Maximum subset size (default: all features)");
    app.add_option("--max-iter", config.colony.max_iterations, "Colony iterations")->capture_default_str();
    app.add_option("--seed", config.colony.seed, "Colony seed; sweep entries use seed + size")
        ->capture_default_str();
    app.add_option("--sweep", sweep, "Comma-separated fixed subset sizes")->delimiter(',');
    app.add_option("--fitness", fitness, "Fitness evaluator")
        ->check(CLI::IsMember({"svm", "centroid"}))
        ->capture_default_str();
    app.add_option("--svm-c", config.protocol.svm.regularization_strength, "SVM regularization strength (lambda)")
        ->capture_default_str();
    app.add_option("--svm-epochs", config.protocol.svm.epochs, "SVM passes over the training rows")
        ->capture_default_str();
    app.add_option("--svm-lr", config.protocol.svm.learning_rate_scale, "SVM step-size scale")
        ->capture_default_str();
    app.add_option("--svm-seed", config.protocol.svm.seed, "SVM shuffling seed")->capture_default_str();
    app.add_option("--train-frac", config.protocol.split.train_fraction, "Train share of the fitness split")
        ->capture_default_str();
    app.add_option("--split-seed", config.protocol.split.seed, "Seed for the test and fitness splits")
        ->capture_default_str();
    app.add_option("--test-frac", config.final_test_fraction, "Held-out final test share")->capture_default_str();
    app.add_option("--baseline-acc", baseline, "Reference accuracy copied into the report");
    app.add_option("--out", config.output_path, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        config.protocol.evaluator = abcfs::evaluator_from_string(fitness);
        config.baseline_accuracy = baseline;
        if (!sweep.empty()) {
            config.sweep_sizes = sweep;
        }

        const abcfs::Dataset data = abcfs::load_csv(config.data_path, config.label_column);
        config.colony.lower_bound = lower.value_or(1);
        config.colony.upper_bound = upper.value_or(data.n_features());

        if (config.sweep_sizes) {
            const auto result = abcfs::run_sweep(config, data);
            abcfs::emit_results(result, config, config.output_path);
            for (const auto& e : result.entries) {
                std::cout << "size " << e.size << ": fitness " << e.report.run.best_fitness << ", test accuracy "
                          << e.report.metrics.accuracy << '\n';
            }
            const auto& best = result.chosen().report.metrics;
            std::cout << "chosen size " << result.chosen_size << ": accuracy " << best.accuracy << ", recall "
                      << best.recall << ", specificity " << best.specificity << '\n';
        } else {
            const auto result = abcfs::run_single(config, data);
            abcfs::emit_results(result, config, config.output_path);
            std::cout << "selected " << result.run.best_mask.count() << " features: fitness " << result.run.best_fitness
                      << ", accuracy " << result.metrics.accuracy << ", recall " << result.metrics.recall
                      << ", specificity " << result.metrics.specificity << '\n';
        }
        std::cout << "results written to " << config.output_path << '\n';
    } catch (const abcfs::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("error", e.what());
    }
    return EXIT_SUCCESS;
}
