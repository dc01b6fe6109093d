#include "abcfs/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "abcfs/errors.hpp"

namespace abcfs {

namespace {

struct PublishedRow
{
    const char* approach;
    const char* recall;
    const char* specificity;
    const char* accuracy;
    const char* note;
};

// Literature values, kept verbatim as printed (percent).
constexpr PublishedRow kPublishedRows[] = {
    {"DroidFusion (J48)", "98.4", "998.9", "98.6", "specificity printed as 998.9; presumably 98.9"},
    {"ABC+SVM (published)", "98.9", "99.46", "99.18", ""},
};

std::string fixed4(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", round4(v));
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << content;
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void prepare_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

std::string method_name(const FitnessProtocol& protocol)
{
    return protocol.evaluator == EvaluatorKind::svm ? "ABC+SVM" : "ABC+centroid";
}

std::string baseline_name(const FitnessProtocol& protocol)
{
    return protocol.evaluator == EvaluatorKind::svm ? "All features (SVM)" : "All features (centroid)";
}

nlohmann::json run_json(const SingleRunReport& r)
{
    return {
        {"colony_seed", r.colony_seed},
        {"best_fitness", r.run.best_fitness},
        {"baseline_fitness", r.baseline_fitness},
        {"best_mask", r.run.best_mask.to_string()},
        {"selected_count", r.run.best_mask.count()},
        {"selected_features", r.selected_features},
        {"history", r.run.history},
        {"evaluations", r.run.evaluations},
        {"distinct_masks", r.distinct_masks},
        {"scout_events", r.run.scout_events},
        {"fitness_samples", r.fitness_samples},
        {"test_samples", r.test_samples},
        {"metrics", r.metrics},
        {"confusion", r.confusion},
        {"baseline_metrics", r.baseline_metrics},
        {"baseline_confusion", r.baseline_confusion},
    };
}

nlohmann::json published_json()
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : kPublishedRows) {
        nlohmann::json j = {{"approach", row.approach},
                            {"recall", row.recall},
                            {"specificity", row.specificity},
                            {"accuracy", row.accuracy},
                            {"unit", "percent"}};
        if (*row.note != '\0') {
            j["note"] = row.note;
        }
        rows.push_back(std::move(j));
    }
    return rows;
}

SingleRunReport evaluate_run(const ExperimentConfig& config, const Dataset& d)
{
    const ExperimentPartition part = partition_for_experiment(d, config);
    SubsetEvaluator evaluator(part.remainder, config.protocol);
    assert_disjoint(part.test, evaluator.split());

    SingleRunReport report;
    report.colony_seed = config.colony.seed;
    report.fitness_samples = part.remainder.n_samples();
    report.test_samples = part.test.n_samples();
    report.run = run(config.colony, d.n_features(), [&evaluator](const FeatureMask& m) { return evaluator(m); });
    report.distinct_masks = evaluator.cache_size();

    const FeatureMask all(d.n_features(), true);
    report.baseline_fitness = evaluator(all);

    for (std::size_t i : report.run.best_mask.indices()) {
        report.selected_features.push_back(d.feature_names()[i]);
    }

    auto final_eval = [&](const FeatureMask& mask, ConfusionMatrix& cm, MetricsReport& metrics) {
        const Dataset fit_side = project(part.remainder, mask);
        const Dataset test_side = project(part.test, mask);
        const LinearModel model = train(fit_side, config.protocol);
        cm = confusion(predict_all(model, test_side), test_side.labels());
        metrics = abcfs::report(cm);
    };
    final_eval(report.run.best_mask, report.confusion, report.metrics);
    final_eval(all, report.baseline_confusion, report.baseline_metrics);
    return report;
}

}  // namespace

void validate(const ExperimentConfig& config, std::size_t n_features)
{
    std::vector<std::string> violations;
    auto absorb = [&](auto&& check) {
        try {
            check();
        } catch (const ConfigError& e) {
            violations.insert(violations.end(), e.violations().begin(), e.violations().end());
        }
    };

    if (config.sweep_sizes) {
        const auto& sizes = *config.sweep_sizes;
        if (sizes.empty()) {
            violations.emplace_back("sweep size list is empty");
        }
        std::set<std::size_t> seen;
        for (std::size_t k : sizes) {
            if (k < 1 || k > n_features) {
                violations.push_back("sweep size " + std::to_string(k) + " outside [1, " + std::to_string(n_features) +
                                     "]");
            }
            if (!seen.insert(k).second) {
                violations.push_back("sweep size " + std::to_string(k) + " listed twice");
            }
        }
        ColonyConfig probe = config.colony;
        probe.lower_bound = probe.upper_bound = 1;
        absorb([&] { abcfs::validate(probe, n_features); });
    } else {
        absorb([&] { abcfs::validate(config.colony, n_features); });
    }

    if (!(config.final_test_fraction > 0.0 && config.final_test_fraction < 1.0)) {
        violations.emplace_back("final_test_fraction must lie in (0,1)");
    }
    if (!(config.protocol.split.train_fraction > 0.0 && config.protocol.split.train_fraction < 1.0)) {
        violations.emplace_back("train_fraction must lie in (0,1)");
    }
    if (config.protocol.evaluator == EvaluatorKind::svm) {
        if (config.protocol.svm.epochs < 1) {
            violations.emplace_back("svm epochs must be at least 1");
        }
        if (!(config.protocol.svm.regularization_strength > 0.0)) {
            violations.emplace_back("svm regularization strength must be positive");
        }
        if (!(config.protocol.svm.learning_rate_scale > 0.0)) {
            violations.emplace_back("svm learning-rate scale must be positive");
        }
    }
    if (!violations.empty()) {
        throw ConfigError(std::move(violations));
    }
}

const SweepEntry& SweepResult::chosen() const
{
    for (const auto& e : entries) {
        if (e.size == chosen_size) {
            return e;
        }
    }
    throw InternalError("chosen sweep size " + std::to_string(chosen_size) + " has no entry");
}

ExperimentPartition partition_for_experiment(const Dataset& d, const ExperimentConfig& config)
{
    SplitSpec spec = config.protocol.split;
    spec.train_fraction = 1.0 - config.final_test_fraction;
    spec.stratified = true;
    auto split = stratified_split(d, spec);
    return {std::move(split.train), std::move(split.test)};
}

void assert_disjoint(const Dataset& test, const Split& fitness)
{
    const std::unordered_set<std::size_t> held_out(test.source_rows().begin(), test.source_rows().end());
    for (const Dataset* part : {&fitness.train, &fitness.test}) {
        for (std::size_t row : part->source_rows()) {
            if (held_out.contains(row)) {
                throw InternalError("final test row " + std::to_string(row) + " leaked into fitness evaluation");
            }
        }
    }
}

SingleRunReport run_single(const ExperimentConfig& config, const Dataset& d)
{
    ExperimentConfig single = config;
    single.sweep_sizes.reset();
    validate(single, d.n_features());
    return evaluate_run(single, d);
}

SingleRunReport run_single(const ExperimentConfig& config)
{
    return run_single(config, load_csv(config.data_path, config.label_column));
}

std::size_t choose_size(std::span<const SweepEntry> entries)
{
    if (entries.empty()) {
        throw InternalError("cannot choose a size from an empty sweep");
    }
    const SweepEntry* best = &entries.front();
    for (const auto& e : entries) {
        const double acc = e.report.metrics.accuracy;
        if (acc > best->report.metrics.accuracy || (acc == best->report.metrics.accuracy && e.size < best->size)) {
            best = &e;
        }
    }
    return best->size;
}

SweepResult run_sweep(const ExperimentConfig& config, const Dataset& d)
{
    if (!config.sweep_sizes) {
        throw ConfigError({"sweep requested without sweep sizes"});
    }
    validate(config, d.n_features());

    std::vector<std::size_t> sizes = *config.sweep_sizes;
    std::sort(sizes.begin(), sizes.end());

    SweepResult result;
    for (std::size_t k : sizes) {
        ExperimentConfig entry_config = config;
        entry_config.sweep_sizes.reset();
        entry_config.colony.lower_bound = k;
        entry_config.colony.upper_bound = k;
        entry_config.colony.seed = config.colony.seed + k;
        const std::string where = "sweep size " + std::to_string(k) + ": ";
        try {
            result.entries.push_back({k, run_single(entry_config, d)});
        } catch (const ConfigError& e) {
            std::vector<std::string> v;
            for (const auto& msg : e.violations()) {
                v.push_back(where + msg);
            }
            throw ConfigError(std::move(v));
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        } catch (const MetricError& e) {
            throw MetricError(where + e.what());
        } catch (const InternalError& e) {
            throw InternalError(where + e.what());
        }
    }
    result.chosen_size = choose_size(result.entries);
    return result;
}

SweepResult run_sweep(const ExperimentConfig& config)
{
    return run_sweep(config, load_csv(config.data_path, config.label_column));
}

nlohmann::json results_json(const SweepResult& result, const ExperimentConfig& config)
{
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& e : result.entries) {
        nlohmann::json j = run_json(e.report);
        j["size"] = e.size;
        runs.push_back(std::move(j));
    }
    return {
        {"schema_version", kResultsSchemaVersion},
        {"mode", "sweep"},
        {"config", config},
        {"runs", std::move(runs)},
        {"chosen_size", result.chosen_size},
        {"published_results", published_json()},
    };
}

nlohmann::json results_json(const SingleRunReport& result, const ExperimentConfig& config)
{
    return {
        {"schema_version", kResultsSchemaVersion},
        {"mode", "single"},
        {"config", config},
        {"runs", nlohmann::json::array({run_json(result)})},
        {"published_results", published_json()},
    };
}

std::string sweep_csv(const SweepResult& result)
{
    std::ostringstream out;
    out << "size,accuracy,baseline_accuracy\n";
    for (const auto& e : result.entries) {
        out << e.size << ',' << fixed4(e.report.metrics.accuracy) << ',' << fixed4(e.report.baseline_metrics.accuracy)
            << '\n';
    }
    return out.str();
}

std::string report_csv(const SingleRunReport& result, const ExperimentConfig& config)
{
    std::ostringstream out;
    out << "approach,recall,specificity,accuracy,unit,source\n";
    auto computed = [&](const std::string& name, const MetricsReport& m) {
        out << name << ',' << fixed4(m.recall) << ',' << fixed4(m.specificity) << ',' << fixed4(m.accuracy)
            << ",fraction,computed\n";
    };
    computed(method_name(config.protocol) + " (" + std::to_string(result.run.best_mask.count()) + " features)",
             result.metrics);
    computed(baseline_name(config.protocol), result.baseline_metrics);
    if (config.baseline_accuracy) {
        out << "Reference baseline,,," << fixed4(*config.baseline_accuracy) << ",fraction,user-supplied\n";
    }
    for (const auto& row : kPublishedRows) {
        out << row.approach << ',' << row.recall << ',' << row.specificity << ',' << row.accuracy << ",percent,published";
        if (*row.note != '\0') {
            out << " (" << row.note << ')';
        }
        out << '\n';
    }
    return out.str();
}

void emit_results(const SweepResult& result, const ExperimentConfig& config, const std::filesystem::path& dir)
{
    prepare_dir(dir);
    write_file(dir / "results.json", results_json(result, config).dump(2) + "\n");
    write_file(dir / "sweep.csv", sweep_csv(result));
    write_file(dir / "report.csv", report_csv(result.chosen().report, config));
}

void emit_results(const SingleRunReport& result, const ExperimentConfig& config, const std::filesystem::path& dir)
{
    prepare_dir(dir);
    write_file(dir / "results.json", results_json(result, config).dump(2) + "\n");
    write_file(dir / "report.csv", report_csv(result, config));
}

void to_json(nlohmann::json& j, const ExperimentConfig& config)
{
    const auto& c = config.colony;
    const auto& p = config.protocol;
    j = nlohmann::json{
        {"data_path", config.data_path},
        {"label_column", config.label_column},
        {"colony",
         {{"population_size", c.population_size},
          {"limit", c.limit},
          {"lower_bound", c.lower_bound},
          {"upper_bound", c.upper_bound},
          {"max_iterations", c.max_iterations},
          {"seed", c.seed}}},
        {"protocol",
         {{"split",
           {{"train_fraction", p.split.train_fraction}, {"stratified", p.split.stratified}, {"seed", p.split.seed}}},
          {"evaluator", to_string(p.evaluator)},
          {"svm",
           {{"regularization_strength", p.svm.regularization_strength},
            {"epochs", p.svm.epochs},
            {"learning_rate_scale", p.svm.learning_rate_scale},
            {"seed", p.svm.seed}}}}},
        {"sweep_sizes", config.sweep_sizes ? nlohmann::json(*config.sweep_sizes) : nlohmann::json(nullptr)},
        {"final_test_fraction", config.final_test_fraction},
        {"output_path", config.output_path},
        {"baseline_accuracy", config.baseline_accuracy ? nlohmann::json(*config.baseline_accuracy) : nlohmann::json(nullptr)},
    };
}

void from_json(const nlohmann::json& j, ExperimentConfig& config)
{
    j.at("data_path").get_to(config.data_path);
    j.at("label_column").get_to(config.label_column);

    const auto& c = j.at("colony");
    c.at("population_size").get_to(config.colony.population_size);
    c.at("limit").get_to(config.colony.limit);
    c.at("lower_bound").get_to(config.colony.lower_bound);
    c.at("upper_bound").get_to(config.colony.upper_bound);
    c.at("max_iterations").get_to(config.colony.max_iterations);
    c.at("seed").get_to(config.colony.seed);

    const auto& p = j.at("protocol");
    p.at("split").at("train_fraction").get_to(config.protocol.split.train_fraction);
    p.at("split").at("stratified").get_to(config.protocol.split.stratified);
    p.at("split").at("seed").get_to(config.protocol.split.seed);
    config.protocol.evaluator = evaluator_from_string(p.at("evaluator").get<std::string>());
    const auto& s = p.at("svm");
    s.at("regularization_strength").get_to(config.protocol.svm.regularization_strength);
    s.at("epochs").get_to(config.protocol.svm.epochs);
    s.at("learning_rate_scale").get_to(config.protocol.svm.learning_rate_scale);
    s.at("seed").get_to(config.protocol.svm.seed);

    if (j.at("sweep_sizes").is_null()) {
        config.sweep_sizes.reset();
    } else {
        config.sweep_sizes = j.at("sweep_sizes").get<std::vector<std::size_t>>();
    }
    j.at("final_test_fraction").get_to(config.final_test_fraction);
    j.at("output_path").get_to(config.output_path);
    if (j.at("baseline_accuracy").is_null()) {
        config.baseline_accuracy.reset();
    } else {
        config.baseline_accuracy = j.at("baseline_accuracy").get<double>();
    }
}

}  // namespace abcfs
