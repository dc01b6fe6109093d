#include <doctest.h>

#include <sstream>

#include "abcfs/errors.hpp"
#include "abcfs/harness.hpp"
#include "test_util.hpp"

using namespace abcfs;
using abcfs::testing::read_file;
using abcfs::testing::TempDir;

namespace {

const std::vector<std::size_t> kInformative{0, 1, 2};

ExperimentConfig synthetic_config()
{
    ExperimentConfig c;
    c.data_path = "synthetic.csv";
    c.colony.population_size = 10;
    c.colony.limit = 5;
    c.colony.lower_bound = 3;
    c.colony.upper_bound = 6;
    c.colony.max_iterations = 30;
    c.colony.seed = 4;
    c.protocol.evaluator = EvaluatorKind::centroid;
    return c;
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("run_single reports held-out metrics close to the search fitness")
{
    const Dataset d = generate_synthetic(1000, 12, kInformative, 0.1, 31);
    const auto r = run_single(synthetic_config(), d);
    CHECK(std::abs(r.metrics.accuracy - r.run.best_fitness) <= 0.05);
    CHECK(r.test_samples == 200);
    CHECK(r.fitness_samples == 800);
    CHECK(r.selected_features.size() == r.run.best_mask.count());
    CHECK(r.confusion.total() == r.test_samples);
    CHECK(r.metrics == report(r.confusion));
}

TEST_CASE("run_single with the full mask forced reproduces the full-feature baseline")
{
    const Dataset d = generate_synthetic(400, 12, kInformative, 0.1, 8);
    for (auto kind : {EvaluatorKind::centroid, EvaluatorKind::svm}) {
        auto c = synthetic_config();
        c.protocol.evaluator = kind;
        c.colony.lower_bound = c.colony.upper_bound = 12;
        c.colony.max_iterations = 0;
        const auto r = run_single(c, d);
        CHECK(r.run.best_mask == FeatureMask(12, true));
        CHECK(r.metrics == r.baseline_metrics);
        CHECK(r.confusion == r.baseline_confusion);
        CHECK(r.run.best_fitness == r.baseline_fitness);
    }
}

TEST_CASE("validation names the offending sweep size and lists every violation")
{
    auto c = synthetic_config();
    c.sweep_sizes = std::vector<std::size_t>{90, 300};
    try {
        validate(c, 215);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].find("300") != std::string::npos);
    }

    c.sweep_sizes = std::vector<std::size_t>{5, 5, 0};
    c.final_test_fraction = 1.5;
    c.colony.population_size = 1;
    try {
        validate(c, 12);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 4);
    }

    const Dataset d = generate_synthetic(60, 215, kInformative, 0.0, 1);
    c = synthetic_config();
    c.sweep_sizes = std::vector<std::size_t>{300};
    CHECK_THROWS_AS(run_sweep(c, d), ConfigError);
}

TEST_CASE("final test rows never reach fitness evaluation")
{
    const Dataset d = generate_synthetic(500, 12, kInformative, 0.1, 2);
    const auto c = synthetic_config();
    const auto part = partition_for_experiment(d, c);
    SubsetEvaluator evaluator(part.remainder, c.protocol);
    CHECK_NOTHROW(assert_disjoint(part.test, evaluator.split()));
    CHECK(part.test.n_samples() + evaluator.split().train.n_samples() + evaluator.split().test.n_samples() == 500);

    // A fitness split taken from the full data overlaps the test side.
    SubsetEvaluator leaky(d, c.protocol);
    CHECK_THROWS_AS(assert_disjoint(part.test, leaky.split()), InternalError);
}

TEST_CASE("sweep entries equal independent single runs with seed + size")
{
    const Dataset d = generate_synthetic(500, 12, kInformative, 0.1, 13);
    auto c = synthetic_config();
    c.sweep_sizes = std::vector<std::size_t>{6, 3};
    const auto sweep = run_sweep(c, d);
    REQUIRE(sweep.entries.size() == 2);
    CHECK(sweep.entries[0].size == 3);
    CHECK(sweep.entries[1].size == 6);

    for (const auto& e : sweep.entries) {
        auto single = synthetic_config();
        single.colony.lower_bound = single.colony.upper_bound = e.size;
        single.colony.seed = c.colony.seed + e.size;
        const auto r = run_single(single, d);
        CHECK(r.metrics == e.report.metrics);
        CHECK(r.run.history == e.report.run.history);
        CHECK(r.run.best_mask == e.report.run.best_mask);
        CHECK(e.report.run.best_mask.count() == e.size);
        CHECK(e.report.colony_seed == c.colony.seed + e.size);
    }
}

TEST_CASE("choose_size prefers the smaller size on ties")
{
    std::vector<SweepEntry> entries(3);
    entries[0].size = 160;
    entries[1].size = 150;
    entries[2].size = 140;
    entries[0].report.metrics.accuracy = 0.99;
    entries[1].report.metrics.accuracy = 0.99;
    entries[2].report.metrics.accuracy = 0.98;
    CHECK(choose_size(entries) == 150);
    entries[2].report.metrics.accuracy = 0.995;
    CHECK(choose_size(entries) == 140);
}

TEST_CASE("emitted files")
{
    TempDir tmp;
    const Dataset d = generate_synthetic(400, 20, kInformative, 0.1, 5);
    auto c = synthetic_config();
    c.colony.max_iterations = 5;
    c.sweep_sizes = std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8};
    c.baseline_accuracy = 0.986;
    const auto sweep = run_sweep(c, d);

    emit_results(sweep, c, tmp / "a");
    const auto csv = read_file(tmp / "a" / "sweep.csv");
    CHECK(count_lines(csv) == 9);
    CHECK(csv.rfind("size,accuracy,baseline_accuracy\n", 0) == 0);

    SUBCASE("report row mirrors the chosen entry at four decimals")
    {
        const auto report_text = read_file(tmp / "a" / "report.csv");
        std::istringstream in(report_text);
        std::string header;
        std::string row;
        std::getline(in, header);
        std::getline(in, row);
        CHECK(header == "approach,recall,specificity,accuracy,unit,source");
        const auto& m = sweep.chosen().report.metrics;
        char want[128];
        std::snprintf(want, sizeof(want), ",%.4f,%.4f,%.4f,fraction,computed", round4(m.recall), round4(m.specificity),
                      round4(m.accuracy));
        CHECK(row.find(want) != std::string::npos);
        CHECK(report_text.find("Reference baseline,,,0.9860,fraction,user-supplied") != std::string::npos);
        CHECK(report_text.find("DroidFusion (J48),98.4,998.9,98.6,percent") != std::string::npos);
    }

    SUBCASE("results.json carries the run fields verbatim")
    {
        const auto j = nlohmann::json::parse(read_file(tmp / "a" / "results.json"));
        CHECK(j.at("schema_version") == 1);
        CHECK(j.at("mode") == "sweep");
        CHECK(j.at("runs").size() == 8);
        CHECK(j.at("chosen_size") == sweep.chosen_size);
        for (std::size_t i = 0; i < 8; ++i) {
            const auto& run = j.at("runs")[i];
            const auto& e = sweep.entries[i];
            CHECK(run.at("size") == e.size);
            CHECK(run.at("best_fitness").get<double>() == e.report.run.best_fitness);
            CHECK(run.at("history").get<std::vector<double>>() == e.report.run.history);
            CHECK(run.at("evaluations") == e.report.run.evaluations);
            CHECK(run.at("metrics").get<MetricsReport>() == e.report.metrics);
            CHECK(run.at("best_mask") == e.report.run.best_mask.to_string());
        }
        CHECK(j.at("config").get<ExperimentConfig>() == c);
    }

    SUBCASE("re-running writes byte-identical files")
    {
        const auto again = run_sweep(c, d);
        emit_results(again, c, tmp / "b");
        for (const char* name : {"results.json", "sweep.csv", "report.csv"}) {
            CHECK(read_file(tmp / "a" / name) == read_file(tmp / "b" / name));
        }
    }
}

TEST_CASE("single-run output and config echo round-trip")
{
    TempDir tmp;
    const Dataset d = generate_synthetic(300, 12, kInformative, 0.1, 6);
    auto c = synthetic_config();
    c.protocol.evaluator = EvaluatorKind::svm;
    c.protocol.svm.regularization_strength = 3e-4;
    c.protocol.split = {0.65, true, 99};
    c.colony.max_iterations = 3;
    const auto r = run_single(c, d);
    emit_results(r, c, tmp / "single");
    CHECK(std::filesystem::exists(tmp / "single" / "report.csv"));
    CHECK_FALSE(std::filesystem::exists(tmp / "single" / "sweep.csv"));
    const auto j = nlohmann::json::parse(read_file(tmp / "single" / "results.json"));
    CHECK(j.at("mode") == "single");
    CHECK(j.at("config").get<ExperimentConfig>() == c);
    CHECK(j.at("runs")[0].at("metrics").get<MetricsReport>() == r.metrics);
}

TEST_CASE("run_single loads from disk")
{
    TempDir tmp;
    const Dataset d = generate_synthetic(300, 12, kInformative, 0.0, 3);
    write_csv(d, tmp / "d.csv", "class");
    auto c = synthetic_config();
    c.data_path = (tmp / "d.csv").string();
    const auto from_disk = run_single(c);
    const auto in_memory = run_single(c, d);
    CHECK(from_disk.metrics == in_memory.metrics);
    CHECK(from_disk.run.history == in_memory.run.history);

    c.data_path = (tmp / "missing.csv").string();
    CHECK_THROWS_AS(run_single(c), DataError);
}

TEST_CASE("emit_results reports unwritable paths")
{
    TempDir tmp;
    const auto blocker = tmp.write("file", "x");
    const Dataset d = generate_synthetic(200, 6, kInformative, 0.0, 3);
    auto c = synthetic_config();
    c.colony.max_iterations = 1;
    const auto r = run_single(c, d);
    CHECK_THROWS_AS(emit_results(r, c, blocker / "sub"), IoError);
}
