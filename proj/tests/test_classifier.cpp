#include <doctest.h>

#include <cmath>
#include <limits>
#include <thread>

#include "abcfs/classifier.hpp"
#include "abcfs/errors.hpp"
#include "abcfs/metrics.hpp"
#include "abcfs/random.hpp"

using namespace abcfs;

namespace {

Dataset make(std::vector<std::vector<double>> rows, std::vector<Label> labels)
{
    const std::size_t dim = rows.front().size();
    std::vector<double> x;
    for (const auto& r : rows) {
        x.insert(x.end(), r.begin(), r.end());
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < dim; ++c) {
        names.push_back("x" + std::to_string(c));
    }
    return Dataset(std::move(x), dim, std::move(labels), std::move(names));
}

// Positives at feature1 = 1, negatives at feature1 = 0, feature2 is noise.
Dataset separable_toy(std::size_t per_class = 10)
{
    Rng rng(3);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const Label y = i % 2 == 0 ? 1 : 0;
        rows.push_back({static_cast<double>(y), coin(rng) ? 1.0 : 0.0});
        labels.push_back(y);
    }
    return make(std::move(rows), std::move(labels));
}

// Margin along axis 0: |x0| in [0.5, 1.5], x1 uniform in [-1, 1].
Dataset margin_2d()
{
    Rng rng(8);
    std::uniform_real_distribution<double> offset(0.5, 1.5);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    for (int i = 0; i < 40; ++i) {
        const Label y = i % 2 == 0 ? 1 : 0;
        rows.push_back({(y == 1 ? 1.0 : -1.0) * offset(rng), noise(rng)});
        labels.push_back(y);
    }
    return make(std::move(rows), std::move(labels));
}

double train_accuracy(const LinearModel& m, const Dataset& d)
{
    return accuracy(confusion(predict_all(m, d), d.labels()));
}

}  // namespace

TEST_CASE("linear SVM separates the toy set and is deterministic")
{
    const Dataset d = separable_toy();
    const SvmHyperparams params;
    const auto a = train_linear_svm(d, params);
    CHECK(train_accuracy(a, d) == 1.0);
    const auto b = train_linear_svm(d, params);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    for (double w : a.weights) {
        CHECK(std::isfinite(w));
    }
}

TEST_CASE("linear SVM matches a grid-searched optimum of the 2D hinge problem")
{
    const Dataset d = margin_2d();
    const double lambda = 0.1;

    // Oracle: exhaustive grid over (w0, w1, b) of the same objective.
    double best = std::numeric_limits<double>::infinity();
    LinearModel grid_best;
    for (int i = -60; i <= 60; ++i) {
        for (int j = -60; j <= 60; ++j) {
            for (int k = -40; k <= 40; ++k) {
                LinearModel m{{0.05 * i, 0.05 * j}, 0.05 * k};
                const double obj = svm_objective(m, d, lambda);
                if (obj < best) {
                    best = obj;
                    grid_best = m;
                }
            }
        }
    }
    REQUIRE(std::abs(grid_best.weights[0]) > std::abs(grid_best.weights[1]));

    const auto model = train_linear_svm(d, {lambda, 200, 1.0, 1});
    CHECK(std::abs(model.weights[0]) > std::abs(model.weights[1]));
    CHECK(model.weights[0] * grid_best.weights[0] > 0.0);
    CHECK(svm_objective(model, d, lambda) <= best + 0.02);
}

TEST_CASE("SVM objective at the trained model never exceeds the zero model")
{
    Rng rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n_features = 3 + rng() % 20;
        const std::vector<std::size_t> informative{0, 1, 2};
        const double noise = 0.05 * static_cast<double>(trial % 5);
        const Dataset d = generate_synthetic(200 + 50 * (rng() % 8), n_features, informative, noise, rng());
        SvmHyperparams params;
        params.seed = rng();
        params.epochs = trial % 3 == 0 ? 1 + rng() % 5 : params.epochs;
        params.regularization_strength = trial % 4 == 1 ? 1e-6 : params.regularization_strength;
        const auto model = train_linear_svm(d, params);
        const LinearModel zero{std::vector<double>(n_features, 0.0), 0.0};
        CHECK(svm_objective(model, d, params.regularization_strength) <=
              svm_objective(zero, d, params.regularization_strength));
    }
}

TEST_CASE("linear SVM rejects invalid training input")
{
    CHECK_THROWS_AS(train_linear_svm(separable_toy().select_rows(std::vector<std::size_t>{0, 2, 4}), {}), DataError);

    Dataset bad = make({{1.0, std::numeric_limits<double>::quiet_NaN()}, {0.0, 0.0}}, {1, 0});
    CHECK_THROWS_AS(train_linear_svm(bad, {}), DataError);

    SvmHyperparams zero_epochs;
    zero_epochs.epochs = 0;
    CHECK_THROWS_AS(train_linear_svm(separable_toy(), zero_epochs), ConfigError);
    SvmHyperparams no_reg;
    no_reg.regularization_strength = 0.0;
    CHECK_THROWS_AS(train_linear_svm(separable_toy(), no_reg), ConfigError);
}

TEST_CASE("predict uses sign with ties going positive")
{
    const LinearModel m{{1.0, 0.0}, -0.5};
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{0.0, 1.0};
    const std::vector<double> tie{0.5, 3.0};
    CHECK(predict(m, a) == 1);
    CHECK(predict(m, b) == 0);
    CHECK(predict(m, tie) == 1);
    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(predict(m, wrong), DataError);
}

TEST_CASE("centroid classifier geometry")
{
    SUBCASE("means [0,0] and [2,0]")
    {
        const Dataset d = make({{0, 0}, {0, 0}, {2, 0}, {2, 0}}, {0, 0, 1, 1});
        const auto m = train_centroid(d);
        CHECK(m.weights == std::vector<double>{2.0, 0.0});
        CHECK(m.bias == -2.0);
        const std::vector<double> p{1.5, 0.0};
        CHECK(predict(m, p) == 1);
    }
    SUBCASE("mirrored classes give zero bias")
    {
        const Dataset d = make({{1, 2}, {3, -1}, {-1, -2}, {-3, 1}}, {1, 1, 0, 0});
        CHECK(train_centroid(d).bias == 0.0);
    }
    SUBCASE("single class")
    {
        const Dataset d = separable_toy();
        const std::vector<std::size_t> pos{0, 2};
        CHECK_THROWS_AS(train_centroid(d.select_rows(pos)), DataError);
    }
}

TEST_CASE("centroid predictions equal a direct distance comparison")
{
    Rng rng(50);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    for (int i = 0; i < 50; ++i) {
        const Label y = i < 25 ? 1 : 0;
        rows.push_back({gauss(rng) + y, gauss(rng), gauss(rng) - 0.5 * y});
        labels.push_back(y);
    }
    const Dataset d = make(rows, labels);
    const auto model = train_centroid(d);

    std::vector<double> mu0(3, 0.0);
    std::vector<double> mu1(3, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            (labels[i] == 1 ? mu1 : mu0)[k] += rows[i][k] / 25.0;
        }
    }
    for (int probe = 0; probe < 200; ++probe) {
        const std::vector<double> x{3 * gauss(rng), 3 * gauss(rng), 3 * gauss(rng)};
        double d0 = 0.0;
        double d1 = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            d0 += (x[k] - mu0[k]) * (x[k] - mu0[k]);
            d1 += (x[k] - mu1[k]) * (x[k] - mu1[k]);
        }
        if (std::abs(d0 - d1) < 1e-9) {
            continue;
        }
        CHECK(predict(model, x) == (d1 < d0 ? 1 : 0));
    }
}

TEST_CASE("centroid ignores an all-zero column")
{
    const Dataset d = make({{1, 0, 2}, {0, 0, 1}, {2, 0, 0}, {1, 0, -1}, {3, 0, 1}}, {1, 0, 1, 0, 1});
    const Dataset without = project(d, FeatureMask::from_string("101"));
    const auto with_model = train_centroid(d);
    const auto without_model = train_centroid(without);
    CHECK(predict_all(with_model, d) == predict_all(without_model, without));
}

TEST_CASE("evaluate_subset")
{
    const std::vector<std::size_t> informative{0, 1, 2};

    SUBCASE("informative mask on noiseless data scores 1.0")
    {
        const Dataset d = generate_synthetic(400, 12, informative, 0.0, 1);
        FitnessProtocol protocol;
        protocol.evaluator = EvaluatorKind::centroid;
        CHECK(evaluate_subset(FeatureMask::from_indices(12, informative), d, protocol) == 1.0);
        protocol.evaluator = EvaluatorKind::svm;
        CHECK(evaluate_subset(FeatureMask::from_indices(12, informative), d, protocol) == 1.0);
    }
    SUBCASE("pure-noise mask scores near the majority rate")
    {
        const Dataset d = generate_synthetic(600, 12, informative, 0.0, 4);
        FitnessProtocol protocol;
        protocol.evaluator = EvaluatorKind::centroid;
        const auto validation = stratified_split(d, protocol.split).test;
        const double majority = static_cast<double>(std::max(validation.positives(), validation.negatives())) /
                                static_cast<double>(validation.n_samples());
        const std::vector<std::size_t> noise{5, 8, 9, 11};
        const double f = evaluate_subset(FeatureMask::from_indices(12, noise), d, protocol);
        CHECK(std::abs(f - majority) <= 0.1);
    }
    SUBCASE("separable toy set scores 1.0 with both evaluators")
    {
        const Dataset d = separable_toy(20);
        for (auto kind : {EvaluatorKind::svm, EvaluatorKind::centroid}) {
            FitnessProtocol protocol;
            protocol.evaluator = kind;
            CHECK(evaluate_subset(FeatureMask(2, true), d, protocol) == 1.0);
        }
    }
    SUBCASE("pure function of its inputs")
    {
        const Dataset d = generate_synthetic(300, 8, informative, 0.1, 9);
        const FitnessProtocol protocol;
        const auto mask = FeatureMask::from_string("11010010");
        CHECK(evaluate_subset(mask, d, protocol) == evaluate_subset(mask, d, protocol));
        SubsetEvaluator cached(d, protocol);
        CHECK(cached(mask) == evaluate_subset(mask, d, protocol));
    }
    SUBCASE("empty mask")
    {
        const Dataset d = separable_toy();
        CHECK_THROWS_AS(evaluate_subset(FeatureMask(2), d, FitnessProtocol{}), DataError);
    }
}

TEST_CASE("SubsetEvaluator cache is safe under concurrent insert-or-get")
{
    const std::vector<std::size_t> informative{0, 1, 2};
    const Dataset d = generate_synthetic(300, 10, informative, 0.1, 12);
    FitnessProtocol protocol;
    protocol.evaluator = EvaluatorKind::centroid;

    std::vector<FeatureMask> masks;
    for (std::uint32_t bits = 1; bits < 200; ++bits) {
        FeatureMask m(10);
        for (std::size_t i = 0; i < 10; ++i) {
            if (bits >> i & 1U) {
                m.set(i);
            }
        }
        masks.push_back(m);
    }
    SubsetEvaluator reference(d, protocol);
    std::vector<double> expected;
    for (const auto& m : masks) {
        expected.push_back(reference(m));
    }

    SubsetEvaluator shared(d, protocol);
    std::vector<std::vector<double>> seen(4, std::vector<double>(masks.size()));
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t k = 0; k < masks.size(); ++k) {
                const std::size_t i = (k * (w + 1)) % masks.size();
                seen[w][i] = shared(masks[i]);
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    CHECK(shared.cache_size() == masks.size());
    for (const auto& s : seen) {
        CHECK(s == expected);
    }
}
