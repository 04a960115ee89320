#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "simcov/error.hpp"
#include "simcov/random.hpp"
#include "simcov/similarity.hpp"
#include "simcov/simulation.hpp"
#include "support.hpp"

using namespace simcov;

namespace {

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::invalid_input;
}

}  // namespace

TEST(TrueCorrelation, ScenarioExamples) {
    const auto s1 = ScenarioSpec::preset(1);
    EXPECT_EQ(true_correlation(s1, 123), CorrelationMatrix::equicorrelation(16, 0.7));

    const auto s2 = ScenarioSpec::preset(2);
    EXPECT_EQ(block_parameters(s2, 50), (BlockParameters{0.7, 0.2, 0.3}));
    EXPECT_EQ(block_parameters(s2, 150), (BlockParameters{0.5, 0.2, 0.5}));
    EXPECT_EQ(block_parameters(s2, 250), (BlockParameters{0.3, 0.2, 0.7}));
    const auto c2 = true_correlation(s2, 250);
    EXPECT_EQ(c2(0, 7), 0.3);
    EXPECT_EQ(c2(8, 15), 0.7);
    EXPECT_EQ(c2(3, 12), 0.2);

    const auto s3 = ScenarioSpec::preset(3);
    EXPECT_NEAR(block_parameters(s3, 150).rho1, 0.7, 1e-15);
    EXPECT_NEAR(block_parameters(s3, 150).rho3, 0.4 + 0.3 * std::sin(2 * std::numbers::pi * -150.0 / 600.0), 1e-15);
    EXPECT_EQ(block_parameters(s3, 10).rho2, 0.2);
    EXPECT_EQ(code_of([&] { block_parameters(s3, 5000); }), ErrorCode::invalid_input);
}

TEST(TrueCorrelation, Periodicity) {
    const auto s2 = ScenarioSpec::preset(2);
    const auto s3 = ScenarioSpec::preset(3);
    for (std::size_t t = 0; t < 1200; t += 7) {
        EXPECT_EQ(true_correlation(s2, t), true_correlation(s2, t + 300));
        const auto a = block_parameters(s3, t), b = block_parameters(s3, t + 600);
        EXPECT_NEAR(a.rho1, b.rho1, 1e-14);
        EXPECT_NEAR(a.rho3, b.rho3, 1e-14);
    }
}

TEST(ScenarioSpec, ValidationRejectsNonPsdBlocks) {
    auto spec = ScenarioSpec::preset(2);
    spec.cross_rho = 0.9;
    EXPECT_EQ(code_of([&] { spec.validate(); }), ErrorCode::construction_error);
    auto s1 = ScenarioSpec::preset(1);
    s1.rho = -0.5;  // below -1/(N-1)
    EXPECT_EQ(code_of([&] { s1.validate(); }), ErrorCode::construction_error);
    EXPECT_EQ(code_of([] { ScenarioSpec::preset(4); }), ErrorCode::invalid_parameter);
}

TEST(SimulateReturns, DeterministicAndUnitVariance) {
    auto spec = ScenarioSpec::preset(1);
    spec.horizon = 4000;
    const auto a = simulate_returns(spec, 77);
    EXPECT_EQ(a, simulate_returns(spec, 77));
    EXPECT_FALSE(a == simulate_returns(spec, 78));
    EXPECT_EQ(a.rows(), 4000u);
    EXPECT_EQ(a.assets().front(), "A01");

    const auto cov = sample_covariance(a, {0, 3999});
    const auto corr = pearson_correlation(a, {0, 3999});
    // standard errors: var ~ sqrt(2/n), correlation ~ (1 - rho^2)/sqrt(n)
    const double se_var = std::sqrt(2.0 / 4000.0), se_rho = (1 - 0.49) / std::sqrt(4000.0);
    for (std::size_t i = 0; i < 16; ++i) {
        EXPECT_NEAR(cov(i, i), 1.0, 4 * se_var);
        for (std::size_t j = i + 1; j < 16; ++j) EXPECT_NEAR(corr(i, j), 0.7, 4 * se_rho);
    }
}

TEST(SimulateReturns, MeanPairwiseCorrelationNearRho) {
    auto spec = ScenarioSpec::preset(1);
    spec.horizon = 3000;
    const auto m = mean_pairwise_correlation(simulate_returns(spec, 5), 50);
    double sum = 0, sq = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < m.size(); k += 50, ++n) {
        sum += m[k];
        sq += m[k] * m[k];
    }
    const double mean = sum / double(n);
    const double se = std::sqrt((sq / double(n) - mean * mean) / double(n - 1));
    // Spearman of a Gaussian pair: (6/pi) asin(rho/2)
    EXPECT_NEAR(mean, 6.0 / std::numbers::pi * std::asin(0.35), 3 * se);
}

TEST(TheoreticalSimilarity, Structure) {
    auto s1 = ScenarioSpec::preset(1);
    EXPECT_TRUE(theoretical_similarity_matrix(s1, 50).isZero(0.0));

    auto s2 = ScenarioSpec::preset(2);
    const auto z = theoretical_similarity_matrix(s2, 300);
    EXPECT_EQ(z(10, 90), 0.0);
    // regime 1 against regime 3: block difference 0.4 (J - I) and -0.4 (J - I)
    const auto diff = oracle::sub(support::to_oracle(true_correlation(s2, 10).matrix()),
                                  support::to_oracle(true_correlation(s2, 210).matrix()));
    EXPECT_NEAR(z(10, 210), oracle::spectral_norm(diff), 1e-12);
    EXPECT_NEAR(z(10, 210), 2.8, 1e-12);

    auto s3 = ScenarioSpec::preset(3);
    const auto y = theoretical_similarity_matrix(s3, 120);
    for (Eigen::Index i = 0; i < y.rows(); i += 5) {
        EXPECT_EQ(y(i, i), 0.0);
        for (Eigen::Index j = 0; j < y.cols(); j += 5) {
            EXPECT_EQ(y(i, j), y(j, i));
            EXPECT_GE(y(i, j), 0.0);
            for (Eigen::Index k = 0; k < y.cols(); k += 15) EXPECT_LE(y(i, j), y(i, k) + y(k, j) + 1e-10);
        }
    }
}

TEST(Seeds, CounterSplitIsStable) {
    EXPECT_EQ(derive_seed(42, 0), derive_seed(42, 0));
    EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
    EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
}

TEST(RunStudy, ShapeGroupsAndDeterminism) {
    auto spec = ScenarioSpec::preset(2);
    StudyConfig cfg;
    const std::size_t days[] = {400, 600};
    const auto a = run_study(spec, days, 3, cfg, 9);
    const auto b = run_study(spec, days, 3, cfg, 9);
    ASSERT_EQ(a.rows.size(), 2u * 3u * 3u);
    EXPECT_EQ(a.completed, 3u);
    EXPECT_TRUE(a.diagnostics.empty());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        EXPECT_EQ(a.rows[k].mean, b.rows[k].mean);
        EXPECT_EQ(a.rows[k].stddev, b.rows[k].stddev);
        EXPECT_GE(a.rows[k].stddev, 0.0);
    }
    EXPECT_EQ(a.rows[0].group, "rho1");
    EXPECT_EQ(a.rows[3].group, "rho2");
    EXPECT_EQ(a.rows[0].true_value, 0.7);  // day 400 labelled by row 399
    EXPECT_EQ(a.rows[0].samples, 3u * 28u);
    EXPECT_EQ(a.rows[3].samples, 3u * 64u);
    EXPECT_EQ(a.raw.size(), 3u * 2u * 3u * 3u);
}

TEST(RunStudy, Preconditions) {
    auto spec = ScenarioSpec::preset(1);
    StudyConfig cfg;
    const std::size_t ok[] = {400};
    const std::size_t early[] = {200};
    const std::size_t late[] = {6000};
    EXPECT_EQ(code_of([&] { run_study(spec, ok, 1, cfg, 1); }), ErrorCode::invalid_parameter);
    EXPECT_EQ(code_of([&] { run_study(spec, early, 2, cfg, 1); }), ErrorCode::invalid_parameter);
    EXPECT_EQ(code_of([&] { run_study(spec, late, 2, cfg, 1); }), ErrorCode::invalid_parameter);
}

TEST(RunStudy, ScenarioOneIsUnbiased) {
    auto spec = ScenarioSpec::preset(1);
    const std::size_t days[] = {600};
    const auto r = run_study(spec, days, 30, StudyConfig{}, 2024);
    for (const auto& row : r.rows) {
        EXPECT_NEAR(row.mean, 0.7, 3 * row.stddev / std::sqrt(30.0)) << to_string(row.estimator);
    }
}

TEST(RunStudy, ScenarioTwoSeparatesRegimes) {
    auto spec = ScenarioSpec::preset(2);
    const std::size_t days[] = {1000};
    const auto r = run_study(spec, days, 10, StudyConfig{}, 77);
    auto find = [&](const std::string& g, EstimatorKind e) -> double {
        for (const auto& row : r.rows) {
            if (row.group == g && row.estimator == e) return row.mean;
        }
        return NAN;
    };
    EXPECT_NEAR(find("rho1", EstimatorKind::unweighted), 0.5, 0.04);
    EXPECT_NEAR(find("rho3", EstimatorKind::unweighted), 0.5, 0.04);
    EXPECT_GT(find("rho1", EstimatorKind::similarity), 0.6);
    EXPECT_LT(find("rho3", EstimatorKind::similarity), 0.4);
}
