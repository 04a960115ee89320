#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "simcov/backtest.hpp"
#include "simcov/error.hpp"
#include "simcov/estimators.hpp"
#include "support.hpp"

using namespace simcov;

namespace {

BacktestConfig small_config() {
    BacktestConfig c;
    c.unweighted_window = 40;
    c.exponential_window = 40;
    c.probe_window = 10;
    c.top_s = 30;
    c.mu_window = 14;
    c.horizons = {5, 10};
    c.constellations = 3;
    c.constellation_size = 4;
    c.estimators = {EstimatorKind::unweighted, EstimatorKind::similarity, EstimatorKind::exponential};
    c.rebalance_step = 7;
    return c;
}

}  // namespace

TEST(Constellations, SortedDistinctAndSeeded) {
    const auto a = draw_constellations(30, 10, 12, 5);
    EXPECT_EQ(a, draw_constellations(30, 10, 12, 5));
    EXPECT_NE(a, draw_constellations(30, 10, 12, 6));
    for (const auto& c : a) {
        ASSERT_EQ(c.size(), 12u);
        for (std::size_t k = 1; k < c.size(); ++k) EXPECT_LT(c[k - 1], c[k]);
        EXPECT_LT(c.back(), 30u);
    }
    EXPECT_THROW(draw_constellations(5, 1, 6, 0), Error);
}

TEST(RebalanceRows, RollingAndDisjoint) {
    auto c = small_config();
    EXPECT_EQ(earliest_rebalance_row(c), 39u);
    c.estimators = {EstimatorKind::similarity};
    EXPECT_EQ(earliest_rebalance_row(c), 20u);
    c = small_config();
    c.rebalance_step = 1;
    c.first_rebalance = 40;
    const auto rolling = rebalance_rows(60, c, 10);
    ASSERT_EQ(rolling.size(), 10u);
    EXPECT_EQ(rolling.back(), 49u);
    c.mode = EvaluationMode::disjoint;
    EXPECT_EQ(rebalance_rows(60, c, 5), (std::vector<std::size_t>{40, 45, 50}));
    c.first_rebalance = 10;
    EXPECT_THROW(rebalance_rows(60, c, 5), Error);
}

TEST(HoldingReturns, FixedWeights) {
    Eigen::MatrixXd v{{0, 0, 0}, {0.01, 0.02, -0.01}, {0.03, -0.01, 0.0}, {0.0, 0.05, 0.02}};
    const auto p = support::panel_from(v);
    const std::size_t cols[] = {0, 2};
    const auto r = holding_returns(p, cols, (Eigen::VectorXd(2) << 0.25, 0.75).finished(), 0, 3);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], 0.25 * 0.01 + 0.75 * -0.01, 1e-17);
    EXPECT_NEAR(r[1], 0.25 * 0.03, 1e-17);
    EXPECT_NEAR(r[2], 0.75 * 0.02, 1e-17);
    EXPECT_THROW(holding_returns(p, cols, Eigen::VectorXd::Ones(2), 1, 3), Error);
}

TEST(Backtest, TwoAssetHandWalkthrough) {
    // One rebalance date, two assets, unweighted estimator on a 3-row window.
    Eigen::MatrixXd v{{0.01, 0.02}, {-0.02, 0.01}, {0.015, -0.005}, {0.01, 0.02}, {-0.01, 0.03}};
    const auto p = support::panel_from(v);
    BacktestConfig c;
    c.strategies = {Strategy::mvp, Strategy::naive};
    c.estimators = {EstimatorKind::unweighted};
    c.unweighted_window = 3;
    c.mu_window = 2;
    c.horizons = {2};
    c.constellations = 1;
    c.constellation_size = 2;
    const auto report = run_backtest(p, c, 1);
    ASSERT_EQ(report.entries.size(), 2u);
    const auto& mvp = report.entries[0];
    EXPECT_EQ(mvp.row, 2u);

    // sample covariance of rows 0..2
    const double m1 = (0.01 - 0.02 + 0.015) / 3, m2 = (0.02 + 0.01 - 0.005) / 3;
    const double s11 = (std::pow(0.01 - m1, 2) + std::pow(-0.02 - m1, 2) + std::pow(0.015 - m1, 2)) / 2;
    const double s22 = (std::pow(0.02 - m2, 2) + std::pow(0.01 - m2, 2) + std::pow(-0.005 - m2, 2)) / 2;
    const double s12 = ((0.01 - m1) * (0.02 - m2) + (-0.02 - m1) * (0.01 - m2) + (0.015 - m1) * (-0.005 - m2)) / 2;
    const double w1 = (s22 - s12) / (s11 + s22 - 2 * s12), w2 = 1 - w1;
    const double d1 = w1 * 0.01 + w2 * 0.02, d2 = w1 * -0.01 + w2 * 0.03;
    EXPECT_NEAR(mvp.outcomes[0].weights(0), w1, 1e-12);
    EXPECT_NEAR(mvp.realized_volatility, d1 * d1 + d2 * d2, 1e-15);
    EXPECT_NEAR(mvp.realized_return, (1 + d1) * (1 + d2) - 1, 1e-15);

    const auto& naive = report.entries[1];
    EXPECT_NEAR(naive.realized_volatility, 0.015 * 0.015 + 0.01 * 0.01, 1e-17);
}

TEST(Backtest, NaiveIsEstimatorIndependentAndRunIsDeterministic) {
    std::mt19937_64 rng(4);
    const auto p = support::random_panel(120, 8, rng);
    const auto c = small_config();
    const auto a = run_backtest(p, c, 11);
    const auto b = run_backtest(p, c, 11);
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t k = 0; k < a.entries.size(); ++k) {
        EXPECT_EQ(a.entries[k].realized_volatility, b.entries[k].realized_volatility);
        EXPECT_EQ(a.entries[k].realized_return, b.entries[k].realized_return);
        for (std::size_t o = 0; o < a.entries[k].outcomes.size(); ++o) {
            EXPECT_EQ(a.entries[k].outcomes[o].weights, b.entries[k].outcomes[o].weights);
            EXPECT_NEAR(a.entries[k].outcomes[o].weights.sum(), 1.0, 1e-10);
            EXPECT_GE(a.entries[k].outcomes[o].realized_volatility, 0.0);
        }
    }
    EXPECT_TRUE(a.diagnostics.empty());
    for (std::size_t h : {5u, 10u}) {
        const auto* u = a.find(h, Strategy::naive, EstimatorKind::unweighted);
        const auto* s = a.find(h, Strategy::naive, EstimatorKind::similarity);
        ASSERT_TRUE(u && s);
        EXPECT_EQ(u->realized_volatility, s->realized_volatility);
        EXPECT_EQ(u->dates, s->dates);
        EXPECT_EQ(u->dates, rebalance_rows(p.rows(), c, h).size());
    }
}

TEST(Backtest, SolverFailureBecomesDiagnostic) {
    // two identical columns make every covariance singular; without a ridge
    // the failure must surface, with the retry it must be flagged
    std::mt19937_64 rng(5);
    Eigen::MatrixXd v = support::gaussian(80, 3, rng) * 0.01;
    v.col(2) = v.col(1);
    const auto p = support::panel_from(v);
    auto c = small_config();
    c.constellation_size = 3;
    c.constellations = 1;
    c.estimators = {EstimatorKind::unweighted};
    c.strategies = {Strategy::mvp};
    const auto r = run_backtest(p, c, 1);
    EXPECT_GT(r.ridge_retries + r.diagnostics.size(), 0u);
}

TEST(Backtest, FailuresAreRecordedNotSilent) {
    // a flat market: every covariance estimate is zero, even after the ridge
    const auto p = support::panel_from(Eigen::MatrixXd::Constant(80, 3, 0.001));
    auto c = small_config();
    c.constellation_size = 3;
    c.estimators = {EstimatorKind::unweighted};
    const auto r = run_backtest(p, c, 1);
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_NE(r.diagnostics.front().message.find("singular"), std::string::npos);
    // naive does not need an estimate
    EXPECT_NE(r.find(5, Strategy::naive, EstimatorKind::unweighted), nullptr);
    EXPECT_EQ(r.find(5, Strategy::mvp, EstimatorKind::unweighted), nullptr);

    // correlation probes cover every date, so a flat column fails the whole run
    std::mt19937_64 rng(6);
    Eigen::MatrixXd v = support::gaussian(80, 3, rng) * 0.01;
    v.col(1).setConstant(0.001);
    c.estimators = {EstimatorKind::similarity};
    try {
        run_backtest(support::panel_from(v), c, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate_column);
        EXPECT_NE(std::string(e.what()).find("X1"), std::string::npos);
    }
}

TEST(BacktestConfig, Validation) {
    BacktestConfig c;
    c.horizons = {0};
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.mu_window = 1;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.lambda = 1.0;
    EXPECT_THROW(c.validate(), Error);
    EXPECT_NO_THROW(BacktestConfig{}.validate());
}
