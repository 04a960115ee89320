#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "simcov/estimators.hpp"
#include "simcov/panel.hpp"
#include "simcov/portfolio.hpp"
#include "simcov/simulation.hpp"

namespace simcov {

enum class Strategy { mvp, trp, naive };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// How rebalance dates are spaced: every `rebalance_step` rows (windows
/// may overlap), or back to back with step equal to the horizon.
enum class EvaluationMode { rolling, disjoint };

std::string_view to_string(EvaluationMode m) noexcept;
std::optional<EvaluationMode> parse_mode(std::string_view name) noexcept;

struct BacktestConfig {
    std::vector<Strategy> strategies{Strategy::mvp, Strategy::trp, Strategy::naive};
    std::vector<EstimatorKind> estimators{EstimatorKind::unweighted, EstimatorKind::similarity};

    // estimators
    std::size_t probe_window = 50;
    std::size_t top_s = 300;
    std::optional<std::size_t> history;
    std::size_t unweighted_window = 300;
    double lambda = 0.94;
    std::size_t exponential_window = 300;
    CorrelationFlavor flavor = CorrelationFlavor::pearson;

    // target-return portfolio
    std::size_t mu_window = 14;
    double target_margin = 0.05;

    // evaluation
    std::vector<std::size_t> horizons{14, 28, 56};
    std::size_t constellations = 10;
    std::size_t constellation_size = 100;
    std::optional<std::size_t> first_rebalance;
    std::optional<std::size_t> last_rebalance;
    std::size_t rebalance_step = 1;
    EvaluationMode mode = EvaluationMode::rolling;

    void validate() const;
};

struct ConstellationOutcome {
    std::size_t constellation = 0;
    Eigen::VectorXd weights;
    double realized_volatility = 0.0;
    double realized_return = 0.0;
    bool ridge_applied = false;
};

/// One rebalance date for one (horizon, strategy, estimator); averages run
/// over the constellations that produced an outcome.
struct BacktestEntry {
    std::size_t row = 0;
    std::int64_t time = 0;
    std::size_t horizon = 0;
    Strategy strategy = Strategy::mvp;
    EstimatorKind estimator = EstimatorKind::unweighted;
    double realized_volatility = 0.0;
    double realized_return = 0.0;
    std::vector<ConstellationOutcome> outcomes;
};

struct BacktestDiagnostic {
    std::size_t row = 0;
    std::int64_t time = 0;
    std::optional<std::size_t> constellation;
    std::optional<Strategy> strategy;
    EstimatorKind estimator = EstimatorKind::unweighted;
    std::string message;
};

struct BacktestSummary {
    std::size_t horizon = 0;
    Strategy strategy = Strategy::mvp;
    EstimatorKind estimator = EstimatorKind::unweighted;
    double realized_volatility = 0.0;
    double realized_return = 0.0;
    std::size_t dates = 0;
};

struct BacktestReport {
    std::uint64_t seed = 0;
    std::vector<std::string> assets;
    std::vector<std::vector<std::size_t>> constellations;
    /// Ordered by (horizon, strategy, estimator, row).
    std::vector<BacktestEntry> entries;
    std::vector<BacktestDiagnostic> diagnostics;
    /// Ordered by (horizon, strategy, estimator).
    std::vector<BacktestSummary> summary;
    std::size_t ridge_retries = 0;

    const BacktestSummary* find(std::size_t horizon, Strategy s, EstimatorKind e) const;
};

/// `count` sorted draws of `size` distinct asset columns, deterministic in seed.
std::vector<std::vector<std::size_t>> draw_constellations(std::size_t asset_count, std::size_t count,
                                                          std::size_t size, std::uint64_t seed);

/// Earliest row at which every configured estimator has enough history.
std::size_t earliest_rebalance_row(const BacktestConfig& config);

/// Rebalance rows for one holding horizon.
std::vector<std::size_t> rebalance_rows(std::size_t panel_rows, const BacktestConfig& config, std::size_t horizon);

/// Daily portfolio returns w'r over rows (row, row + horizon], weights held
/// fixed for the whole holding period.
std::vector<double> holding_returns(const ReturnPanel& panel, std::span<const std::size_t> columns,
                                    const Eigen::VectorXd& weights, std::size_t row, std::size_t horizon);

/// Decisions at the close of each rebalance row use rows <= that row only.
/// Covariance per estimator: unweighted sample covariance on the trailing
/// window; similarity-weighted covariance with weights from full-panel
/// probes; exponential covariance. mu = horizon * trailing mean return,
/// target R = mean(mu) + target_margin. Failures become diagnostics.
BacktestReport run_backtest(const ReturnPanel& panel, const BacktestConfig& config, std::uint64_t seed);

/// Two-block regime-switching market for backtest experiments. Uses the
/// default block regimes and per-asset volatilities drawn from [0.01, 0.03].
ScenarioSpec regime_market_spec(std::size_t assets, std::size_t days, std::size_t regime_length,
                                std::uint64_t seed);

}  // namespace simcov
