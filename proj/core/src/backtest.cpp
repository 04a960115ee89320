#include "simcov/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "simcov/error.hpp"
#include "simcov/random.hpp"
#include "simcov/similarity.hpp"

namespace simcov {

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::mvp: return "mvp";
        case Strategy::trp: return "trp";
        case Strategy::naive: return "naive";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    for (auto s : {Strategy::mvp, Strategy::trp, Strategy::naive}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view to_string(EvaluationMode m) noexcept {
    return m == EvaluationMode::rolling ? "rolling" : "disjoint";
}

std::optional<EvaluationMode> parse_mode(std::string_view name) noexcept {
    if (name == "rolling") return EvaluationMode::rolling;
    if (name == "disjoint") return EvaluationMode::disjoint;
    return std::nullopt;
}

void BacktestConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_parameter, msg); };
    if (strategies.empty()) fail("no strategies configured");
    if (estimators.empty()) fail("no estimators configured");
    if (horizons.empty()) fail("no horizons configured");
    for (auto h : horizons) {
        if (h == 0) fail("horizons must be positive");
    }
    if (mu_window < 2) fail("mu_window must be at least 2");
    if (probe_window < 2) fail("probe_window must be at least 2");
    if (top_s < 1) fail("top_s must be at least 1");
    if (unweighted_window < 2) fail("unweighted window must be at least 2");
    if (exponential_window < 2) fail("exponential window must be at least 2");
    if (!(lambda > 0.0 && lambda < 1.0)) fail("lambda must lie in (0, 1)");
    if (constellations < 1 || constellation_size < 1) fail("constellations need a positive count and size");
    if (rebalance_step < 1) fail("rebalance_step must be positive");
    if (!std::isfinite(target_margin)) fail("target_margin must be finite");
    if (first_rebalance && last_rebalance && *first_rebalance > *last_rebalance) {
        fail("first_rebalance after last_rebalance");
    }
}

const BacktestSummary* BacktestReport::find(std::size_t horizon, Strategy s, EstimatorKind e) const {
    for (const auto& row : summary) {
        if (row.horizon == horizon && row.strategy == s && row.estimator == e) return &row;
    }
    return nullptr;
}

std::vector<std::vector<std::size_t>> draw_constellations(std::size_t asset_count, std::size_t count,
                                                          std::size_t size, std::uint64_t seed) {
    if (size > asset_count || size == 0) {
        throw Error(ErrorCode::invalid_parameter, "cannot draw " + std::to_string(size) + " of " +
                                                      std::to_string(asset_count) + " assets");
    }
    std::mt19937_64 rng(derive_seed(seed, 0xc0));
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> pool(asset_count);
    for (std::size_t c = 0; c < count; ++c) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t k = 0; k < size; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, asset_count - 1);
            std::swap(pool[k], pool[pick(rng)]);
        }
        std::vector<std::size_t> draw(pool.begin(), pool.begin() + std::ptrdiff_t(size));
        std::sort(draw.begin(), draw.end());
        out.push_back(std::move(draw));
    }
    return out;
}

namespace {

bool uses(const std::vector<EstimatorKind>& v, EstimatorKind e) { return std::find(v.begin(), v.end(), e) != v.end(); }

bool needs_covariance(const BacktestConfig& config) {
    return std::any_of(config.strategies.begin(), config.strategies.end(),
                       [](Strategy s) { return s != Strategy::naive; });
}

}  // namespace

std::size_t earliest_rebalance_row(const BacktestConfig& config) {
    std::size_t row = config.mu_window - 1;
    if (uses(config.estimators, EstimatorKind::unweighted)) row = std::max(row, config.unweighted_window - 1);
    if (uses(config.estimators, EstimatorKind::exponential)) row = std::max(row, config.exponential_window - 1);
    // similarity horizon t - (L - 1) must exceed L
    if (uses(config.estimators, EstimatorKind::similarity)) row = std::max(row, 2 * config.probe_window);
    return row;
}

std::vector<std::size_t> rebalance_rows(std::size_t panel_rows, const BacktestConfig& config, std::size_t horizon) {
    const std::size_t earliest = earliest_rebalance_row(config);
    const std::size_t first = config.first_rebalance.value_or(earliest);
    if (first < earliest) {
        throw Error(ErrorCode::invalid_parameter, "first_rebalance " + std::to_string(first) +
                                                      " precedes the earliest feasible row " +
                                                      std::to_string(earliest));
    }
    std::vector<std::size_t> rows;
    if (panel_rows < horizon + 1) return rows;
    std::size_t last = panel_rows - 1 - horizon;
    if (config.last_rebalance) last = std::min(last, *config.last_rebalance);
    const std::size_t step = config.mode == EvaluationMode::rolling ? config.rebalance_step : horizon;
    for (std::size_t t = first; t <= last; t += step) rows.push_back(t);
    return rows;
}

std::vector<double> holding_returns(const ReturnPanel& panel, std::span<const std::size_t> columns,
                                    const Eigen::VectorXd& weights, std::size_t row, std::size_t horizon) {
    if (row + horizon >= panel.rows()) {
        throw Error(ErrorCode::invalid_window, "holding period beyond the panel");
    }
    if (std::size_t(weights.size()) != columns.size()) {
        throw Error(ErrorCode::invalid_input, "weights do not match the constellation");
    }
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t k = 1; k <= horizon; ++k) {
        double r = 0.0;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            r += weights(Eigen::Index(i)) * panel.values()(Eigen::Index(row + k), Eigen::Index(columns[i]));
        }
        out.push_back(r);
    }
    return out;
}

BacktestReport run_backtest(const ReturnPanel& panel, const BacktestConfig& config, std::uint64_t seed) {
    config.validate();
    if (panel.cols() < config.constellation_size) {
        throw Error(ErrorCode::invalid_parameter, "panel has " + std::to_string(panel.cols()) +
                                                      " assets, constellations need " +
                                                      std::to_string(config.constellation_size));
    }

    BacktestReport report;
    report.seed = seed;
    report.assets = panel.assets();
    report.constellations = draw_constellations(panel.cols(), config.constellations, config.constellation_size, seed);

    std::vector<std::size_t> horizons = config.horizons;
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());

    std::vector<std::vector<std::size_t>> dates;
    std::set<std::size_t> all_dates;
    for (std::size_t h : horizons) {
        dates.push_back(rebalance_rows(panel.rows(), config, h));
        all_dates.insert(dates.back().begin(), dates.back().end());
    }
    if (all_dates.empty()) {
        throw Error(ErrorCode::invalid_parameter, "panel too short for any rebalance date");
    }

    const bool need_cov = needs_covariance(config);
    std::optional<ProbeSeries> probes;
    if (need_cov && uses(config.estimators, EstimatorKind::similarity)) {
        probes.emplace(config.probe_window, config.flavor, true);
        probes->extend_to(panel, *all_dates.rbegin());
    }

    auto estimate = [&](EstimatorKind e, std::size_t t) -> CovarianceMatrix {
        switch (e) {
            case EstimatorKind::unweighted:
                return sample_covariance(panel, RowRange::ending_at(t, config.unweighted_window));
            case EstimatorKind::exponential:
                return exponential_covariance(panel, t, config.exponential_window, config.lambda);
            case EstimatorKind::similarity: {
                std::size_t horizon = t - probes->first_time();
                if (config.history) horizon = std::min(horizon, *config.history);
                const auto profile = similarity_profile(*probes, t, horizon, probes->dim());
                auto w = weight_scheme(profile);
                w = restrict_top_s(w, std::min(config.top_s, w.size()));
                return weighted_covariance(*probes, w);
            }
        }
        throw Error(ErrorCode::invalid_parameter, "unknown estimator");
    };

    auto strategy_rank = [&](Strategy s) {
        return std::size_t(std::find(config.strategies.begin(), config.strategies.end(), s) - config.strategies.begin());
    };
    auto estimator_rank = [&](EstimatorKind e) {
        return std::size_t(std::find(config.estimators.begin(), config.estimators.end(), e) - config.estimators.begin());
    };

    using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;  // horizon, strategy, estimator, row
    std::map<Key, BacktestEntry> entries;
    const SolverOptions solver{.ridge_retry = true};

    for (std::size_t t : all_dates) {
        std::vector<std::size_t> here;  // horizons rebalancing at t
        for (std::size_t k = 0; k < horizons.size(); ++k) {
            if (std::binary_search(dates[k].begin(), dates[k].end(), t)) here.push_back(horizons[k]);
        }
        const std::int64_t time = panel.times()[t];

        for (EstimatorKind e : config.estimators) {
            std::optional<CovarianceMatrix> full;
            if (need_cov) {
                try {
                    full = estimate(e, t);
                } catch (const Error& err) {
                    report.diagnostics.push_back({t, time, std::nullopt, std::nullopt, e, err.what()});
                }
            }
            for (std::size_t c = 0; c < report.constellations.size(); ++c) {
                const auto& cols = report.constellations[c];
                for (Strategy s : config.strategies) {
                    if (s != Strategy::naive && !full) continue;
                    std::optional<PortfolioWeights> fixed;
                    try {
                        if (s == Strategy::naive) {
                            fixed = naive_portfolio(cols.size());
                        } else if (s == Strategy::mvp) {
                            fixed = minimum_variance_portfolio(CovarianceMatrix(full->matrix().submatrix(cols)), solver);
                        }
                    } catch (const Error& err) {
                        report.diagnostics.push_back({t, time, c, s, e, err.what()});
                        continue;
                    }
                    for (std::size_t h : here) {
                        try {
                            PortfolioWeights w;
                            if (fixed) {
                                w = *fixed;
                            } else {
                                const auto block = panel.window(RowRange::ending_at(t, config.mu_window));
                                Eigen::VectorXd mu(Eigen::Index(cols.size()));
                                for (std::size_t i = 0; i < cols.size(); ++i) {
                                    mu(Eigen::Index(i)) = static_cast<double>(h) * block.col(Eigen::Index(cols[i])).mean();
                                }
                                const double target = mu.mean() + config.target_margin;
                                w = target_return_portfolio(CovarianceMatrix(full->matrix().submatrix(cols)), mu,
                                                            target, solver);
                            }
                            const auto daily = holding_returns(panel, cols, w.weights, t, h);
                            double growth = 1.0;
                            for (double r : daily) growth *= 1.0 + r;
                            ConstellationOutcome outcome{c, w.weights, realized_volatility(daily), growth - 1.0,
                                                         w.ridge_applied};
                            if (w.ridge_applied) ++report.ridge_retries;
                            auto& entry = entries[Key{h, strategy_rank(s), estimator_rank(e), t}];
                            entry.row = t;
                            entry.time = time;
                            entry.horizon = h;
                            entry.strategy = s;
                            entry.estimator = e;
                            entry.outcomes.push_back(std::move(outcome));
                        } catch (const Error& err) {
                            report.diagnostics.push_back({t, time, c, s, e, err.what()});
                        }
                    }
                }
            }
        }
    }

    for (auto& [key, entry] : entries) {
        double rv = 0.0;
        double ret = 0.0;
        for (const auto& o : entry.outcomes) {
            rv += o.realized_volatility;
            ret += o.realized_return;
        }
        entry.realized_volatility = rv / static_cast<double>(entry.outcomes.size());
        entry.realized_return = ret / static_cast<double>(entry.outcomes.size());
        report.entries.push_back(std::move(entry));
    }

    for (const auto& entry : report.entries) {
        if (report.summary.empty() || report.summary.back().horizon != entry.horizon ||
            report.summary.back().strategy != entry.strategy || report.summary.back().estimator != entry.estimator) {
            report.summary.push_back({entry.horizon, entry.strategy, entry.estimator, 0.0, 0.0, 0});
        }
        auto& row = report.summary.back();
        row.realized_volatility += entry.realized_volatility;
        row.realized_return += entry.realized_return;
        ++row.dates;
    }
    for (auto& row : report.summary) {
        row.realized_volatility /= static_cast<double>(row.dates);
        row.realized_return /= static_cast<double>(row.dates);
    }
    return report;
}

ScenarioSpec regime_market_spec(std::size_t assets, std::size_t days, std::size_t regime_length,
                                std::uint64_t seed) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::regime_switching;
    spec.n_assets = assets;
    spec.horizon = days;
    spec.regime_length = regime_length;
    std::mt19937_64 rng(derive_seed(seed, 0x7601));
    std::uniform_real_distribution<double> vol(0.01, 0.03);
    spec.volatilities.resize(assets);
    for (auto& v : spec.volatilities) v = vol(rng);
    return spec;
}

}  // namespace simcov
