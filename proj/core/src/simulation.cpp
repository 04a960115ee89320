#include "simcov/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <tuple>

#include <Eigen/Cholesky>

#include "simcov/error.hpp"
#include "simcov/random.hpp"
#include "simcov/similarity.hpp"

namespace simcov {

namespace {

Eigen::MatrixXd block_matrix(std::size_t n, std::size_t block, const BlockParameters& p) {
    Eigen::MatrixXd m{Eigen::Index(n), Eigen::Index(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = 1.0;
            if (i != j) {
                const bool first_i = i < block;
                const bool first_j = j < block;
                v = first_i && first_j ? p.rho1 : (!first_i && !first_j ? p.rho3 : p.rho2);
            }
            m(Eigen::Index(i), Eigen::Index(j)) = v;
        }
    }
    return m;
}

std::size_t regime_index(const ScenarioSpec& spec, std::size_t t) {
    return (t / spec.regime_length) % spec.regimes.size();
}

std::string asset_label(std::size_t i, std::size_t n) {
    const std::size_t width = std::to_string(n).size();
    std::string digits = std::to_string(i + 1);
    return "A" + std::string(width - digits.size(), '0') + digits;
}

class Accumulator {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double stddev() const { return n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1)) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace

ScenarioSpec ScenarioSpec::preset(int number) {
    ScenarioSpec spec;
    switch (number) {
        case 1: spec.kind = ScenarioKind::equicorrelation; break;
        case 2: spec.kind = ScenarioKind::regime_switching; break;
        case 3: spec.kind = ScenarioKind::sinusoidal; break;
        default: throw Error(ErrorCode::invalid_parameter, "unknown scenario " + std::to_string(number));
    }
    return spec;
}

void ScenarioSpec::validate() const {
    if (n_assets < 2) throw Error(ErrorCode::construction_error, "scenario needs at least 2 assets");
    if (horizon < 1) throw Error(ErrorCode::construction_error, "scenario horizon must be positive");
    if (!volatilities.empty()) {
        if (volatilities.size() != n_assets) {
            throw Error(ErrorCode::construction_error, "one volatility per asset required");
        }
        for (double v : volatilities) {
            if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::construction_error, "volatility must be positive");
        }
    }

    std::vector<std::size_t> probe_days;
    switch (kind) {
        case ScenarioKind::equicorrelation: probe_days = {0}; break;
        case ScenarioKind::regime_switching:
            if (regimes.empty() || regime_length == 0) {
                throw Error(ErrorCode::construction_error, "regime switching needs regimes and a positive length");
            }
            if (!regime_volatility.empty() && regime_volatility.size() != regimes.size()) {
                throw Error(ErrorCode::construction_error, "one volatility multiplier pair per regime required");
            }
            for (const auto& [a, b] : regime_volatility) {
                if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::construction_error, "multipliers must be positive");
            }
            for (std::size_t r = 0; r < regimes.size(); ++r) probe_days.push_back(r * regime_length);
            break;
        case ScenarioKind::sinusoidal: {
            if (!(period > 0.0)) throw Error(ErrorCode::construction_error, "period must be positive");
            const auto days = std::min<std::size_t>(horizon, static_cast<std::size_t>(std::ceil(period)));
            for (std::size_t t = 0; t < days; ++t) probe_days.push_back(t);
            break;
        }
    }
    for (std::size_t t : probe_days) {
        const auto p = block_parameters(*this, t);
        for (double v : {p.rho1, p.rho2, p.rho3}) {
            if (!(std::abs(v) <= 1.0)) {
                throw Error(ErrorCode::construction_error, "correlation parameter outside [-1, 1] at day " +
                                                               std::to_string(t));
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(block_matrix(n_assets, block_size(), p));
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::construction_error,
                        "true correlation matrix at day " + std::to_string(t) + " is not positive definite");
        }
    }
}

BlockParameters block_parameters(const ScenarioSpec& spec, std::size_t t) {
    if (t >= spec.horizon) {
        throw Error(ErrorCode::invalid_input,
                    "day " + std::to_string(t) + " outside horizon " + std::to_string(spec.horizon));
    }
    switch (spec.kind) {
        case ScenarioKind::equicorrelation: return {spec.rho, spec.rho, spec.rho};
        case ScenarioKind::regime_switching: {
            const auto& [r1, r3] = spec.regimes[regime_index(spec, t)];
            return {r1, spec.cross_rho, r3};
        }
        case ScenarioKind::sinusoidal: {
            const double two_pi = 2.0 * std::numbers::pi;
            const double td = static_cast<double>(t);
            return {spec.offset + spec.amplitude * std::sin(td / spec.period * two_pi), spec.cross_rho,
                    spec.offset + spec.amplitude * std::sin((td - spec.phase_shift) / spec.period * two_pi)};
        }
    }
    return {};
}

CorrelationMatrix true_correlation(const ScenarioSpec& spec, std::size_t t) {
    return CorrelationMatrix(SymMatrix::from_dense(block_matrix(spec.n_assets, spec.block_size(),
                                                                block_parameters(spec, t))));
}

ReturnPanel simulate_returns(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t n = spec.n_assets;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXd values{Eigen::Index(spec.horizon), Eigen::Index(n)};
    Eigen::VectorXd z{Eigen::Index(n)};
    Eigen::MatrixXd factor;
    std::optional<BlockParameters> current;
    for (std::size_t t = 0; t < spec.horizon; ++t) {
        const auto p = block_parameters(spec, t);
        if (!current || !(*current == p)) {
            Eigen::LLT<Eigen::MatrixXd> llt(block_matrix(n, spec.block_size(), p));
            if (llt.info() != Eigen::Success) {
                throw Error(ErrorCode::construction_error, "true correlation at day " + std::to_string(t) +
                                                               " has no Cholesky factor");
            }
            factor = llt.matrixL();
            current = p;
        }
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
        Eigen::VectorXd x = factor.triangularView<Eigen::Lower>() * z;
        if (!spec.volatilities.empty()) {
            for (std::size_t i = 0; i < n; ++i) x(Eigen::Index(i)) *= spec.volatilities[i];
        }
        if (spec.kind == ScenarioKind::regime_switching && !spec.regime_volatility.empty()) {
            const auto& [m1, m3] = spec.regime_volatility[regime_index(spec, t)];
            for (std::size_t i = 0; i < n; ++i) x(Eigen::Index(i)) *= i < spec.block_size() ? m1 : m3;
        }
        values.row(Eigen::Index(t)) = x.transpose();
    }

    std::vector<std::int64_t> times(spec.horizon);
    for (std::size_t t = 0; t < spec.horizon; ++t) times[t] = std::int64_t(t);
    std::vector<std::string> assets;
    for (std::size_t i = 0; i < n; ++i) assets.push_back(asset_label(i, n));
    return ReturnPanel(std::move(times), std::move(assets), std::move(values));
}

Eigen::MatrixXd theoretical_similarity_matrix(const ScenarioSpec& spec, std::size_t up_to) {
    if (up_to > spec.horizon) {
        throw Error(ErrorCode::invalid_input, "up_to exceeds the scenario horizon");
    }
    // Days sharing parameters share a matrix; compute each distinct pair once.
    std::vector<BlockParameters> distinct;
    std::vector<std::size_t> key(up_to);
    for (std::size_t t = 0; t < up_to; ++t) {
        const auto p = block_parameters(spec, t);
        auto it = std::find(distinct.begin(), distinct.end(), p);
        if (it == distinct.end()) {
            distinct.push_back(p);
            it = distinct.end() - 1;
        }
        key[t] = std::size_t(it - distinct.begin());
    }
    std::vector<CorrelationMatrix> matrices;
    for (const auto& p : distinct) {
        matrices.emplace_back(SymMatrix::from_dense(block_matrix(spec.n_assets, spec.block_size(), p)));
    }
    Eigen::MatrixXd pair{Eigen::Index(distinct.size()), Eigen::Index(distinct.size())};
    for (std::size_t a = 0; a < distinct.size(); ++a) {
        pair(Eigen::Index(a), Eigen::Index(a)) = 0.0;
        for (std::size_t b = a + 1; b < distinct.size(); ++b) {
            const double z = similarity(matrices[a], matrices[b]);
            pair(Eigen::Index(a), Eigen::Index(b)) = z;
            pair(Eigen::Index(b), Eigen::Index(a)) = z;
        }
    }
    Eigen::MatrixXd out{Eigen::Index(up_to), Eigen::Index(up_to)};
    for (std::size_t i = 0; i < up_to; ++i) {
        for (std::size_t j = 0; j < up_to; ++j) {
            out(Eigen::Index(i), Eigen::Index(j)) = pair(Eigen::Index(key[i]), Eigen::Index(key[j]));
        }
    }
    return out;
}

std::string_view to_string(EstimatorKind kind) noexcept {
    switch (kind) {
        case EstimatorKind::similarity: return "similarity";
        case EstimatorKind::unweighted: return "unweighted";
        case EstimatorKind::exponential: return "exponential";
    }
    return "unknown";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept {
    for (auto k : {EstimatorKind::similarity, EstimatorKind::unweighted, EstimatorKind::exponential}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::vector<std::string> parameter_groups(const ScenarioSpec& spec) {
    if (spec.kind == ScenarioKind::equicorrelation) return {"rho"};
    return {"rho1", "rho2", "rho3"};
}

namespace {

std::size_t group_of(const ScenarioSpec& spec, std::size_t i, std::size_t j) {
    if (spec.kind == ScenarioKind::equicorrelation) return 0;
    const bool a = i < spec.block_size();
    const bool b = j < spec.block_size();
    return a && b ? 0 : (!a && !b ? 2 : 1);
}

double group_truth(const ScenarioSpec& spec, std::size_t group, std::size_t t) {
    const auto p = block_parameters(spec, t);
    return group == 0 ? p.rho1 : (group == 1 ? p.rho2 : p.rho3);
}

constexpr EstimatorKind kStudyEstimators[] = {EstimatorKind::similarity, EstimatorKind::unweighted,
                                              EstimatorKind::exponential};

}  // namespace

SimulationReport run_study(const ScenarioSpec& spec, std::span<const std::size_t> eval_days,
                           std::size_t repetitions, const StudyConfig& config, std::uint64_t master_seed) {
    spec.validate();
    if (repetitions < 2) {
        throw Error(ErrorCode::invalid_parameter, "a study needs at least 2 repetitions");
    }
    if (eval_days.empty()) {
        throw Error(ErrorCode::invalid_parameter, "no evaluation days given");
    }
    const std::size_t last_day = *std::max_element(eval_days.begin(), eval_days.end());
    if (last_day > spec.horizon) {
        throw Error(ErrorCode::invalid_parameter, "evaluation day " + std::to_string(last_day) +
                                                      " beyond horizon " + std::to_string(spec.horizon));
    }
    const std::size_t L = config.probe_window;
    for (std::size_t d : eval_days) {
        if (d < 1 || d < config.unweighted_window || d < config.exponential_window || d < 2 * L + 1) {
            throw Error(ErrorCode::invalid_parameter, "evaluation day " + std::to_string(d) +
                                                          " leaves too little history for the estimators");
        }
    }

    SimulationReport report;
    report.spec = spec;
    report.config = config;
    report.master_seed = master_seed;
    report.eval_days.assign(eval_days.begin(), eval_days.end());
    report.repetitions = repetitions;

    const auto groups = parameter_groups(spec);
    const std::size_t n_est = std::size(kStudyEstimators);
    // [day][group][estimator]
    std::vector<Accumulator> stats(eval_days.size() * groups.size() * n_est);
    auto cell = [&](std::size_t d, std::size_t g, std::size_t e) -> std::size_t {
        return (d * groups.size() + g) * n_est + e;
    };

    ScenarioSpec truncated = spec;
    truncated.horizon = last_day;

    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        const std::uint64_t seed = derive_seed(master_seed, rep);
        // Entry-level values of this repetition, merged only when it completes.
        std::vector<std::vector<double>> values(stats.size());
        try {
            const ReturnPanel panel = simulate_returns(truncated, seed);
            const ProbeSeries probes = ProbeSeries::build(panel, L, config.flavor, false);
            for (std::size_t d = 0; d < eval_days.size(); ++d) {
                const std::size_t t0 = eval_days[d] - 1;
                std::size_t horizon = t0 - probes.first_time();
                if (config.history) horizon = std::min(horizon, *config.history);
                const auto profile = similarity_profile(probes, t0, horizon, probes.dim());
                auto weights = weight_scheme(profile);
                weights = restrict_top_s(weights, std::min(config.top_s, weights.size()));

                const CorrelationMatrix estimates[] = {
                    weighted_correlation(probes, weights),
                    pearson_correlation(panel, RowRange::ending_at(t0, config.unweighted_window)),
                    exponential_correlation(panel, t0, config.exponential_window, config.lambda),
                };
                for (std::size_t e = 0; e < n_est; ++e) {
                    for (std::size_t i = 0; i < spec.n_assets; ++i) {
                        for (std::size_t j = i + 1; j < spec.n_assets; ++j) {
                            values[cell(d, group_of(spec, i, j), e)].push_back(estimates[e](i, j));
                        }
                    }
                }
            }
        } catch (const Error& err) {
            report.diagnostics.push_back("repetition " + std::to_string(rep) + " (seed " + std::to_string(seed) +
                                         "): " + err.what());
            continue;
        }
        ++report.completed;
        for (std::size_t d = 0; d < eval_days.size(); ++d) {
            for (std::size_t g = 0; g < groups.size(); ++g) {
                for (std::size_t e = 0; e < n_est; ++e) {
                    const auto& v = values[cell(d, g, e)];
                    if (v.empty()) continue;
                    double sum = 0.0;
                    for (double x : v) {
                        stats[cell(d, g, e)].add(x);
                        sum += x;
                    }
                    report.raw.push_back({rep, seed, eval_days[d], groups[g], kStudyEstimators[e],
                                          sum / static_cast<double>(v.size())});
                }
            }
        }
    }

    for (std::size_t d = 0; d < eval_days.size(); ++d) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            for (std::size_t e = 0; e < n_est; ++e) {
                const auto& acc = stats[cell(d, g, e)];
                report.rows.push_back({eval_days[d], groups[g], group_truth(spec, g, eval_days[d] - 1),
                                       kStudyEstimators[e], acc.mean(), acc.stddev(), acc.count()});
            }
        }
    }
    return report;
}

}  // namespace simcov
