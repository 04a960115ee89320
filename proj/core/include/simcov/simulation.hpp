#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "simcov/estimators.hpp"
#include "simcov/matrix.hpp"
#include "simcov/panel.hpp"

namespace simcov {

enum class ScenarioKind { equicorrelation, regime_switching, sinusoidal };

/// Within-block-1, cross-block and within-block-2 correlation of a two-block market.
struct BlockParameters {
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;

    friend bool operator==(const BlockParameters&, const BlockParameters&) = default;
};

/// Normally distributed daily returns with a deterministic correlation path.
/// Assets [0, n/2) form block 1, the rest block 2. Days are rows 0..horizon-1.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::equicorrelation;
    std::size_t n_assets = 16;
    std::size_t horizon = 5000;

    // equicorrelation
    double rho = 0.7;

    // regime switching: (rho1, rho3) per regime, cycled every regime_length days
    std::vector<std::pair<double, double>> regimes{{0.7, 0.3}, {0.5, 0.5}, {0.3, 0.7}};
    std::size_t regime_length = 100;
    double cross_rho = 0.2;

    // sinusoidal: rho1(t) = offset + amplitude sin(2 pi t / period),
    //             rho3(t) = offset + amplitude sin(2 pi (t - phase_shift) / period)
    double offset = 0.4;
    double amplitude = 0.3;
    double period = 600.0;
    double phase_shift = 300.0;

    // Optional per-asset daily volatilities (default: unit variance) and
    // per-regime (block 1, block 2) volatility multipliers for regime switching.
    std::vector<double> volatilities;
    std::vector<std::pair<double, double>> regime_volatility;

    /// Preset scenarios 1, 2 and 3.
    static ScenarioSpec preset(int number);

    std::size_t block_size() const noexcept { return n_assets / 2; }

    /// Throws construction-error unless every distinct true correlation
    /// matrix is positive definite and parameters are well formed.
    void validate() const;
};

BlockParameters block_parameters(const ScenarioSpec& spec, std::size_t t);
CorrelationMatrix true_correlation(const ScenarioSpec& spec, std::size_t t);

/// One zero-mean multivariate normal draw per day; deterministic in `seed`.
ReturnPanel simulate_returns(const ScenarioSpec& spec, std::uint64_t seed);

/// Entry (t1, t2) = similarity of the true correlation matrices at days t1, t2 < up_to.
Eigen::MatrixXd theoretical_similarity_matrix(const ScenarioSpec& spec, std::size_t up_to);

enum class EstimatorKind { similarity, unweighted, exponential };

std::string_view to_string(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept;

struct StudyConfig {
    std::size_t probe_window = 50;
    std::size_t top_s = 300;
    /// Similarity horizon T; empty means all history with probes.
    std::optional<std::size_t> history;
    std::size_t unweighted_window = 300;
    double lambda = 0.94;
    std::size_t exponential_window = 300;
    CorrelationFlavor flavor = CorrelationFlavor::pearson;
};

/// Pooled statistics for one (eval day, parameter group, estimator) cell.
struct GroupSummary {
    std::size_t eval_day = 0;
    std::string group;
    double true_value = 0.0;
    EstimatorKind estimator = EstimatorKind::similarity;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t samples = 0;
};

/// Per-repetition mean of one parameter group's estimated entries.
struct RepetitionOutcome {
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::size_t eval_day = 0;
    std::string group;
    EstimatorKind estimator = EstimatorKind::similarity;
    double mean = 0.0;
};

struct SimulationReport {
    ScenarioSpec spec;
    StudyConfig config;
    std::uint64_t master_seed = 0;
    std::vector<std::size_t> eval_days;
    std::size_t repetitions = 0;
    std::size_t completed = 0;
    std::vector<GroupSummary> rows;
    std::vector<RepetitionOutcome> raw;
    std::vector<std::string> diagnostics;
};

/// Parameter groups of the spec, in table order: {"rho"} for equicorrelation,
/// {"rho1", "rho2", "rho3"} otherwise.
std::vector<std::string> parameter_groups(const ScenarioSpec& spec);

/// Monte Carlo study. Estimates "at day D" use rows [0, D - 1]; the true
/// value label is the parameter at day D - 1. Statistics pool every matrix
/// entry of a group over all completed repetitions.
SimulationReport run_study(const ScenarioSpec& spec, std::span<const std::size_t> eval_days,
                           std::size_t repetitions, const StudyConfig& config, std::uint64_t master_seed);

}  // namespace simcov
