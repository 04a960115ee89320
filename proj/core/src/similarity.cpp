#include "simcov/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simcov/error.hpp"

namespace simcov {

ProbeSeries::ProbeSeries(std::size_t window_length, CorrelationFlavor flavor, bool with_covariance)
    : window_length_(window_length), flavor_(flavor), with_covariance_(with_covariance) {
    if (window_length_ < 2) {
        throw Error(ErrorCode::invalid_window, "probe window length must be at least 2");
    }
}

ProbeSeries ProbeSeries::build(const ReturnPanel& panel, std::size_t window_length, CorrelationFlavor flavor,
                               bool with_covariance) {
    ProbeSeries series(window_length, flavor, with_covariance);
    if (panel.rows() >= window_length) series.extend_to(panel, panel.rows() - 1);
    return series;
}

ProbeSeries ProbeSeries::from_matrices(std::size_t window_length, std::size_t first_time,
                                       std::vector<CorrelationMatrix> correlation,
                                       std::vector<CovarianceMatrix> covariance) {
    ProbeSeries series(window_length, CorrelationFlavor::pearson, !covariance.empty());
    if (!covariance.empty() && covariance.size() != correlation.size()) {
        throw Error(ErrorCode::invalid_input, "correlation and covariance probe lists differ in length");
    }
    for (std::size_t k = 1; k < correlation.size(); ++k) {
        if (correlation[k].dim() != correlation[0].dim() ||
            (!covariance.empty() && covariance[k].dim() != correlation[0].dim())) {
            throw Error(ErrorCode::invalid_input, "probe matrices differ in dimension");
        }
    }
    series.first_time_ = first_time;
    series.correlation_ = std::move(correlation);
    series.covariance_ = std::move(covariance);
    return series;
}

void ProbeSeries::extend_to(const ReturnPanel& panel, std::size_t last_row) {
    if (last_row >= panel.rows()) {
        throw Error(ErrorCode::invalid_window, "probe row " + std::to_string(last_row) + " beyond panel");
    }
    if (empty()) {
        if (last_row + 1 < window_length_) return;
        first_time_ = window_length_ - 1;
    }
    for (std::size_t t = first_time_ + size(); t <= last_row; ++t) {
        const auto window = RowRange::ending_at(t, window_length_);
        correlation_.push_back(simcov::correlation(panel, window, flavor_));
        if (with_covariance_) covariance_.push_back(sample_covariance(panel, window));
    }
}

const CorrelationMatrix& ProbeSeries::correlation(std::size_t t) const {
    if (!covers(t, t)) {
        throw Error(ErrorCode::invalid_input, "no probe at time " + std::to_string(t));
    }
    return correlation_[t - first_time_];
}

const CovarianceMatrix& ProbeSeries::covariance(std::size_t t) const {
    if (!with_covariance_) {
        throw Error(ErrorCode::invalid_input, "probe series holds no covariance probes");
    }
    if (!covers(t, t)) {
        throw Error(ErrorCode::invalid_input, "no probe at time " + std::to_string(t));
    }
    return covariance_[t - first_time_];
}

double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::invalid_input, "similarity of " + std::to_string(a.dim()) + "x" +
                                                  std::to_string(a.dim()) + " and " + std::to_string(b.dim()) +
                                                  "x" + std::to_string(b.dim()) + " matrices");
    }
    return spectral_norm(a.matrix() - b.matrix());
}

SimilarityProfile similarity_profile(const ProbeSeries& probes, std::size_t t0, std::size_t horizon,
                                     std::size_t asset_count) {
    const std::size_t L = probes.window_length();
    if (horizon <= L) {
        throw Error(ErrorCode::invalid_horizon, "horizon " + std::to_string(horizon) +
                                                    " must exceed the probe window " + std::to_string(L));
    }
    if (asset_count < 2) {
        throw Error(ErrorCode::invalid_parameter, "adapted similarity needs at least 2 assets");
    }
    if (t0 < horizon || !probes.covers(t0 - horizon, t0)) {
        throw Error(ErrorCode::invalid_input, "probes do not cover [t0 - " + std::to_string(horizon) + ", " +
                                                  std::to_string(t0) + "]");
    }

    SimilarityProfile p;
    p.t0 = t0;
    p.horizon = horizon;
    p.window_length = L;
    p.asset_count = asset_count;
    const std::size_t count = horizon + 1;
    p.zeta.resize(count);
    p.zeta_tilde.resize(count);
    p.zeta_star.resize(count);

    const double max_zeta = 2.0 * static_cast<double>(asset_count - 1);
    const auto& reference = probes.correlation(t0);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t t = p.first_time() + k;
        p.zeta[k] = t == t0 ? 0.0 : similarity(probes.correlation(t), reference);
        double adapted = 1.0 - p.zeta[k] / max_zeta;
        if (adapted < 0.0 || adapted > 1.0) {
            ++p.clamp_events;
            adapted = std::clamp(adapted, 0.0, 1.0);
        }
        p.zeta_tilde[k] = adapted;
    }

    // Reliable region: t < t0 - L, i.e. indices [0, horizon - L).
    const std::size_t reliable = horizon - L;
    const double best = *std::max_element(p.zeta_tilde.begin(), p.zeta_tilde.begin() + std::ptrdiff_t(reliable));
    for (std::size_t k = 0; k < count; ++k) p.zeta_star[k] = k < reliable ? p.zeta_tilde[k] : best;
    return p;
}

std::size_t WeightScheme::positive_count() const {
    return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double v) { return v > 0.0; }));
}

WeightScheme weight_scheme(const SimilarityProfile& profile) {
    double total = 0.0;
    for (double v : profile.zeta_star) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::invalid_input, "corrected similarity values must be finite and nonnegative");
        }
        total += v;
    }
    if (total == 0.0) {
        throw Error(ErrorCode::degenerate_similarity, "all corrected similarity values are zero");
    }
    WeightScheme w;
    w.t0 = profile.t0;
    w.first_time = profile.first_time();
    w.weights.reserve(profile.zeta_star.size());
    for (double v : profile.zeta_star) w.weights.push_back(v / total);
    return w;
}

WeightScheme restrict_top_s(const WeightScheme& w, std::size_t s) {
    if (s < 1 || s > w.size()) {
        throw Error(ErrorCode::invalid_parameter,
                    "s = " + std::to_string(s) + " outside [1, " + std::to_string(w.size()) + "]");
    }
    std::vector<double> sorted = w.weights;
    std::nth_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(s - 1), sorted.end(), std::greater<>());
    const double threshold = sorted[s - 1];

    WeightScheme out{w.t0, w.first_time, std::vector<double>(w.size(), 0.0)};
    double total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        out.weights[k] = std::max(w.weights[k] - threshold, 0.0);
        total += out.weights[k];
    }
    if (total == 0.0) {
        throw Error(ErrorCode::degenerate_restriction, "no weight exceeds the s-th largest value");
    }
    for (double& v : out.weights) v /= total;
    return out;
}

namespace {

void require_aligned(const ProbeSeries& probes, const WeightScheme& w) {
    if (w.weights.empty() || w.first_time + w.size() - 1 != w.t0) {
        throw Error(ErrorCode::invalid_input, "weight scheme is not aligned with its time range");
    }
    if (!probes.covers(w.first_time, w.t0)) {
        throw Error(ErrorCode::invalid_input, "weights span [" + std::to_string(w.first_time) + ", " +
                                                  std::to_string(w.t0) + "] beyond the probe series");
    }
}

template <class Get>
SymMatrix weighted_sum(const ProbeSeries& probes, const WeightScheme& w, Get get) {
    SymMatrix sum(probes.dim());
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w.weights[k] == 0.0) continue;
        sum.add_scaled(w.weights[k], get(w.first_time + k));
    }
    return sum;
}

}  // namespace

CorrelationMatrix weighted_correlation(const ProbeSeries& probes, const WeightScheme& w) {
    require_aligned(probes, w);
    return CorrelationMatrix(
        weighted_sum(probes, w, [&](std::size_t t) -> const SymMatrix& { return probes.correlation(t).matrix(); }));
}

CovarianceMatrix weighted_covariance(const ProbeSeries& probes, const WeightScheme& w) {
    require_aligned(probes, w);
    return CovarianceMatrix(
        weighted_sum(probes, w, [&](std::size_t t) -> const SymMatrix& { return probes.covariance(t).matrix(); }));
}

std::vector<double> exponential_weights(std::size_t n, double lambda) {
    if (n < 1) {
        throw Error(ErrorCode::invalid_parameter, "exponential weighting needs n >= 1");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(ErrorCode::invalid_parameter, "decay lambda must lie in (0, 1)");
    }
    const double norm = (1.0 - lambda) / (1.0 - std::pow(lambda, static_cast<double>(n)));
    std::vector<double> w(n);
    double power = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        w[j] = power * norm;
        power *= lambda;
    }
    return w;
}

namespace {

// Weighted mean and second moments of the n rows ending at t0 (row t0 gets w[0]).
Eigen::MatrixXd exponential_moments(const ReturnPanel& panel, std::size_t t0, std::size_t n, double lambda) {
    const auto w = exponential_weights(n, lambda);
    if (n < 2) {
        throw Error(ErrorCode::invalid_window, "exponential estimator needs at least 2 rows");
    }
    const auto block = panel.window(RowRange::ending_at(t0, n));
    const Eigen::Index rows = block.rows();
    Eigen::VectorXd weights(rows);
    for (Eigen::Index i = 0; i < rows; ++i) weights(i) = w[std::size_t(rows - 1 - i)];

    const Eigen::RowVectorXd mean = weights.transpose() * block;
    const Eigen::MatrixXd centered = block.rowwise() - mean;
    return centered.transpose() * weights.asDiagonal() * centered;
}

}  // namespace

CorrelationMatrix exponential_correlation(const ReturnPanel& panel, std::size_t t0, std::size_t n, double lambda) {
    const Eigen::MatrixXd m = exponential_moments(panel, t0, n, lambda);
    const auto block = panel.window(RowRange::ending_at(t0, n));
    const Eigen::Index dim = m.rows();
    Eigen::VectorXd scale(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double noise = 1e-14 * block.col(j).cwiseAbs().maxCoeff();
        if (!(m(j, j) > noise * noise)) {
            throw Error(ErrorCode::degenerate_column,
                        "asset '" + panel.assets()[std::size_t(j)] + "' has zero variance in window");
        }
        scale(j) = 1.0 / std::sqrt(m(j, j));
    }
    SymMatrix out{std::size_t(dim)};
    for (Eigen::Index i = 0; i < dim; ++i) {
        out.set(std::size_t(i), std::size_t(i), 1.0);
        for (Eigen::Index j = i + 1; j < dim; ++j) {
            out.set(std::size_t(i), std::size_t(j), std::clamp(m(i, j) * scale(i) * scale(j), -1.0, 1.0));
        }
    }
    return CorrelationMatrix(std::move(out));
}

CovarianceMatrix exponential_covariance(const ReturnPanel& panel, std::size_t t0, std::size_t n, double lambda) {
    return CovarianceMatrix(SymMatrix::symmetrized(exponential_moments(panel, t0, n, lambda)));
}

}  // namespace simcov
