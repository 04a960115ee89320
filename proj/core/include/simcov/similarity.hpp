#pragma once

#include <cstddef>
#include <vector>

#include "simcov/estimators.hpp"
#include "simcov/matrix.hpp"
#include "simcov/panel.hpp"

namespace simcov {

/// Rolling probe estimates: for each row t in [first_time, last_time], the
/// correlation (and optionally covariance) of rows [t - L + 1, t].
/// Built once by a single writer, then read concurrently.
class ProbeSeries {
public:
    ProbeSeries(std::size_t window_length, CorrelationFlavor flavor, bool with_covariance);

    /// Probes for every row from `window_length - 1` to the last panel row.
    static ProbeSeries build(const ReturnPanel& panel, std::size_t window_length,
                             CorrelationFlavor flavor = CorrelationFlavor::pearson, bool with_covariance = true);

    /// Probe series from explicit matrices; `covariance` may be empty.
    static ProbeSeries from_matrices(std::size_t window_length, std::size_t first_time,
                                     std::vector<CorrelationMatrix> correlation,
                                     std::vector<CovarianceMatrix> covariance = {});

    /// Appends probes up to and including `last_row`.
    void extend_to(const ReturnPanel& panel, std::size_t last_row);

    std::size_t window_length() const noexcept { return window_length_; }
    CorrelationFlavor flavor() const noexcept { return flavor_; }
    bool has_covariance() const noexcept { return with_covariance_; }
    bool empty() const noexcept { return correlation_.empty(); }
    std::size_t size() const noexcept { return correlation_.size(); }
    std::size_t dim() const noexcept { return empty() ? 0 : correlation_.front().dim(); }
    std::size_t first_time() const noexcept { return first_time_; }
    std::size_t last_time() const noexcept { return first_time_ + size() - 1; }
    bool covers(std::size_t first, std::size_t last) const noexcept {
        return !empty() && first >= first_time_ && last <= last_time() && first <= last;
    }

    const CorrelationMatrix& correlation(std::size_t t) const;
    const CovarianceMatrix& covariance(std::size_t t) const;

private:
    std::size_t window_length_;
    CorrelationFlavor flavor_;
    bool with_covariance_;
    std::size_t first_time_ = 0;
    std::vector<CorrelationMatrix> correlation_;
    std::vector<CovarianceMatrix> covariance_;
};

/// Spectral norm of the difference of two correlation matrices.
double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b);

/// Similarity of the probe at t0 to every probe in [t0 - horizon, t0].
/// Index k of each vector refers to time `first_time() + k`.
struct SimilarityProfile {
    std::size_t t0 = 0;
    std::size_t horizon = 0;
    std::size_t window_length = 0;
    std::size_t asset_count = 0;
    std::vector<double> zeta;
    std::vector<double> zeta_tilde;
    std::vector<double> zeta_star;
    /// Number of adapted values that fell outside [0, 1] and were clamped.
    std::size_t clamp_events = 0;

    std::size_t first_time() const noexcept { return t0 - horizon; }
};

/// zeta_tilde = 1 - zeta / (2 (K - 1)); zeta_star replaces the window-overlap
/// region [t0 - L, t0] by the maximum of zeta_tilde over t < t0 - L.
/// Throws invalid-horizon when horizon <= L.
SimilarityProfile similarity_profile(const ProbeSeries& probes, std::size_t t0, std::size_t horizon,
                                     std::size_t asset_count);

/// Normalized nonnegative weights over [first_time, t0].
struct WeightScheme {
    std::size_t t0 = 0;
    std::size_t first_time = 0;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    double at_time(std::size_t t) const { return weights.at(t - first_time); }
    std::size_t positive_count() const;
};

WeightScheme weight_scheme(const SimilarityProfile& profile);

/// Keeps only the surplus over the s-th largest weight, renormalized.
/// Weights equal to the threshold drop to zero.
WeightScheme restrict_top_s(const WeightScheme& w, std::size_t s);

CorrelationMatrix weighted_correlation(const ProbeSeries& probes, const WeightScheme& w);
CovarianceMatrix weighted_covariance(const ProbeSeries& probes, const WeightScheme& w);

/// w_j = lambda^(j-1) (1 - lambda) / (1 - lambda^n); j = 1 is the most recent row.
std::vector<double> exponential_weights(std::size_t n, double lambda);

/// Exponentially weighted correlation from second moments about the
/// weighted mean of the n rows ending at t0.
CorrelationMatrix exponential_correlation(const ReturnPanel& panel, std::size_t t0, std::size_t n, double lambda);
CovarianceMatrix exponential_covariance(const ReturnPanel& panel, std::size_t t0, std::size_t n, double lambda);

}  // namespace simcov
