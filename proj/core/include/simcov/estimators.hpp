#pragma once

#include <string>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "simcov/matrix.hpp"
#include "simcov/panel.hpp"

namespace simcov {

enum class CorrelationFlavor { pearson, spearman };

/// Product-moment correlation of the rows in `window`.
/// Throws invalid-window for fewer than 2 rows and degenerate-column
/// (naming the asset) for a column without in-window variation.
CorrelationMatrix pearson_correlation(const ReturnPanel& panel, RowRange window);

/// Pearson correlation of within-window ranks; ties get their average rank.
CorrelationMatrix spearman_correlation(const ReturnPanel& panel, RowRange window);

CorrelationMatrix correlation(const ReturnPanel& panel, RowRange window, CorrelationFlavor flavor);

/// Unbiased sample covariance, denominator (rows - 1).
CovarianceMatrix sample_covariance(const ReturnPanel& panel, RowRange window);

/// Mean of the N(N-1)/2 off-diagonal Spearman coefficients on each
/// trailing window of `window_length` rows; entry k belongs to row
/// `window_length - 1 + k`.
std::vector<double> mean_pairwise_correlation(const ReturnPanel& panel, std::size_t window_length);

/// Block-level variants. `assets` names the columns in error messages.
CorrelationMatrix pearson_correlation(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                      std::span<const std::string> assets);
CovarianceMatrix sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& rows);

/// Average ranks (1-based) of `values`, ties averaged.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace simcov
