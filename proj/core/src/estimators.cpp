#include "simcov/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simcov/error.hpp"

namespace simcov {

namespace {

void require_rows(Eigen::Index rows) {
    if (rows < 2) {
        throw Error(ErrorCode::invalid_window, "window needs at least 2 rows, got " + std::to_string(rows));
    }
}

// Two-pass column means with a correction term, so constant columns center to exact zeros.
Eigen::MatrixXd centered(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
    Eigen::MatrixXd out = rows;
    const double n = static_cast<double>(rows.rows());
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        double mean = out.col(j).sum() / n;
        mean += (out.col(j).array() - mean).sum() / n;
        out.col(j).array() -= mean;
    }
    return out;
}

std::string asset_name(std::span<const std::string> assets, Eigen::Index j) {
    if (std::size_t(j) < assets.size()) return assets[std::size_t(j)];
    return "#" + std::to_string(j);
}

}  // namespace

CorrelationMatrix pearson_correlation(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                      std::span<const std::string> assets) {
    require_rows(rows.rows());
    const Eigen::MatrixXd x = centered(rows);
    Eigen::MatrixXd gram = x.transpose() * x;
    const Eigen::Index n = gram.rows();
    Eigen::VectorXd scale(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double peak = rows.col(j).cwiseAbs().maxCoeff();
        const double noise = 1e-14 * peak;
        if (!(gram(j, j) > noise * noise * static_cast<double>(rows.rows()))) {
            throw Error(ErrorCode::degenerate_column,
                        "asset '" + asset_name(assets, j) + "' has zero variance in window");
        }
        scale(j) = 1.0 / std::sqrt(gram(j, j));
    }
    SymMatrix out{std::size_t(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.set(std::size_t(i), std::size_t(i), 1.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = gram(i, j) * scale(i) * scale(j);
            out.set(std::size_t(i), std::size_t(j), std::clamp(r, -1.0, 1.0));
        }
    }
    return CorrelationMatrix(std::move(out));
}

CovarianceMatrix sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
    require_rows(rows.rows());
    const Eigen::MatrixXd x = centered(rows);
    Eigen::MatrixXd cov = x.transpose() * x;
    cov /= static_cast<double>(rows.rows() - 1);
    return CovarianceMatrix(SymMatrix::symmetrized(cov));
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

CorrelationMatrix pearson_correlation(const ReturnPanel& panel, RowRange window) {
    require_rows(Eigen::Index(window.size()));
    return pearson_correlation(panel.window(window), panel.assets());
}

CorrelationMatrix spearman_correlation(const ReturnPanel& panel, RowRange window) {
    require_rows(Eigen::Index(window.size()));
    const auto block = panel.window(window);
    Eigen::MatrixXd ranks(block.rows(), block.cols());
    std::vector<double> column(std::size_t(block.rows()));
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
        for (Eigen::Index i = 0; i < block.rows(); ++i) column[std::size_t(i)] = block(i, j);
        const auto r = average_ranks(column);
        for (Eigen::Index i = 0; i < block.rows(); ++i) ranks(i, j) = r[std::size_t(i)];
    }
    return pearson_correlation(ranks, panel.assets());
}

CorrelationMatrix correlation(const ReturnPanel& panel, RowRange window, CorrelationFlavor flavor) {
    return flavor == CorrelationFlavor::pearson ? pearson_correlation(panel, window)
                                                : spearman_correlation(panel, window);
}

CovarianceMatrix sample_covariance(const ReturnPanel& panel, RowRange window) {
    require_rows(Eigen::Index(window.size()));
    return sample_covariance(panel.window(window));
}

std::vector<double> mean_pairwise_correlation(const ReturnPanel& panel, std::size_t window_length) {
    if (panel.cols() < 2) {
        throw Error(ErrorCode::invalid_input, "mean pairwise correlation needs at least 2 assets");
    }
    if (window_length < 2) {
        throw Error(ErrorCode::invalid_window, "window length must be at least 2");
    }
    if (panel.rows() < window_length) {
        throw Error(ErrorCode::invalid_window, "panel has " + std::to_string(panel.rows()) +
                                                   " rows, shorter than window " + std::to_string(window_length));
    }
    const std::size_t n = panel.cols();
    const double pairs = 0.5 * static_cast<double>(n * (n - 1));
    std::vector<double> out;
    out.reserve(panel.rows() - window_length + 1);
    for (std::size_t t = window_length - 1; t < panel.rows(); ++t) {
        const auto c = spearman_correlation(panel, RowRange::ending_at(t, window_length));
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) sum += c(i, j);
        }
        out.push_back(sum / pairs);
    }
    return out;
}

}  // namespace simcov
