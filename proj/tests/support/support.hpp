#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "oracles.hpp"
#include "simcov/matrix.hpp"
#include "simcov/panel.hpp"

namespace support {

inline oracle::Mat to_oracle(const Eigen::MatrixXd& m) {
    oracle::Mat out(std::size_t(m.rows()), oracle::Vec(std::size_t(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[std::size_t(i)][std::size_t(j)] = m(i, j);
    }
    return out;
}

inline oracle::Mat to_oracle(const simcov::SymMatrix& m) { return to_oracle(m.dense()); }

inline oracle::Vec column(const simcov::ReturnPanel& p, std::size_t j, std::size_t first, std::size_t last) {
    oracle::Vec out;
    for (std::size_t i = first; i <= last; ++i) out.push_back(p.values()(Eigen::Index(i), Eigen::Index(j)));
    return out;
}

inline simcov::SymMatrix random_symmetric(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    simcov::SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) m.set(i, j, u(rng));
    }
    return m;
}

inline Eigen::MatrixXd gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd x{Eigen::Index(rows), Eigen::Index(cols)};
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = z(rng);
    }
    return x;
}

// Random full-rank correlation matrix from a Gram matrix of Gaussian factors.
inline simcov::CorrelationMatrix random_correlation(std::size_t n, std::mt19937_64& rng) {
    const Eigen::MatrixXd x = gaussian(n, n + 3, rng);
    Eigen::MatrixXd g = x * x.transpose();
    const Eigen::VectorXd d = g.diagonal().cwiseSqrt().cwiseInverse();
    g = d.asDiagonal() * g * d.asDiagonal();
    g.diagonal().setOnes();
    return simcov::CorrelationMatrix(simcov::SymMatrix::symmetrized(g));
}

inline simcov::CovarianceMatrix random_covariance(std::size_t n, std::mt19937_64& rng) {
    const Eigen::MatrixXd x = gaussian(n, n + 5, rng);
    return simcov::CovarianceMatrix(simcov::SymMatrix::symmetrized(x * x.transpose() / double(n + 5)));
}

inline std::vector<std::string> asset_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < n; ++j) out.push_back("X" + std::to_string(j));
    return out;
}

inline simcov::ReturnPanel panel_from(const Eigen::MatrixXd& values) {
    std::vector<std::int64_t> times(std::size_t(values.rows()));
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = std::int64_t(i);
    return simcov::ReturnPanel(std::move(times), asset_names(std::size_t(values.cols())), values);
}

inline simcov::ReturnPanel random_panel(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                        double scale = 0.01) {
    return panel_from(gaussian(rows, cols, rng) * scale);
}

}  // namespace support
