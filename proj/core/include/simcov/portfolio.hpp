#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "simcov/matrix.hpp"

namespace simcov {

/// Budget-constrained portfolio; weights sum to one, short positions allowed.
struct PortfolioWeights {
    Eigen::VectorXd weights;
    /// Set when the covariance needed a diagonal ridge to factorize.
    bool ridge_applied = false;

    std::size_t size() const noexcept { return std::size_t(weights.size()); }
    double sum() const { return weights.sum(); }
};

struct SolverOptions {
    /// On factorization failure, retry once with 1e-8 * trace / K on the diagonal.
    bool ridge_retry = false;
};

inline constexpr double kMaxConditionNumber = 1e12;

/// w = S^-1 1 / (1' S^-1 1)
PortfolioWeights minimum_variance_portfolio(const CovarianceMatrix& sigma, SolverOptions options = {});

/// gamma = (R - alpha/beta) / (mu' S^-1 mu - alpha^2/beta), alpha = 1' S^-1 mu, beta = 1' S^-1 1.
/// Throws degenerate-frontier when the denominator is below 1e-12 |mu|^2.
double gamma_for_target(const CovarianceMatrix& sigma, const Eigen::VectorXd& mu, double target,
                        SolverOptions options = {});

/// Minimum variance subject to 1'w = 1 and mu'w = R: w = S^-1 (gamma mu + nu 1), nu = (1 - gamma alpha) / beta.
PortfolioWeights target_return_portfolio(const CovarianceMatrix& sigma, const Eigen::VectorXd& mu, double target,
                                         SolverOptions options = {});

PortfolioWeights naive_portfolio(std::size_t asset_count);

double portfolio_variance(const CovarianceMatrix& sigma, const Eigen::VectorXd& weights);

/// Sum of squared daily portfolio returns.
double realized_volatility(std::span<const double> portfolio_returns);

}  // namespace simcov
