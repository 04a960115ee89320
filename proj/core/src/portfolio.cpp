#include "simcov/portfolio.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "simcov/error.hpp"

namespace simcov {

namespace {

// Cholesky of the covariance with the conditioning guard and optional ridge retry.
class SpdSystem {
public:
    SpdSystem(const CovarianceMatrix& sigma, SolverOptions options) {
        const Eigen::MatrixXd& m = sigma.matrix().dense();
        if (m.rows() == 0) {
            throw Error(ErrorCode::invalid_input, "empty covariance matrix");
        }
        if (factorize(m)) return;
        const double ridge = 1e-8 * m.trace() / static_cast<double>(m.rows());
        if (!options.ridge_retry) {
            throw Error(ErrorCode::singular_covariance,
                        "covariance is singular or ill-conditioned; a ridge of " + std::to_string(ridge) +
                            " (1e-8 * trace / K) on the diagonal may be retried");
        }
        Eigen::MatrixXd ridged = m;
        ridged.diagonal().array() += ridge;
        if (!(ridge > 0.0) || !factorize(ridged)) {
            throw Error(ErrorCode::singular_covariance, "covariance is singular even after a ridge of " +
                                                            std::to_string(ridge));
        }
        ridge_applied_ = true;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
    bool ridge_applied() const { return ridge_applied_; }

private:
    bool factorize(const Eigen::MatrixXd& m) {
        llt_.compute(m);
        if (llt_.info() != Eigen::Success) return false;
        const double rcond = llt_.rcond();
        return rcond > 0.0 && 1.0 / rcond <= kMaxConditionNumber;
    }

    Eigen::LLT<Eigen::MatrixXd> llt_;
    bool ridge_applied_ = false;
};

void require_mu(const CovarianceMatrix& sigma, const Eigen::VectorXd& mu) {
    if (std::size_t(mu.size()) != sigma.dim()) {
        throw Error(ErrorCode::invalid_input, "expected-return vector has " + std::to_string(mu.size()) +
                                                  " entries for " + std::to_string(sigma.dim()) + " assets");
    }
    if (!mu.allFinite()) {
        throw Error(ErrorCode::invalid_input, "expected returns must be finite");
    }
}

struct Frontier {
    Eigen::VectorXd inv_ones;  // S^-1 1
    Eigen::VectorXd inv_mu;    // S^-1 mu
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    bool ridge_applied = false;
};

Frontier frontier(const CovarianceMatrix& sigma, const Eigen::VectorXd& mu, double target, SolverOptions options) {
    require_mu(sigma, mu);
    const SpdSystem system(sigma, options);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mu.size());
    Frontier f;
    f.inv_ones = system.solve(ones);
    f.inv_mu = system.solve(mu);
    f.alpha = ones.dot(f.inv_mu);
    f.beta = ones.dot(f.inv_ones);
    f.ridge_applied = system.ridge_applied();

    // mu' S^-1 mu - alpha^2 / beta, evaluated on the mean-removed vector to avoid cancellation.
    const double drift = f.alpha / f.beta;
    const Eigen::VectorXd excess = mu - drift * ones;
    const double denominator = excess.dot(system.solve(excess));
    if (!(std::abs(denominator) > 1e-12 * mu.squaredNorm())) {
        throw Error(ErrorCode::degenerate_frontier, "expected returns are parallel to the budget vector");
    }
    f.gamma = (target - drift) / denominator;
    return f;
}

}  // namespace

PortfolioWeights minimum_variance_portfolio(const CovarianceMatrix& sigma, SolverOptions options) {
    const SpdSystem system(sigma, options);
    Eigen::VectorXd w = system.solve(Eigen::VectorXd::Ones(Eigen::Index(sigma.dim())));
    const double beta = w.sum();
    if (!(std::abs(beta) > 0.0) || !std::isfinite(beta)) {
        throw Error(ErrorCode::singular_covariance, "1' S^-1 1 vanishes");
    }
    w /= beta;
    return {std::move(w), system.ridge_applied()};
}

double gamma_for_target(const CovarianceMatrix& sigma, const Eigen::VectorXd& mu, double target,
                        SolverOptions options) {
    return frontier(sigma, mu, target, options).gamma;
}

PortfolioWeights target_return_portfolio(const CovarianceMatrix& sigma, const Eigen::VectorXd& mu, double target,
                                         SolverOptions options) {
    const Frontier f = frontier(sigma, mu, target, options);
    const double nu = (1.0 - f.gamma * f.alpha) / f.beta;
    return {f.gamma * f.inv_mu + nu * f.inv_ones, f.ridge_applied};
}

PortfolioWeights naive_portfolio(std::size_t asset_count) {
    if (asset_count < 1) {
        throw Error(ErrorCode::invalid_parameter, "naive portfolio needs at least one asset");
    }
    return {Eigen::VectorXd::Constant(Eigen::Index(asset_count), 1.0 / static_cast<double>(asset_count)), false};
}

double portfolio_variance(const CovarianceMatrix& sigma, const Eigen::VectorXd& weights) {
    if (std::size_t(weights.size()) != sigma.dim()) {
        throw Error(ErrorCode::invalid_input, "weight vector does not match covariance dimension");
    }
    return weights.dot(sigma.matrix().dense() * weights);
}

double realized_volatility(std::span<const double> portfolio_returns) {
    double rv = 0.0;
    for (double r : portfolio_returns) {
        if (!std::isfinite(r)) {
            throw Error(ErrorCode::invalid_input, "non-finite portfolio return");
        }
        rv += r * r;
    }
    return rv;
}

}  // namespace simcov
