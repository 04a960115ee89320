#include "simcov/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>

#include "simcov/error.hpp"

namespace simcov {

namespace {

void require_index(std::size_t i, std::size_t dim) {
    if (i >= dim) {
        throw Error(ErrorCode::invalid_input,
                    "index " + std::to_string(i) + " out of range for dimension " + std::to_string(dim));
    }
}

void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::invalid_input, "dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                                  std::to_string(b.dim()));
    }
}

}  // namespace

SymMatrix::SymMatrix(std::size_t dim) : m_(Eigen::MatrixXd::Zero(Eigen::Index(dim), Eigen::Index(dim))) {}

SymMatrix SymMatrix::identity(std::size_t dim) {
    SymMatrix out(dim);
    out.m_.setIdentity();
    return out;
}

SymMatrix SymMatrix::from_dense(Eigen::MatrixXd dense) {
    if (dense.rows() != dense.cols()) {
        throw Error(ErrorCode::invalid_input, "matrix is not square");
    }
    if (!dense.allFinite()) {
        throw Error(ErrorCode::invalid_input, "matrix has non-finite entries");
    }
    if (dense != dense.transpose()) {
        throw Error(ErrorCode::invalid_input, "matrix is not symmetric");
    }
    SymMatrix out;
    out.m_ = std::move(dense);
    return out;
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& dense) {
    if (dense.rows() != dense.cols()) {
        throw Error(ErrorCode::invalid_input, "matrix is not square");
    }
    if (!dense.allFinite()) {
        throw Error(ErrorCode::invalid_input, "matrix has non-finite entries");
    }
    SymMatrix out;
    out.m_ = 0.5 * (dense + dense.transpose());
    return out;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
    require_index(i, dim());
    require_index(j, dim());
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::invalid_input, "non-finite entry");
    }
    m_(Eigen::Index(i), Eigen::Index(j)) = value;
    m_(Eigen::Index(j), Eigen::Index(i)) = value;
}

void SymMatrix::add_scaled(double weight, const SymMatrix& other) {
    require_same_dim(*this, other);
    m_.noalias() += weight * other.m_;
}

SymMatrix SymMatrix::submatrix(std::span<const std::size_t> indices) const {
    SymMatrix out(indices.size());
    for (std::size_t a = 0; a < indices.size(); ++a) {
        require_index(indices[a], dim());
        for (std::size_t b = 0; b < indices.size(); ++b) {
            out.m_(Eigen::Index(a), Eigen::Index(b)) = m_(Eigen::Index(indices[a]), Eigen::Index(indices[b]));
        }
    }
    return out;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
    require_same_dim(*this, other);
    m_ += other.m_;
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
    require_same_dim(*this, other);
    m_ -= other.m_;
    return *this;
}

SymMatrix& SymMatrix::operator*=(double factor) {
    m_ *= factor;
    return *this;
}

CorrelationMatrix::CorrelationMatrix(SymMatrix m) : m_(std::move(m)) {
    if (!m_.all_finite()) {
        throw Error(ErrorCode::invalid_input, "correlation matrix has non-finite entries");
    }
    const std::size_t n = m_.dim();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(m_(i, i) - 1.0) > kUnitDiagonalTolerance) {
            throw Error(ErrorCode::invalid_input,
                        "correlation matrix diagonal entry " + std::to_string(i) + " is " + std::to_string(m_(i, i)));
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = m_(i, j);
            if (std::abs(v) > 1.0 + kUnitDiagonalTolerance) {
                throw Error(ErrorCode::invalid_input, "correlation entry (" + std::to_string(i) + ", " +
                                                          std::to_string(j) + ") outside [-1, 1]");
            }
            // rounding overshoot only
            if (std::abs(v) > 1.0) {
                m_.set(i, j, std::clamp(v, -1.0, 1.0));
            }
        }
    }
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t dim) { return CorrelationMatrix(SymMatrix::identity(dim)); }

CorrelationMatrix CorrelationMatrix::equicorrelation(std::size_t dim, double rho) {
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < dim; ++j) {
            m.set(i, j, rho);
        }
    }
    return CorrelationMatrix(std::move(m));
}

CovarianceMatrix::CovarianceMatrix(SymMatrix m) : m_(std::move(m)) {
    if (!m_.all_finite()) {
        throw Error(ErrorCode::invalid_input, "covariance matrix has non-finite entries");
    }
    for (std::size_t i = 0; i < m_.dim(); ++i) {
        if (m_(i, i) < 0.0) {
            throw Error(ErrorCode::invalid_input, "covariance matrix has negative variance at " + std::to_string(i));
        }
    }
}

namespace {

std::vector<double> jacobi_eigenvalues(const SymMatrix& m) {
    const std::size_t n = m.dim();
    // Column-major working copy; both triangles are kept in sync.
    std::vector<double> a(m.dense().data(), m.dense().data() + n * n);
    auto at = [&a, n](std::size_t i, std::size_t j) -> double& { return a[i + j * n]; };

    double frobenius_sq = 0.0;
    for (double v : a) frobenius_sq += v * v;
    const double tolerance_sq = 1e-24 * frobenius_sq;

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off_sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < j; ++i) off_sq += 2.0 * at(i, j) * at(i, j);
        }
        if (off_sq <= tolerance_sq) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;

                double* col_p = &a[p * n];
                double* col_q = &a[q * n];
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = col_p[k];
                    const double akq = col_q[k];
                    col_p[k] = akp - s * (akq + tau * akp);
                    col_q[k] = akq + s * (akp - tau * akq);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    at(p, k) = col_p[k];
                    at(q, k) = col_q[k];
                }
            }
        }
    }

    std::vector<double> eigenvalues(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = at(i, i);
    return eigenvalues;
}

std::vector<double> tridiagonal_eigenvalues(const SymMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::invalid_input, "symmetric eigenvalue iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace

std::vector<double> sym_eigenvalues(const SymMatrix& m, EigenMethod method) {
    if (!m.all_finite()) {
        throw Error(ErrorCode::invalid_input, "eigenvalues of a matrix with non-finite entries");
    }
    if (method == EigenMethod::automatic) {
        method = m.dim() <= kJacobiMaxDim ? EigenMethod::jacobi : EigenMethod::tridiagonal_qr;
    }
    auto eigenvalues = method == EigenMethod::jacobi ? jacobi_eigenvalues(m) : tridiagonal_eigenvalues(m);
    std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
    return eigenvalues;
}

double spectral_norm(const SymMatrix& m) {
    const auto ev = sym_eigenvalues(m);
    if (ev.empty()) return 0.0;
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

bool is_positive_semidefinite(const CorrelationMatrix& c) {
    const auto ev = sym_eigenvalues(c.matrix());
    return ev.empty() || ev.back() >= -1e-8 * static_cast<double>(c.dim());
}

bool is_positive_semidefinite(const CovarianceMatrix& c) {
    const auto ev = sym_eigenvalues(c.matrix());
    return ev.empty() || ev.back() >= -1e-8 * c.matrix().trace();
}

}  // namespace simcov
