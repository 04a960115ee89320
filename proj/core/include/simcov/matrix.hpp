#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace simcov {

/// Dense symmetric matrix. Every mutation writes both triangles, so
/// `m(i, j) == m(j, i)` holds bit-for-bit.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim);

    static SymMatrix identity(std::size_t dim);

    /// Requires a square, finite, exactly symmetric input.
    static SymMatrix from_dense(Eigen::MatrixXd dense);

    /// Averages `dense` with its transpose. Use for products that are
    /// symmetric in exact arithmetic but not after rounding.
    static SymMatrix symmetrized(const Eigen::MatrixXd& dense);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    double operator()(std::size_t i, std::size_t j) const { return m_(Eigen::Index(i), Eigen::Index(j)); }
    void set(std::size_t i, std::size_t j, double value);
    const Eigen::MatrixXd& dense() const noexcept { return m_; }

    double trace() const { return m_.trace(); }
    bool all_finite() const { return m_.allFinite(); }

    /// this += weight * other
    void add_scaled(double weight, const SymMatrix& other);

    SymMatrix submatrix(std::span<const std::size_t> indices) const;

    SymMatrix& operator+=(const SymMatrix& other);
    SymMatrix& operator-=(const SymMatrix& other);
    SymMatrix& operator*=(double factor);

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(SymMatrix a, double f) { return a *= f; }
    friend SymMatrix operator*(double f, SymMatrix a) { return a *= f; }
    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    Eigen::MatrixXd m_;
};

/// Correlation matrix: finite, unit diagonal, off-diagonal entries in [-1, 1].
/// Positive semidefiniteness is not re-verified on construction (it costs an
/// eigen-decomposition); use `is_positive_semidefinite` where it matters.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;
    explicit CorrelationMatrix(SymMatrix m);

    static CorrelationMatrix identity(std::size_t dim);
    static CorrelationMatrix equicorrelation(std::size_t dim, double rho);

    std::size_t dim() const noexcept { return m_.dim(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const SymMatrix& matrix() const noexcept { return m_; }

    friend bool operator==(const CorrelationMatrix& a, const CorrelationMatrix& b) { return a.m_ == b.m_; }

private:
    SymMatrix m_;
};

/// Covariance matrix: finite with nonnegative diagonal.
class CovarianceMatrix {
public:
    CovarianceMatrix() = default;
    explicit CovarianceMatrix(SymMatrix m);

    std::size_t dim() const noexcept { return m_.dim(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const SymMatrix& matrix() const noexcept { return m_; }

    friend bool operator==(const CovarianceMatrix& a, const CovarianceMatrix& b) { return a.m_ == b.m_; }

private:
    SymMatrix m_;
};

inline constexpr double kUnitDiagonalTolerance = 1e-12;

enum class EigenMethod {
    automatic,       ///< Jacobi up to kJacobiMaxDim, tridiagonal QR above
    jacobi,          ///< cyclic Jacobi rotations
    tridiagonal_qr,  ///< Householder tridiagonalization + implicit QR (Eigen)
};

inline constexpr std::size_t kJacobiMaxDim = 32;

/// All eigenvalues in descending order.
/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops to 1e-12 of
/// the matrix Frobenius norm, or after 100 sweeps.
std::vector<double> sym_eigenvalues(const SymMatrix& m, EigenMethod method = EigenMethod::automatic);

/// Induced 2-norm; for a symmetric matrix this is the largest |eigenvalue|.
double spectral_norm(const SymMatrix& m);

/// min eigenvalue >= -1e-8 * N
bool is_positive_semidefinite(const CorrelationMatrix& c);
/// min eigenvalue >= -1e-8 * trace
bool is_positive_semidefinite(const CovarianceMatrix& c);

}  // namespace simcov
