#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fibcol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Row vector [F_1(x), ..., F_n(x)] computed by the forward recurrence
/// F_{r+1} = x F_r + F_{r-1} with F_1 = 1, F_2 = x.
inline RowVector fib_row(double x, int n) {
    if (n < 1) throw std::invalid_argument("fib_row: n must be positive");
    if (!std::isfinite(x)) throw std::invalid_argument("fib_row: x must be finite");
    RowVector f(n);
    f(0) = 1.0;
    if (n > 1) f(1) = x;
    for (int r = 2; r < n; ++r) f(r) = x * f(r - 1) + f(r - 2);
    return f;
}

/// Basis values at one abscissa; values(r-1) holds F_r(x) for r = 1..n.
struct BasisRow {
    double x = 0.0;
    int n = 0;
    RowVector values;
};

inline BasisRow eval_basis(double x, int n) { return BasisRow{x, n, fib_row(x, n)}; }

/// Derivative operational matrix: F'(x) = F(x) D. Strictly upper triangular,
/// nilpotent, with exact integer entries d(i,j) = i * sin((j-i)pi/2) for j > i.
/// The sine factor cycles 1, 0, -1, 0, so entries come from (j-i) mod 4,
/// never from floating-point trigonometry.
struct OperationalMatrix {
    int n = 0;
    Matrix d;
};

inline OperationalMatrix derivative_matrix(int n) {
    if (n < 1) throw std::invalid_argument("derivative_matrix: n must be positive");
    Matrix d = Matrix::Zero(n, n);
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            switch ((j - i) % 4) {
                case 1: d(i - 1, j - 1) = static_cast<double>(i); break;
                case 3: d(i - 1, j - 1) = static_cast<double>(-i); break;
                default: break;
            }
        }
    }
    return OperationalMatrix{n, std::move(d)};
}

/// D^k by repeated multiplication; D^0 = I and D^k = 0 for k >= n
/// (strict triangularity makes the high powers structurally zero).
inline Matrix matrix_power(const OperationalMatrix& D, int k) {
    if (k < 0) throw std::invalid_argument("matrix_power: k must be non-negative");
    if (k >= D.n) return Matrix::Zero(D.n, D.n);
    Matrix p = Matrix::Identity(D.n, D.n);
    for (int i = 0; i < k; ++i) p = p * D.d;
    return p;
}

/// Precomputed D^0..D^kmax for one truncation. Immutable after construction.
class DerivativePowers {
public:
    explicit DerivativePowers(int n, int kmax = -1) : n_(n), zero_(Matrix::Zero(n, n)) {
        if (kmax < 0) kmax = n - 1;
        const OperationalMatrix D = derivative_matrix(n);
        powers_.reserve(static_cast<std::size_t>(kmax) + 1);
        Matrix p = Matrix::Identity(n, n);
        powers_.push_back(p);
        for (int k = 1; k <= kmax && k < n; ++k) {
            p = p * D.d;
            powers_.push_back(p);
        }
    }

    int truncation() const { return n_; }

    const Matrix& operator[](int k) const {
        if (k < 0) throw std::invalid_argument("DerivativePowers: k must be non-negative");
        if (k >= n_) return zero_;
        if (static_cast<std::size_t>(k) >= powers_.size())
            throw std::logic_error("DerivativePowers: power beyond cached range");
        return powers_[static_cast<std::size_t>(k)];
    }

private:
    int n_;
    std::vector<Matrix> powers_;
    Matrix zero_;
};

struct CoefficientVector {
    int n = 0;
    Vector a;
};

/// k-th derivative of the truncated series at x: y^(k)(x) = F(x) D^k A.
inline double eval_series(const Vector& a, double x, int k, const DerivativePowers& powers) {
    if (!std::isfinite(x)) throw std::invalid_argument("eval_series: x must be finite");
    if (k < 0) throw std::invalid_argument("eval_series: k must be non-negative");
    const int n = static_cast<int>(a.size());
    if (k >= n) return 0.0;
    return fib_row(x, n) * powers[k] * a;
}

inline double eval_series(const Vector& a, double x, int k = 0) {
    const int n = static_cast<int>(a.size());
    if (k >= n) {
        if (!std::isfinite(x)) throw std::invalid_argument("eval_series: x must be finite");
        return 0.0;
    }
    return eval_series(a, x, k, DerivativePowers(n, k));
}

inline double eval_series(const CoefficientVector& a, double x, int k = 0) {
    return eval_series(a.a, x, k);
}

/// Monomial coefficients of F_1..F_n: row r-1 lists the coefficients of
/// x^0..x^{r-1} in F_r. Exact while the Fibonacci-sized entries fit in 64 bits
/// (n <= 87).
inline std::vector<std::vector<long long>> fib_monomials(int n) {
    if (n < 1) throw std::invalid_argument("fib_monomials: n must be positive");
    std::vector<std::vector<long long>> rows;
    rows.reserve(static_cast<std::size_t>(n));
    rows.push_back({1});
    if (n > 1) rows.push_back({0, 1});
    for (int r = 2; r < n; ++r) {
        std::vector<long long> c(static_cast<std::size_t>(r) + 1, 0);
        for (std::size_t d = 0; d < rows[static_cast<std::size_t>(r - 1)].size(); ++d)
            c[d + 1] += rows[static_cast<std::size_t>(r - 1)][d];
        for (std::size_t d = 0; d < rows[static_cast<std::size_t>(r - 2)].size(); ++d)
            c[d] += rows[static_cast<std::size_t>(r - 2)][d];
        rows.push_back(std::move(c));
    }
    return rows;
}

}  // namespace fibcol
