#pragma once

#include "fibcol/basis.hpp"
#include "fibcol/problem.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fibcol {

/// Uniform collocation grid x_i = a + (b-a)(i-1)/(N-1), endpoints exact.
struct CollocationGrid {
    std::vector<double> points;
    int size() const { return static_cast<int>(points.size()); }
};

inline CollocationGrid collocation_points(double a, double b, int n) {
    if (!(a < b)) throw std::invalid_argument("collocation_points: requires a < b");
    if (n < 1) throw std::invalid_argument("collocation_points: n must be positive");
    CollocationGrid g;
    g.points.resize(static_cast<std::size_t>(n));
    if (n == 1) {
        g.points[0] = a;
        return g;
    }
    for (int i = 0; i < n; ++i)
        g.points[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    g.points.front() = a;
    g.points.back() = b;
    return g;
}

/// Row i = [F_1(x_i) .. F_n(x_i)].
inline Matrix basis_matrix(const CollocationGrid& grid, int n) {
    Matrix F(grid.size(), n);
    for (int i = 0; i < grid.size(); ++i)
        F.row(i) = fib_row(grid.points[static_cast<std::size_t>(i)], n);
    return F;
}

/// Row i = [F_1(alpha x_i + beta) .. F_n(alpha x_i + beta)].
inline Matrix shifted_basis_matrix(const CollocationGrid& grid, double alpha, double beta,
                                   int n) {
    Matrix F(grid.size(), n);
    for (int i = 0; i < grid.size(); ++i)
        F.row(i) = fib_row(alpha * grid.points[static_cast<std::size_t>(i)] + beta, n);
    return F;
}

/// Expression evaluation failed while building the system.
struct AssemblyError : std::runtime_error {
    int term_index;   // -1 for the forcing g
    double point;
    AssemblyError(int term, double x, const std::string& msg)
        : std::runtime_error((term < 0 ? std::string("forcing g")
                                       : "term " + std::to_string(term)) +
                             " at x = " + format_double(x) + ": " + msg),
          term_index(term),
          point(x) {}
};

struct FundamentalSystem {
    Matrix W;
    Vector G;
};

/// W = F D^m - sum_t diag(p_t(x_i)) Fbar_t D^{k_t},  G_i = g(x_i).
/// Coefficient values scale rows directly; the diagonal matrices are never
/// materialized.
inline FundamentalSystem assemble_fundamental(const PantographProblem& p, int n) {
    const CollocationGrid grid = collocation_points(p.a, p.b, n);
    const DerivativePowers powers(n, p.order);

    FundamentalSystem sys;
    sys.W = basis_matrix(grid, n) * powers[p.order];
    sys.G.resize(n);

    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        const auto& term = p.terms[t];
        Vector coeff(n);
        for (int i = 0; i < n; ++i) {
            const double x = grid.points[static_cast<std::size_t>(i)];
            try {
                coeff(i) = term.p(x);
            } catch (const EvalError& e) {
                throw AssemblyError(static_cast<int>(t), x, e.what());
            }
        }
        const Matrix shifted =
            shifted_basis_matrix(grid, term.alpha, term.beta, n) * powers[term.k];
        sys.W.noalias() -= coeff.asDiagonal() * shifted;
    }

    for (int i = 0; i < n; ++i) {
        const double x = grid.points[static_cast<std::size_t>(i)];
        try {
            sys.G(i) = p.g(x);
        } catch (const EvalError& e) {
            throw AssemblyError(-1, x, e.what());
        }
    }
    return sys;
}

struct ConditionRows {
    Matrix U;        // m x n
    Vector lambdas;  // length m
};

/// Row r = sum_t c_t F(mu_t) D^{k_t}; right-hand side lambda_r.
inline ConditionRows condition_rows(const PantographProblem& p, int n) {
    const int m = static_cast<int>(p.conditions.size());
    const DerivativePowers powers(n, p.order > 0 ? p.order - 1 : 0);
    ConditionRows rows;
    rows.U = Matrix::Zero(m, n);
    rows.lambdas.resize(m);
    for (int r = 0; r < m; ++r) {
        const auto& cond = p.conditions[static_cast<std::size_t>(r)];
        for (const auto& ct : cond.terms)
            rows.U.row(r) += ct.c * (fib_row(ct.mu, n) * powers[ct.k]);
        rows.lambdas(r) = cond.lambda;
    }
    return rows;
}

enum class ConditionMode { ReplaceLast, Append };

inline const char* to_string(ConditionMode m) {
    return m == ConditionMode::ReplaceLast ? "replace" : "append";
}

/// Condition-augmented system [W* : G*]. In replace mode the m condition rows
/// overwrite the rows for the largest collocation points and replaced_rows
/// records their 0-based indices; in append mode the system is (N+m) x N and
/// replaced_rows is empty.
struct LinearSystem {
    Matrix W;
    Vector G;
    std::vector<int> replaced_rows;
    bool square() const { return W.rows() == W.cols(); }
};

inline LinearSystem apply_conditions(const Matrix& W, const Vector& G, const Matrix& U,
                                     const Vector& lambdas, ConditionMode mode) {
    const auto n = W.rows();
    const auto m = U.rows();
    if (W.cols() != U.cols() && m > 0)
        throw std::invalid_argument("apply_conditions: column counts differ");
    if (G.size() != n || lambdas.size() != m)
        throw std::invalid_argument("apply_conditions: right-hand side sizes differ");

    LinearSystem sys;
    if (mode == ConditionMode::ReplaceLast) {
        if (m > n) throw std::invalid_argument("apply_conditions: more conditions than rows");
        sys.W = W;
        sys.G = G;
        for (Eigen::Index r = 0; r < m; ++r) {
            const Eigen::Index row = n - m + r;
            sys.W.row(row) = U.row(r);
            sys.G(row) = lambdas(r);
            sys.replaced_rows.push_back(static_cast<int>(row));
        }
    } else {
        sys.W.resize(n + m, W.cols());
        sys.G.resize(n + m);
        sys.W.topRows(n) = W;
        sys.W.bottomRows(m) = U;
        sys.G.head(n) = G;
        sys.G.tail(m) = lambdas;
    }
    return sys;
}

}  // namespace fibcol
