#pragma once

#include "fibcol/assemble.hpp"
#include "fibcol/basis.hpp"
#include "fibcol/problem.hpp"

#include <Eigen/QR>

#include <limits>
#include <string>

namespace fibcol {

enum class SolveMode { SquareLu, LeastSquares };

inline const char* to_string(SolveMode m) {
    return m == SolveMode::SquareLu ? "square-LU" : "least-squares";
}

struct SolveOutcome {
    Vector a;
    SolveMode mode = SolveMode::SquareLu;
    double condition_estimate = 1.0;
    bool rank_deficient = false;  // rank < columns on the least-squares path
};

/// Minimum-norm least-squares solution of W* A = G* via column-pivoted
/// orthogonal factorization. An all-zero matrix yields the zero vector
/// (flagged rank-deficient).
inline SolveOutcome solve_least_squares(const LinearSystem& sys) {
    if (sys.W.rows() < sys.W.cols())
        throw std::invalid_argument("solve_least_squares: fewer rows than columns");
    SolveOutcome out;
    out.mode = SolveMode::LeastSquares;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sys.W);
    const auto rank = cod.rank();
    out.rank_deficient = rank < sys.W.cols();
    if (rank == 0) {
        out.a = Vector::Zero(sys.W.cols());
        out.condition_estimate = std::numeric_limits<double>::infinity();
        return out;
    }
    out.a = cod.solve(sys.G);
    const Vector diag = cod.matrixT().diagonal().head(rank).cwiseAbs();
    out.condition_estimate = std::max(1.0, diag.maxCoeff() / diag.minCoeff());
    return out;
}

/// LU with partial pivoting on a square W*. When a pivot magnitude falls
/// below 1e-12 * max|W*| the system is treated as singular and the result
/// comes from solve_least_squares, tagged accordingly. Never aborts.
inline SolveOutcome solve_square(const LinearSystem& sys) {
    if (!sys.square()) throw std::invalid_argument("solve_square: system is not square");
    const double wmax = sys.W.size() > 0 ? sys.W.cwiseAbs().maxCoeff() : 0.0;
    Eigen::PartialPivLU<Matrix> lu(sys.W);
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (wmax == 0.0 || pivot_min < 1e-12 * wmax) return solve_least_squares(sys);

    SolveOutcome out;
    out.mode = SolveMode::SquareLu;
    out.a = lu.solve(sys.G);
    const double rcond = lu.rcond();  // 1-norm estimate from the factors
    out.condition_estimate = rcond > 0.0 ? std::max(1.0, 1.0 / rcond)
                                         : std::numeric_limits<double>::infinity();
    return out;
}

/// Solved problem: truncation, Fibonacci coefficients, and how the linear
/// system was solved.
struct FibSolution {
    int n = 0;
    CoefficientVector coeffs;
    SolveMode mode = SolveMode::SquareLu;
    double condition_estimate = 1.0;

    const Vector& a() const { return coeffs.a; }
    double eval(double x, int k = 0) const { return eval_series(coeffs.a, x, k); }
    double eval(double x, int k, const DerivativePowers& powers) const {
        return eval_series(coeffs.a, x, k, powers);
    }
};

struct SolveOptions {
    ConditionMode conditions = ConditionMode::ReplaceLast;
};

struct ValidationError : std::runtime_error {
    std::vector<Diagnostic> diagnostics;
    explicit ValidationError(std::vector<Diagnostic> ds)
        : std::runtime_error(ds.empty() ? "validation failed" : render(ds.front())),
          diagnostics(std::move(ds)) {}
};

inline LinearSystem build_system(const PantographProblem& p, int n, const SolveOptions& opt) {
    const FundamentalSystem fundamental = assemble_fundamental(p, n);
    const ConditionRows rows = condition_rows(p, n);
    return apply_conditions(fundamental.W, fundamental.G, rows.U, rows.lambdas, opt.conditions);
}

inline FibSolution solve_problem(const PantographProblem& p, int n,
                                 const SolveOptions& opt = {}) {
    auto diags = validate(p, n);
    if (has_errors(diags)) throw ValidationError(std::move(diags));

    const LinearSystem sys = build_system(p, n, opt);
    const SolveOutcome out =
        opt.conditions == ConditionMode::ReplaceLast ? solve_square(sys)
                                                     : solve_least_squares(sys);
    FibSolution sol;
    sol.n = n;
    sol.coeffs = CoefficientVector{n, out.a};
    sol.mode = out.mode;
    sol.condition_estimate = out.condition_estimate;
    return sol;
}

}  // namespace fibcol
