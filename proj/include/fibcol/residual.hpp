#pragma once

#include "fibcol/assemble.hpp"
#include "fibcol/solve.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace fibcol {

struct PointFailure {
    std::size_t index;
    std::string message;
};

/// Pointwise defect E(x) = |y^(m)(x) - sum_t p_t(x) y^(k_t)(a_t x + b_t) - g(x)|
/// of a candidate solution. Failed points carry NaN in E and an entry in
/// failures; max_E is taken over the remaining points.
struct ResidualReport {
    std::vector<double> grid;
    std::vector<double> E;
    double max_E = 0.0;
    int n_used = 0;
    std::vector<PointFailure> failures;
};

inline ResidualReport residual(const PantographProblem& p, const FibSolution& s,
                               const std::vector<double>& grid) {
    const DerivativePowers powers(s.n, p.order);
    ResidualReport rep;
    rep.grid = grid;
    rep.E.resize(grid.size());
    rep.n_used = s.n;
    rep.max_E = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        try {
            double r = s.eval(x, p.order, powers);
            for (const auto& term : p.terms)
                r -= term.p(x) * s.eval(term.alpha * x + term.beta, term.k, powers);
            r -= p.g(x);
            rep.E[i] = std::abs(r);
            rep.max_E = std::max(rep.max_E, rep.E[i]);
        } catch (const EvalError& e) {
            rep.E[i] = std::numeric_limits<double>::quiet_NaN();
            rep.failures.push_back({i, e.what()});
        }
    }
    return rep;
}

/// |sum_t c_t y^(k_t)(mu_t) - lambda_r| for each condition row.
inline std::vector<double> condition_defects(const PantographProblem& p, const FibSolution& s) {
    const DerivativePowers powers(s.n, p.order > 0 ? p.order - 1 : 0);
    std::vector<double> out;
    out.reserve(p.conditions.size());
    for (const auto& cond : p.conditions) {
        double v = 0.0;
        for (const auto& ct : cond.terms) v += ct.c * s.eval(ct.mu, ct.k, powers);
        out.push_back(std::abs(v - cond.lambda));
    }
    return out;
}

struct AdaptiveEntry {
    int n;
    double max_E;
};

struct AdaptiveResult {
    FibSolution solution;
    ResidualReport report;
    std::vector<AdaptiveEntry> history;
    bool converged = false;
};

/// Increase the truncation one step at a time, evaluating the defect at the
/// collocation points of each n, until max_E drops below tol. Conditions are
/// re-checked at every n; a condition defect above 1e-9 * (1 + |lambda|)
/// counts as non-convergence at that n. Never aborts: on reaching n_max the
/// best (smallest max_E) solution is returned with converged = false.
inline AdaptiveResult adaptive_solve(const PantographProblem& p, double tol, int n0, int n_max,
                                     const SolveOptions& opt = {}) {
    if (n0 < p.order + 1)
        throw std::invalid_argument("adaptive_solve: n0 must be at least m+1");
    if (n_max < n0) throw std::invalid_argument("adaptive_solve: n_max must be >= n0");
    if (tol < 0.0) throw std::invalid_argument("adaptive_solve: tol must be non-negative");

    AdaptiveResult best;
    double best_max = std::numeric_limits<double>::infinity();
    for (int n = n0; n <= n_max; ++n) {
        FibSolution sol = solve_problem(p, n, opt);
        ResidualReport rep = residual(p, sol, collocation_points(p.a, p.b, n).points);
        best.history.push_back({n, rep.max_E});

        bool conditions_ok = true;
        const std::vector<double> defects = condition_defects(p, sol);
        for (std::size_t r = 0; r < defects.size(); ++r) {
            if (defects[r] > 1e-9 * (1.0 + std::abs(p.conditions[r].lambda))) {
                conditions_ok = false;
                break;
            }
        }

        if (rep.max_E < best_max && rep.failures.empty()) {
            best_max = rep.max_E;
            best.solution = sol;
            best.report = rep;
        }
        if (conditions_ok && rep.failures.empty() && rep.max_E < tol) {
            best.solution = std::move(sol);
            best.report = std::move(rep);
            best.converged = true;
            return best;
        }
    }
    best.converged = false;
    return best;
}

}  // namespace fibcol
