#pragma once

#include "fibcol/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibcol {

/// The reference integrator cannot handle this problem (higher order,
/// look-ahead argument, or unsupported condition shape).
struct OracleUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-form solutions of the three shipped benchmark problems.
inline Expr exact_solution(int example_id) {
    switch (example_id) {
        case 1: return Expr::parse("x^2");
        case 2: return Expr::parse("exp(x)");
        case 3: return Expr::parse("exp(-x)*cos(x)");
        default: throw std::invalid_argument("exact_solution: unknown example id");
    }
}

/// Piecewise-cubic Hermite trajectory on a uniform grid: value and slope at
/// both ends of every interval. Evaluation is restricted to [a, b].
class DenseTrajectory {
public:
    DenseTrajectory(double a, double b, int order, std::vector<double> ys,
                    std::vector<double> fs)
        : a_(a), b_(b), order_(order), ys_(std::move(ys)), fs_(std::move(fs)) {
        if (ys_.size() != fs_.size() || ys_.size() < 2)
            throw std::invalid_argument("DenseTrajectory: inconsistent node data");
        h_ = (b_ - a_) / static_cast<double>(ys_.size() - 1);
    }

    double a() const { return a_; }
    double b() const { return b_; }
    int order() const { return order_; }
    std::size_t steps() const { return ys_.size() - 1; }
    double node(std::size_t i) const { return a_ + h_ * static_cast<double>(i); }
    double value_at_node(std::size_t i) const { return ys_[i]; }
    double slope_at_node(std::size_t i) const { return fs_[i]; }

    double operator()(double x) const {
        const double tol = 1e-12 * (1.0 + std::abs(a_) + std::abs(b_));
        if (x < a_ - tol || x > b_ + tol)
            throw std::invalid_argument("DenseTrajectory: evaluation outside [a,b]");
        x = std::clamp(x, a_, b_);
        auto j = static_cast<std::size_t>((x - a_) / h_);
        j = std::min(j, ys_.size() - 2);
        return hermite(node(j), node(j + 1), ys_[j], ys_[j + 1], fs_[j], fs_[j + 1], x);
    }

    static double hermite(double x0, double x1, double ya, double yb, double fa, double fb,
                          double x) {
        const double d = x1 - x0;
        const double s = (x - x0) / d;
        const double om = 1.0 - s;
        const double h00 = (1.0 + 2.0 * s) * om * om;
        const double h10 = s * om * om;
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return h00 * ya + d * h10 * fa + h01 * yb + d * h11 * fb;
    }

private:
    double a_, b_, h_;
    int order_;
    std::vector<double> ys_, fs_;
};

/// Classical RK4 forward integration of a first-order problem with
/// non-look-ahead functional arguments. Delayed values are read from the
/// continuously built cubic Hermite extension of the computed trajectory.
/// An argument falling inside the step being computed is resolved by
/// fixed-point iteration of the whole step against a provisional Hermite
/// segment, so the scheme stays fourth order through the startup region
/// where proportional delays overlap the current step.
inline DenseTrajectory integrate_reference(const PantographProblem& p, double h) {
    if (p.order != 1)
        throw OracleUnavailable("reference integrator supports first-order problems only");
    if (!(h > 0.0) || !std::isfinite(h))
        throw OracleUnavailable("step size must be positive and finite");
    if (p.conditions.size() != 1 || p.conditions[0].terms.size() != 1)
        throw OracleUnavailable("reference integrator needs a single initial condition");
    const ConditionTerm& ic = p.conditions[0].terms[0];
    const double atol = 1e-12 * (1.0 + std::abs(p.a) + std::abs(p.b));
    if (ic.k != 0 || std::abs(ic.mu - p.a) > atol || ic.c == 0.0)
        throw OracleUnavailable("reference integrator needs the condition c*y(a) = lambda");

    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        // alpha*x + beta is affine: checking both interval endpoints suffices
        for (const double x : {p.a, p.b}) {
            const double arg = p.terms[t].alpha * x + p.terms[t].beta;
            if (arg > x + atol)
                throw OracleUnavailable("term " + std::to_string(t) +
                                        " looks ahead: alpha*x+beta > x inside [a,b]");
            if (arg < p.a - atol)
                throw OracleUnavailable("term " + std::to_string(t) +
                                        " reaches below a: history before the initial point "
                                        "is not available");
        }
    }

    const double y0 = p.conditions[0].lambda / ic.c;
    const auto nsteps =
        static_cast<std::size_t>(std::max(1.0, std::round((p.b - p.a) / h)));
    const double hh = (p.b - p.a) / static_cast<double>(nsteps);

    std::vector<double> xs(nsteps + 1), ys, fs;
    for (std::size_t i = 0; i <= nsteps; ++i) xs[i] = p.a + hh * static_cast<double>(i);
    xs.back() = p.b;
    ys.reserve(nsteps + 1);
    fs.reserve(nsteps + 1);
    ys.push_back(y0);

    // provisional data for the step being computed: slope at node i, value
    // and slope at node i+1
    double prov_fi = 0.0, prov_y = y0, prov_f = 0.0;
    std::size_t cur = 0;

    auto lookup = [&](double x) -> double {
        if (x <= xs[0] + atol) return ys[0];
        auto j = static_cast<std::size_t>((x - p.a) / hh);
        j = std::min(j, cur);
        const double fb_left = j < fs.size() ? fs[j] : prov_fi;
        if (j < cur) {
            const double fb_right = j + 1 < fs.size() ? fs[j + 1] : prov_fi;
            return DenseTrajectory::hermite(xs[j], xs[j + 1], ys[j], ys[j + 1], fb_left,
                                            fb_right, x);
        }
        return DenseTrajectory::hermite(xs[cur], xs[cur] + hh, ys[cur], prov_y, prov_fi,
                                        prov_f, x);
    };

    auto rhs = [&](double x, double u) -> double {
        double v = p.g(x);
        for (const auto& term : p.terms) {
            const double y_arg = (term.alpha == 1.0 && term.beta == 0.0)
                                     ? u
                                     : lookup(term.alpha * x + term.beta);
            v += term.p(x) * y_arg;
        }
        return v;
    };

    for (cur = 0; cur < nsteps; ++cur) {
        const double x0 = xs[cur];
        const double u0 = ys[cur];
        prov_fi = cur > 0 ? fs[cur - 1] : 0.0;
        prov_y = u0;
        prov_f = prov_fi;
        if (cur == 0) {
            // at x = a every admissible argument collapses onto [a, a]
            prov_fi = rhs(x0, u0);
            prov_f = prov_fi;
        }
        double y_next = u0;
        for (int it = 0; it < 16; ++it) {
            const double fi = rhs(x0, u0);
            const double k1 = fi;
            const double k2 = rhs(x0 + hh / 2.0, u0 + hh * k1 / 2.0);
            const double k3 = rhs(x0 + hh / 2.0, u0 + hh * k2 / 2.0);
            const double k4 = rhs(x0 + hh, u0 + hh * k3);
            const double y_new = u0 + hh * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            const bool settled = std::abs(y_new - y_next) <= 1e-15 * (1.0 + std::abs(y_new)) &&
                                 std::abs(fi - prov_fi) <= 1e-15 * (1.0 + std::abs(fi));
            prov_fi = fi;
            y_next = y_new;
            prov_y = y_new;
            prov_f = rhs(x0 + hh, y_new);
            if (settled && it > 0) break;
        }
        fs.push_back(prov_fi);
        ys.push_back(y_next);
    }

    // slope at the final node; its own interval may feed back through a
    // boundary-touching argument, so iterate it too
    double f_last = fs.back();
    for (int it = 0; it < 8; ++it) {
        cur = nsteps;  // lookup now sees the full grid with prov_fi standing in at the end
        prov_fi = f_last;
        prov_y = ys.back();
        prov_f = f_last;
        const double v = rhs(xs.back(), ys.back());
        const bool settled = std::abs(v - f_last) <= 1e-15 * (1.0 + std::abs(v));
        f_last = v;
        if (settled) break;
    }
    fs.push_back(f_last);

    return DenseTrajectory(p.a, p.b, p.order, std::move(ys), std::move(fs));
}

}  // namespace fibcol
