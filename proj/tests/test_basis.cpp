#include "fibcol/basis.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

using namespace fibcol;
using Catch::Approx;

namespace {

// Test-side symbolic route, independent of derivative_matrix: build each
// F_r as an exact monomial coefficient array, differentiate term by term,
// and re-expand in the (monic) Fibonacci basis by back-substitution.
using Poly = std::vector<long long>;  // coefficient of x^d at index d

std::vector<Poly> symbolic_fib(int n) {
    std::vector<Poly> f{{1}};
    if (n > 1) f.push_back({0, 1});
    for (int r = 2; r < n; ++r) {
        Poly c(static_cast<std::size_t>(r) + 1, 0);
        for (std::size_t d = 0; d < f[static_cast<std::size_t>(r - 1)].size(); ++d)
            c[d + 1] += f[static_cast<std::size_t>(r - 1)][d];
        for (std::size_t d = 0; d < f[static_cast<std::size_t>(r - 2)].size(); ++d)
            c[d] += f[static_cast<std::size_t>(r - 2)][d];
        f.push_back(std::move(c));
    }
    return f;
}

Poly symbolic_derivative(const Poly& p) {
    if (p.size() <= 1) return {0};
    Poly d(p.size() - 1, 0);
    for (std::size_t k = 1; k < p.size(); ++k)
        d[k - 1] = p[k] * static_cast<long long>(k);
    return d;
}

std::vector<long long> expand_in_fib_basis(Poly q, const std::vector<Poly>& basis) {
    std::vector<long long> coeffs(basis.size(), 0);
    for (int d = static_cast<int>(q.size()) - 1; d >= 0; --d) {
        const long long c = q[static_cast<std::size_t>(d)];
        if (c == 0) continue;
        // F_{d+1} is the unique basis member of degree d, with leading coefficient 1
        coeffs[static_cast<std::size_t>(d)] = c;
        const Poly& f = basis[static_cast<std::size_t>(d)];
        for (std::size_t j = 0; j < f.size(); ++j) q[j] -= c * f[j];
    }
    for (const long long v : q) REQUIRE(v == 0);
    return coeffs;
}

}  // namespace

TEST_CASE("basis row values", "[basis]") {
    const BasisRow r0 = eval_basis(0.0, 5);
    REQUIRE(r0.n == 5);
    const double expect0[] = {1, 0, 1, 0, 1};
    for (int i = 0; i < 5; ++i) REQUIRE(r0.values(i) == expect0[i]);

    const RowVector r1 = fib_row(1.0, 5);
    const double expect1[] = {1, 1, 2, 3, 5};
    for (int i = 0; i < 5; ++i) REQUIRE(r1(i) == expect1[i]);

    const RowVector r2 = fib_row(2.0, 4);
    const double expect2[] = {1, 2, 5, 12};
    for (int i = 0; i < 4; ++i) REQUIRE(r2(i) == expect2[i]);

    REQUIRE_THROWS_AS(fib_row(std::nan(""), 3), std::invalid_argument);
    REQUIRE_THROWS_AS(fib_row(1.0, 0), std::invalid_argument);
}

TEST_CASE("basis recurrence holds on random abscissae", "[basis]") {
    std::mt19937 rng(20240);
    std::uniform_real_distribution<double> xd(-5.0, 5.0);
    std::uniform_int_distribution<int> nd(3, 32);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = xd(rng);
        const int n = nd(rng);
        const RowVector f = fib_row(x, n);
        for (int r = 2; r < n; ++r) {
            const double expect = x * f(r - 1) + f(r - 2);
            REQUIRE(std::abs(f(r) - expect) <= 1e-13 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("basis at x=1 gives Fibonacci numbers", "[basis]") {
    const int n = 32;
    const RowVector f = fib_row(1.0, n);
    long long a = 1, b = 1;
    for (int r = 0; r < n; ++r) {
        REQUIRE(f(r) == static_cast<double>(a));
        const long long next = a + b;
        a = b;
        b = next;
    }
}

TEST_CASE("derivative matrix structure", "[basis]") {
    const OperationalMatrix d1 = derivative_matrix(1);
    REQUIRE(d1.d(0, 0) == 0.0);

    const OperationalMatrix d4 = derivative_matrix(4);
    REQUIRE(d4.d(0, 1) == 1.0);
    REQUIRE(d4.d(1, 2) == 2.0);
    REQUIRE(d4.d(0, 3) == -1.0);
    REQUIRE(d4.d(2, 3) == 3.0);
    double sum_abs = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sum_abs += std::abs(d4.d(i, j));
    REQUIRE(sum_abs == 7.0);  // only the four entries above are nonzero

    for (int n : {2, 5, 9, 16}) {
        const OperationalMatrix D = derivative_matrix(n);
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= n; ++j) {
                const double v = D.d(i - 1, j - 1);
                if (j <= i) {
                    REQUIRE(v == 0.0);
                } else if ((j - i) % 2 == 0) {
                    REQUIRE(v == 0.0);  // the sine factor vanishes on even gaps
                } else {
                    REQUIRE((v == i || v == -i));
                }
            }
        }
    }
}

TEST_CASE("derivative matrix equals symbolic differentiation", "[basis]") {
    for (int n = 1; n <= 15; ++n) {
        const OperationalMatrix D = derivative_matrix(n);
        const std::vector<Poly> basis = symbolic_fib(n);
        for (int r = 1; r <= n; ++r) {
            const auto col = expand_in_fib_basis(
                symbolic_derivative(basis[static_cast<std::size_t>(r - 1)]), basis);
            for (int i = 1; i <= n; ++i)
                REQUIRE(D.d(i - 1, r - 1) ==
                        static_cast<double>(col[static_cast<std::size_t>(i - 1)]));
        }
    }
}

TEST_CASE("matrix powers and nilpotency", "[basis]") {
    const OperationalMatrix d4 = derivative_matrix(4);
    REQUIRE(matrix_power(d4, 0).isIdentity(0.0));
    REQUIRE(matrix_power(d4, 2)(0, 2) == 2.0);
    REQUIRE_THROWS_AS(matrix_power(d4, -1), std::invalid_argument);

    for (int n : {1, 2, 3, 7, 16, 32}) {
        const Matrix z = matrix_power(derivative_matrix(n), n);
        REQUIRE(z.cwiseAbs().maxCoeff() == 0.0);  // exactly zero, no tolerance
    }
}

TEST_CASE("series evaluation and derivatives", "[basis]") {
    Vector a(3);
    a << -1.0, 0.0, 1.0;  // -F_1 + F_3 = x^2
    REQUIRE(eval_series(a, 0.7, 0) == Approx(0.49).margin(1e-15));
    REQUIRE(eval_series(a, 0.7, 1) == Approx(1.4).margin(1e-15));
    REQUIRE(eval_series(a, 0.7, 3) == 0.0);  // k >= n is exactly zero

    Vector c(3);
    c << 5.0, 0.0, 0.0;
    REQUIRE(eval_series(c, 123.0, 1) == 0.0);

    REQUIRE_THROWS_AS(eval_series(a, std::nan(""), 0), std::invalid_argument);
}

TEST_CASE("series derivative matches central finite differences", "[basis]") {
    std::mt19937 rng(7321);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> xd(0.0, 1.0);
    std::uniform_int_distribution<int> nd(2, 10);
    const double h = 1e-6;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = nd(rng);
        Vector a(n);
        for (int i = 0; i < n; ++i) a(i) = coeff(rng);
        const DerivativePowers powers(n, 1);
        for (int rep = 0; rep < 5; ++rep) {
            const double x = xd(rng);
            const double spectral = eval_series(a, x, 1, powers);
            const double fd =
                (eval_series(a, x + h, 0, powers) - eval_series(a, x - h, 0, powers)) /
                (2.0 * h);
            REQUIRE(spectral == Approx(fd).margin(1e-6));
        }
    }
}

TEST_CASE("monomial expansion of the basis", "[basis]") {
    const auto rows = fib_monomials(5);
    REQUIRE(rows[0] == Poly{1});
    REQUIRE(rows[1] == Poly{0, 1});
    REQUIRE(rows[2] == Poly{1, 0, 1});
    REQUIRE(rows[3] == Poly{0, 2, 0, 1});
    REQUIRE(rows[4] == Poly{1, 0, 3, 0, 1});
}
