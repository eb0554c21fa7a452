#include "fibcol/assemble.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

using namespace fibcol;
using Catch::Approx;

namespace {

PantographProblem load_golden(const std::string& name) {
    std::ifstream in(std::string(FIBCOL_DATA_DIR) + "/" + name);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    const LoadResult res = load_problem(ss.str());
    REQUIRE(res.ok());
    return *res.problem;
}

}  // namespace

TEST_CASE("collocation grids", "[assemble]") {
    const CollocationGrid g = collocation_points(0.0, 1.0, 5);
    REQUIRE(g.points == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    REQUIRE(collocation_points(0.0, 1.0, 2).points == std::vector<double>{0.0, 1.0});
    REQUIRE(collocation_points(-1.0, 3.0, 3).points == std::vector<double>{-1.0, 1.0, 3.0});
    REQUIRE_THROWS_AS(collocation_points(1.0, 0.0, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(collocation_points(1.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("basis and shifted basis matrices", "[assemble]") {
    CollocationGrid g;
    g.points = {0.0, 0.5, 1.0};
    const Matrix F = basis_matrix(g, 3);
    const double expect[3][3] = {{1, 0, 1}, {1, 0.5, 1.25}, {1, 1, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(F(i, j) == expect[i][j]);
    REQUIRE((F.col(0).array() == 1.0).all());  // F_1 is identically one

    REQUIRE(shifted_basis_matrix(g, 1.0, 0.0, 3) == F);

    const Matrix half = shifted_basis_matrix(g, 0.0, 0.5, 3);
    for (int i = 0; i < 3; ++i) REQUIRE(half.row(i) == fib_row(0.5, 3));

    // substitution consistency, exact entrywise
    const Matrix sh = shifted_basis_matrix(g, 0.5, 0.0, 3);
    for (int i = 0; i < 3; ++i)
        REQUIRE(sh.row(i) == fib_row(0.5 * g.points[static_cast<std::size_t>(i)], 3));
    REQUIRE(sh(2, 2) == 1.25);
}

TEST_CASE("fundamental system of the empty problem", "[assemble]") {
    PantographProblem p;
    p.order = 1;
    p.a = 0.0;
    p.b = 1.0;
    p.g = Expr::parse("0");
    p.conditions.push_back({{{0, 1.0, 0.0}}, 0.0});

    const FundamentalSystem sys = assemble_fundamental(p, 4);
    const CollocationGrid grid = collocation_points(0.0, 1.0, 4);
    const Matrix expect = basis_matrix(grid, 4) * derivative_matrix(4).d;
    REQUIRE(sys.W == expect);
    REQUIRE(sys.G.isZero(0.0));
}

TEST_CASE("exact polynomial solution annihilates the fundamental system", "[assemble]") {
    const PantographProblem p = load_golden("example1.pant");
    const FundamentalSystem sys = assemble_fundamental(p, 3);
    Vector a(3);
    a << -1.0, 0.0, 1.0;  // x^2 in the basis
    const double row_norm = sys.W.cwiseAbs().rowwise().sum().maxCoeff();
    const Vector r = sys.W * a - sys.G;
    REQUIRE(r.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + row_norm));
}

TEST_CASE("assembly is linear in the coefficients and forcing", "[assemble]") {
    const PantographProblem p = load_golden("example2.pant");
    PantographProblem doubled = p;
    for (auto& t : doubled.terms) t.p = Expr::parse("2*(" + t.p.str() + ")");
    doubled.g = Expr::parse("2*(" + p.g.str() + ")");

    const int n = 6;
    const FundamentalSystem s1 = assemble_fundamental(p, n);
    const FundamentalSystem s2 = assemble_fundamental(doubled, n);
    const Matrix fdm =
        basis_matrix(collocation_points(p.a, p.b, n), n) * matrix_power(derivative_matrix(n), p.order);
    // reconstructing W - F D^m costs one rounding per entry, hence the
    // ulp-scale bound instead of bitwise zero
    const double scale = s1.W.cwiseAbs().maxCoeff();
    REQUIRE(((s2.W - fdm) - 2.0 * (s1.W - fdm)).cwiseAbs().maxCoeff() <= 1e-15 * scale);
    REQUIRE((s2.G - 2.0 * s1.G).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assembly is additive in the term list", "[assemble]") {
    const PantographProblem p = load_golden("example3.pant");
    PantographProblem first = p, second = p;
    first.terms = {p.terms[0]};
    second.terms = {p.terms[1], p.terms[2]};

    const int n = 5;
    const Matrix fdm =
        basis_matrix(collocation_points(p.a, p.b, n), n) * matrix_power(derivative_matrix(n), p.order);
    const Matrix whole = assemble_fundamental(p, n).W;
    const Matrix part1 = assemble_fundamental(first, n).W;
    const Matrix part2 = assemble_fundamental(second, n).W;
    const double scale = whole.cwiseAbs().maxCoeff();
    REQUIRE((whole - (part1 + part2 - fdm)).cwiseAbs().maxCoeff() <= 1e-15 * scale);
}

TEST_CASE("assembly reports the failing term and point", "[assemble]") {
    PantographProblem p;
    p.order = 1;
    p.a = 0.0;
    p.b = 1.0;
    p.terms.push_back({0, Expr::parse("1/(x-0.5)"), 1.0, 0.0});
    p.g = Expr::parse("0");
    p.conditions.push_back({{{0, 1.0, 0.0}}, 0.0});
    try {
        assemble_fundamental(p, 3);  // grid {0, 0.5, 1} hits the pole
        FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
        REQUIRE(e.term_index == 0);
        REQUIRE(e.point == 0.5);
    }
}

TEST_CASE("condition rows", "[assemble]") {
    PantographProblem p;
    p.order = 2;
    p.a = 0.0;
    p.b = 1.0;
    p.g = Expr::parse("0");
    p.conditions.push_back({{{0, 1.0, 0.0}}, 0.0});   // y(0) = 0
    p.conditions.push_back({{{1, 1.0, 0.0}}, 0.0});   // y'(0) = 0

    const ConditionRows rows = condition_rows(p, 3);
    REQUIRE(rows.U.row(0) == fib_row(0.0, 3));
    Vector expect_dy(3);
    expect_dy << 0.0, 1.0, 0.0;
    REQUIRE(rows.U.row(1).transpose() == expect_dy);
    REQUIRE(rows.lambdas.isZero(0.0));

    PantographProblem q;
    q.order = 1;
    q.a = 0.0;
    q.b = 1.0;
    q.g = Expr::parse("0");
    q.conditions.push_back({{{0, 2.0, 0.0}, {0, 3.0, 1.0}}, 5.0});  // 2y(0) + 3y(1) = 5
    const ConditionRows mixed = condition_rows(q, 2);
    REQUIRE(mixed.U(0, 0) == 5.0);
    REQUIRE(mixed.U(0, 1) == 3.0);
    REQUIRE(mixed.lambdas(0) == 5.0);
}

TEST_CASE("applying conditions in both modes", "[assemble]") {
    const Matrix W = Matrix::Random(3, 3);
    const Vector G = Vector::Random(3);

    // replace-last with two conditions: rows 2 and 3 substituted, row 1 intact
    Matrix U(2, 3);
    U << 1, 0, 1, 0, 1, 0;
    Vector lam(2);
    lam << 4.0, 5.0;
    const LinearSystem rep = apply_conditions(W, G, U, lam, ConditionMode::ReplaceLast);
    REQUIRE(rep.replaced_rows == std::vector<int>{1, 2});
    REQUIRE(rep.W.row(0) == W.row(0));  // bit-for-bit
    REQUIRE(rep.G(0) == G(0));
    REQUIRE(rep.W.row(1) == U.row(0));
    REQUIRE(rep.W.row(2) == U.row(1));
    REQUIRE(rep.G(1) == 4.0);
    REQUIRE(rep.G(2) == 5.0);

    const LinearSystem app = apply_conditions(W, G, U, lam, ConditionMode::Append);
    REQUIRE(app.W.rows() == 5);
    REQUIRE(app.W.cols() == 3);
    REQUIRE(app.replaced_rows.empty());
    REQUIRE(app.W.topRows(3) == W);
    REQUIRE(app.W.bottomRows(2) == U);

    // no conditions: the system is unchanged
    const LinearSystem none = apply_conditions(W, G, Matrix(0, 3), Vector(0),
                                               ConditionMode::ReplaceLast);
    REQUIRE(none.W == W);
    REQUIRE(none.G == G);
    REQUIRE(none.replaced_rows.empty());
}
