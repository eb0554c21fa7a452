#include "fibcol/bench.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <fstream>
#include <random>
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

std::vector<PaperCell> tables() {
    return load_paper_tables(std::string(FIBCOL_DATA_DIR) + "/paper_tables.csv");
}

}  // namespace

TEST_CASE("reference tables load and are complete", "[bench]") {
    const auto cells = tables();
    REQUIRE(cells.size() == 65);
    REQUIRE(tables_for_example(cells, 1).empty());
    REQUIRE(tables_for_example(cells, 2) == std::vector<int>{1, 2});
    REQUIRE(tables_for_example(cells, 3) == std::vector<int>{3});
    REQUIRE(present_labels(cells, 1) == std::vector<int>{5});
    REQUIRE(present_labels(cells, 3) == std::vector<int>{5, 9, 12});

    const auto col = table_column(cells, 1, "present", 5);
    REQUIRE(col.size() == 5);
    REQUIRE(col.front().x == 0.2);
    REQUIRE(col.front().error == 0.2553e-5);
    REQUIRE(col.back().error == 0.2690e-4);

    const auto cols = table_columns(cells, 1);
    REQUIRE(cols.size() == 3);
    REQUIRE(cols.front().first == "present");
}

TEST_CASE("second benchmark reproduces its published column", "[bench]") {
    const auto cells = tables();
    const PantographProblem p = load_golden("example2.pant");
    const auto computed = bench_errors(p, 5);
    const auto reference = table_column(cells, 1, "present", 5);
    REQUIRE(computed.size() == reference.size());
    for (std::size_t i = 0; i < computed.size(); ++i) {
        REQUIRE(computed[i].x == reference[i].x);
        const double ratio = computed[i].error / reference[i].error;
        INFO("x = " << computed[i].x << ", computed " << computed[i].error << " vs published "
                    << reference[i].error);
        REQUIRE(ratio >= 0.1);
        REQUIRE(ratio <= 10.0);
    }
}

TEST_CASE("third benchmark reproduces both published columns", "[bench]") {
    const auto cells = tables();
    const PantographProblem p = load_golden("example3.pant");
    for (const int label : {5, 9}) {
        const auto computed = bench_errors(p, label);
        const auto reference = table_column(cells, 3, "present", label);
        for (std::size_t i = 0; i < computed.size(); ++i) {
            const double ratio = computed[i].error / reference[i].error;
            INFO("label N=" << label << ", x = " << computed[i].x);
            REQUIRE(ratio >= 0.1);
            REQUIRE(ratio <= 10.0);
        }
    }
    // the N=12 column sits at rounding scale; magnitudes only
    for (const auto& cell : bench_errors(p, 12)) REQUIRE(cell.error <= 1e-11);
}

TEST_CASE("first benchmark is exact at every label", "[bench]") {
    const PantographProblem p = load_golden("example1.pant");
    for (const auto& cell : bench_errors(p, 3)) REQUIRE(cell.error <= 1e-12);
}

TEST_CASE("table label maps to one extra basis function", "[bench]") {
    REQUIRE(truncation_for_table_label(5) == 6);
    const PantographProblem p = load_golden("example2.pant");
    const auto via_bench = bench_errors(p, 5);
    const FibSolution direct = solve_problem(p, 6);
    REQUIRE(via_bench[0].error ==
            std::abs(direct.eval(0.2) - std::exp(0.2)));
}

TEST_CASE("round-trip decimal formatting", "[bench]") {
    std::mt19937_64 rng(991133);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        double v = dist(rng);
        if (i % 7 == 0) v = std::exp(dist(rng) / 1e5);  // vary the scale
        const std::string s = format_double(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc());
        REQUIRE(back == v);
    }
}
