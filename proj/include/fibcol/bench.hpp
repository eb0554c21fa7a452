#pragma once

#include "fibcol/problem.hpp"
#include "fibcol/solve.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fibcol {

/// Published table labels use the polynomial-degree convention: a column
/// labeled N was computed with N+1 basis polynomials collocated at N+1
/// points. The solver's truncation for a table label is therefore N+1.
inline int truncation_for_table_label(int n_label) { return n_label + 1; }

/// One cell of a reference table (absolute error of some method at x).
struct PaperCell {
    int table = 0;        // 1..3
    int example = 0;      // 1..3
    std::string method;   // "present", "taylor[16]", ...
    int n_label = 0;      // table column label
    double x = 0.0;
    double error = 0.0;
};

/// Reads the bundled paper_tables.csv (reference values from the paper;
/// never recomputed). Columns: table,example,method,n,x,error.
inline std::vector<PaperCell> load_paper_tables(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reference table file: " + path);
    std::vector<PaperCell> cells;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // skip the column-name row
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        PaperCell c;
        std::getline(row, field, ',');
        c.table = std::stoi(field);
        std::getline(row, field, ',');
        c.example = std::stoi(field);
        std::getline(row, c.method, ',');
        std::getline(row, field, ',');
        c.n_label = std::stoi(field);
        std::getline(row, field, ',');
        c.x = std::stod(field);
        std::getline(row, field, ',');
        c.error = std::stod(field);
        cells.push_back(std::move(c));
    }
    if (cells.empty()) throw std::runtime_error("reference table file is empty: " + path);
    return cells;
}

inline const std::vector<double>& table_abscissae() {
    static const std::vector<double> xs = {0.2, 0.4, 0.6, 0.8, 1.0};
    return xs;
}

struct BenchCell {
    double x = 0.0;
    double error = 0.0;
};

/// Absolute errors |y_n(x) - y_exact(x)| for a table label (solved at
/// truncation n_label + 1). Requires the problem to carry an exact solution.
inline std::vector<BenchCell> bench_errors(const PantographProblem& p, int n_label,
                                           const std::vector<double>& xs = table_abscissae(),
                                           const SolveOptions& opt = {}) {
    if (!p.exact) throw std::invalid_argument("bench: problem has no exact solution");
    const FibSolution sol = solve_problem(p, truncation_for_table_label(n_label), opt);
    const DerivativePowers powers(sol.n, 0);
    std::vector<BenchCell> out;
    out.reserve(xs.size());
    for (const double x : xs)
        out.push_back({x, std::abs(sol.eval(x, 0, powers) - (*p.exact)(x))});
    return out;
}

/// Reference cells for one (table, method, n_label) column, ordered by x.
inline std::vector<PaperCell> table_column(const std::vector<PaperCell>& cells, int table,
                                           const std::string& method, int n_label) {
    std::vector<PaperCell> out;
    for (const auto& c : cells)
        if (c.table == table && c.method == method && c.n_label == n_label) out.push_back(c);
    std::sort(out.begin(), out.end(),
              [](const PaperCell& a, const PaperCell& b) { return a.x < b.x; });
    return out;
}

/// Distinct (method, n_label) columns of a table, "present" first.
inline std::vector<std::pair<std::string, int>> table_columns(
    const std::vector<PaperCell>& cells, int table) {
    std::vector<std::pair<std::string, int>> cols;
    for (const auto& c : cells) {
        if (c.table != table) continue;
        const auto key = std::make_pair(c.method, c.n_label);
        if (std::find(cols.begin(), cols.end(), key) == cols.end()) cols.push_back(key);
    }
    std::stable_sort(cols.begin(), cols.end(), [](const auto& a, const auto& b) {
        return (a.first == "present") > (b.first == "present");
    });
    return cols;
}

/// Table ids published for an example (1 has none; 2 has tables 1-2; 3 has 3).
inline std::vector<int> tables_for_example(const std::vector<PaperCell>& cells, int example) {
    std::vector<int> out;
    for (const auto& c : cells)
        if (c.example == example && std::find(out.begin(), out.end(), c.table) == out.end())
            out.push_back(c.table);
    std::sort(out.begin(), out.end());
    return out;
}

/// Present-method labels of a table (the truncations the example is run at).
inline std::vector<int> present_labels(const std::vector<PaperCell>& cells, int table) {
    std::vector<int> out;
    for (const auto& c : cells)
        if (c.table == table && c.method == "present" &&
            std::find(out.begin(), out.end(), c.n_label) == out.end())
            out.push_back(c.n_label);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fibcol
