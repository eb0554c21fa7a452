// Command-line front end: problem ingestion, solving, residual analysis,
// reference integration, and benchmark-table regeneration.

#include "fibcol/fibcol.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

using namespace fibcol;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// full round-trip precision unless --digits asked for less
std::string fmt(double v, int digits) {
    if (digits <= 0) return format_double(v);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

void print_diagnostics(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) std::cerr << render(d) << "\n";
}

PantographProblem load_or_fail(const std::string& path) {
    const LoadResult res = load_problem(read_file(path));
    print_diagnostics(res.diagnostics);
    if (!res.ok()) throw std::runtime_error("failed to load problem file: " + path);
    return *res.problem;
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    }
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::cout << row[c];
            if (c + 1 < row.size())
                std::cout << std::string(width[c] - row[c].size() + 2, ' ');
        }
        std::cout << "\n";
    }
}

void print_csv(const std::vector<std::vector<std::string>>& rows) {
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) std::cout << ",";
            std::cout << row[c];
        }
        std::cout << "\n";
    }
}

std::vector<double> uniform_grid(double a, double b, int count) {
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        xs[static_cast<std::size_t>(i)] = count == 1 ? a : a + (b - a) * i / (count - 1);
    if (count > 1) xs.back() = b;
    return xs;
}

struct CommonOpts {
    std::string out = "table";  // table | csv | json
    int digits = 0;
};

int pick_truncation(const PantographProblem& p, int flag_n) {
    if (flag_n > 0) return flag_n;
    if (p.default_n) return *p.default_n;
    return 9;
}

// ---- solve ---------------------------------------------------------------

int cmd_solve(const std::string& file, int flag_n, const std::string& cond_mode,
              int grid_count, const std::string& dump_path, const CommonOpts& o) {
    const PantographProblem p = load_or_fail(file);
    const int n = pick_truncation(p, flag_n);
    SolveOptions opt;
    opt.conditions = cond_mode == "append" ? ConditionMode::Append
                                           : ConditionMode::ReplaceLast;
    const FibSolution sol = solve_problem(p, n, opt);

    if (!dump_path.empty()) {
        const LinearSystem sys = build_system(p, n, opt);
        std::ofstream out(dump_path);
        if (!out) throw std::runtime_error("cannot write: " + dump_path);
        for (Eigen::Index i = 0; i < sys.W.rows(); ++i) {
            for (Eigen::Index j = 0; j < sys.W.cols(); ++j)
                out << format_double(sys.W(i, j)) << ",";
            out << format_double(sys.G(i)) << "\n";
        }
    }

    const std::vector<double> xs = uniform_grid(p.a, p.b, grid_count);
    const DerivativePowers powers(n, 0);

    if (o.out == "json") {
        nlohmann::json j;
        j["n"] = sol.n;
        j["mode"] = to_string(sol.mode);
        j["condition_estimate"] = sol.condition_estimate;
        j["coefficients"] = std::vector<double>(sol.a().begin(), sol.a().end());
        j["rows"] = nlohmann::json::array();
        for (const double x : xs) {
            nlohmann::json row;
            row["x"] = x;
            row["y"] = sol.eval(x, 0, powers);
            if (p.exact) {
                row["y_exact"] = (*p.exact)(x);
                row["abs_error"] = std::abs(sol.eval(x, 0, powers) - (*p.exact)(x));
            }
            j["rows"].push_back(std::move(row));
        }
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header = {"x", "y_approx"};
    if (p.exact) {
        header.push_back("y_exact");
        header.push_back("abs_error");
    }
    rows.push_back(header);
    for (const double x : xs) {
        const double y = sol.eval(x, 0, powers);
        std::vector<std::string> row = {fmt(x, o.digits), fmt(y, o.digits)};
        if (p.exact) {
            const double ye = (*p.exact)(x);
            row.push_back(fmt(ye, o.digits));
            row.push_back(fmt(std::abs(y - ye), o.digits));
        }
        rows.push_back(std::move(row));
    }
    if (o.out == "csv") {
        print_csv(rows);
    } else {
        print_table(rows);
        std::cout << "n = " << sol.n << ", mode = " << to_string(sol.mode)
                  << ", condition estimate = " << fmt(sol.condition_estimate, 3) << "\n";
    }
    return kExitOk;
}

// ---- residual ------------------------------------------------------------

int cmd_residual(const std::string& file, int flag_n, bool dense, const CommonOpts& o) {
    const PantographProblem p = load_or_fail(file);
    const int n = pick_truncation(p, flag_n);
    const FibSolution sol = solve_problem(p, n);

    struct Block {
        const char* label;
        ResidualReport rep;
    };
    std::vector<Block> blocks;
    blocks.push_back({"collocation", residual(p, sol, collocation_points(p.a, p.b, n).points)});
    if (dense)
        blocks.push_back({"dense", residual(p, sol, uniform_grid(p.a, p.b, 10 * (n - 1) + 1))});

    for (const auto& b : blocks)
        for (const auto& f : b.rep.failures)
            std::cerr << "residual evaluation failed at grid point " << f.index << ": "
                      << f.message << "\n";

    if (o.out == "json") {
        nlohmann::json j;
        j["n"] = n;
        for (const auto& b : blocks) {
            nlohmann::json jb;
            jb["grid"] = b.rep.grid;
            jb["E"] = b.rep.E;
            jb["max_E"] = b.rep.max_E;
            j[b.label] = std::move(jb);
        }
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"grid", "x", "E"});
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < b.rep.grid.size(); ++i)
            rows.push_back({b.label, fmt(b.rep.grid[i], o.digits), fmt(b.rep.E[i], o.digits)});
    if (o.out == "csv") {
        print_csv(rows);
    } else {
        print_table(rows);
        for (const auto& b : blocks)
            std::cout << "max E (" << b.label << ") = " << fmt(b.rep.max_E, o.digits)
                      << " at n = " << n << "\n";
    }
    return kExitOk;
}

// ---- adapt ---------------------------------------------------------------

int cmd_adapt(const std::string& file, double tol, int n0_flag, int nmax,
              const std::string& cond_mode, const CommonOpts& o) {
    const PantographProblem p = load_or_fail(file);
    SolveOptions opt;
    opt.conditions = cond_mode == "append" ? ConditionMode::Append
                                           : ConditionMode::ReplaceLast;
    const int n0 = n0_flag > 0 ? n0_flag : std::max(3, p.order + 1);
    const AdaptiveResult res = adaptive_solve(p, tol, n0, nmax, opt);

    if (o.out == "json") {
        nlohmann::json j;
        j["converged"] = res.converged;
        j["n"] = res.solution.n;
        j["max_E"] = res.report.max_E;
        j["history"] = nlohmann::json::array();
        for (const auto& h : res.history)
            j["history"].push_back({{"n", h.n}, {"max_E", h.max_E}});
        std::cout << j.dump(2) << "\n";
        return res.converged ? kExitOk : kExitFailure;
    }

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"n", "max_E"});
    for (const auto& h : res.history)
        rows.push_back({std::to_string(h.n), fmt(h.max_E, o.digits)});
    if (o.out == "csv")
        print_csv(rows);
    else
        print_table(rows);
    std::cout << (res.converged ? "converged" : "NOT converged") << " at n = "
              << res.solution.n << " with max E = " << fmt(res.report.max_E, o.digits)
              << " (tol " << fmt(tol, o.digits) << ")\n";
    return res.converged ? kExitOk : kExitFailure;
}

// ---- oracle --------------------------------------------------------------

int cmd_oracle(const std::string& file, double h, const CommonOpts& o) {
    const PantographProblem p = load_or_fail(file);
    const DenseTrajectory traj = integrate_reference(p, h);

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"x", "y", "y_prime"});
    for (std::size_t i = 0; i <= traj.steps(); ++i)
        rows.push_back({fmt(traj.node(i), o.digits), fmt(traj.value_at_node(i), o.digits),
                        fmt(traj.slope_at_node(i), o.digits)});
    if (o.out == "table")
        print_table(rows);
    else
        print_csv(rows);
    return kExitOk;
}

// ---- basis ---------------------------------------------------------------

int cmd_basis(int n, const CommonOpts&) {
    const auto mono = fib_monomials(n);
    std::cout << "# Fibonacci polynomials as monomial coefficient rows (x^0 .. x^" << n - 1
              << ")\n";
    for (int r = 0; r < n; ++r) {
        std::cout << "F_" << r + 1;
        const auto& row = mono[static_cast<std::size_t>(r)];
        for (int d = 0; d < n; ++d) {
            const long long c =
                d < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(d)] : 0;
            std::cout << "," << c;
        }
        std::cout << "\n";
    }
    std::cout << "# derivative operational matrix D (" << n << " x " << n
              << ", integer entries)\n";
    const OperationalMatrix D = derivative_matrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j) std::cout << ",";
            std::cout << static_cast<long long>(D.d(i, j));
        }
        std::cout << "\n";
    }
    return kExitOk;
}

// ---- expr ----------------------------------------------------------------

int cmd_expr_eval(const std::string& source, double x, const CommonOpts& o) {
    const Expr e = Expr::parse(source);
    std::cout << fmt(e(x), o.digits) << "\n";
    return kExitOk;
}

// ---- bench ---------------------------------------------------------------

const char* golden_name(int example) {
    switch (example) {
        case 1: return "example1.pant";
        case 2: return "example2.pant";
        case 3: return "example3.pant";
        default: throw std::runtime_error("bench: unknown example id");
    }
}

int cmd_bench(const std::string& which, std::vector<int> labels, const std::string& data_dir,
              const CommonOpts& o) {
    std::vector<int> examples;
    if (which == "all") {
        examples = {1, 2, 3};
    } else {
        const int id = std::stoi(which);
        if (id < 1 || id > 3) throw std::runtime_error("bench: example id must be 1..3");
        examples = {id};
    }
    const auto cells = load_paper_tables(data_dir + "/paper_tables.csv");

    std::vector<std::vector<std::string>> csv_rows;
    csv_rows.push_back({"example", "table", "x", "method", "n_label", "truncation", "source",
                        "abs_error"});

    for (const int ex : examples) {
        const PantographProblem p = load_or_fail(data_dir + "/" + golden_name(ex));
        const auto table_ids = tables_for_example(cells, ex);

        if (table_ids.empty()) {
            // no published table; print computed errors only
            const std::vector<int> use = labels.empty() ? std::vector<int>{3} : labels;
            for (const int label : use) {
                const int n = truncation_for_table_label(label);
                std::vector<std::vector<std::string>> rows;
                if (o.out != "csv")
                    std::cout << "Example " << ex << " (no published table; computed errors, "
                              << "table label N=" << label << " -> truncation n=" << n << ")\n";
                rows.push_back({"x", "|y_n - y_exact|"});
                for (const auto& cell : bench_errors(p, label)) {
                    rows.push_back({fmt(cell.x, o.digits), fmt(cell.error, o.digits)});
                    csv_rows.push_back({std::to_string(ex), "-", fmt(cell.x, 0), "present",
                                        std::to_string(label), std::to_string(n), "computed",
                                        fmt(cell.error, 0)});
                }
                if (o.out != "csv") {
                    print_table(rows);
                    std::cout << "\n";
                }
            }
            continue;
        }

        for (const int table : table_ids) {
            const std::vector<int> use = labels.empty() ? present_labels(cells, table) : labels;
            std::vector<std::vector<std::string>> rows;
            std::vector<std::string> header = {"x"};
            for (const int label : use)
                header.push_back("computed n=" + std::to_string(truncation_for_table_label(label)) +
                                 " (N=" + std::to_string(label) + ")");
            for (const auto& col : table_columns(cells, table))
                header.push_back(col.first + " N=" + std::to_string(col.second) + " (paper)");
            rows.push_back(std::move(header));

            std::vector<std::vector<BenchCell>> computed;
            computed.reserve(use.size());
            for (const int label : use) computed.push_back(bench_errors(p, label));

            const auto& xs = table_abscissae();
            for (std::size_t i = 0; i < xs.size(); ++i) {
                std::vector<std::string> row = {fmt(xs[i], o.digits)};
                for (std::size_t c = 0; c < use.size(); ++c) {
                    row.push_back(fmt(computed[c][i].error, o.digits));
                    csv_rows.push_back({std::to_string(ex), std::to_string(table),
                                        fmt(xs[i], 0), "present", std::to_string(use[c]),
                                        std::to_string(truncation_for_table_label(use[c])),
                                        "computed", fmt(computed[c][i].error, 0)});
                }
                for (const auto& col : table_columns(cells, table)) {
                    const auto column = table_column(cells, table, col.first, col.second);
                    row.push_back(fmt(column[i].error, o.digits));
                    csv_rows.push_back({std::to_string(ex), std::to_string(table), fmt(xs[i], 0),
                                        col.first, std::to_string(col.second), "-", "paper",
                                        fmt(column[i].error, 0)});
                }
                rows.push_back(std::move(row));
            }

            if (o.out != "csv") {
                std::cout << "Example " << ex << " - Table " << table
                          << " (absolute errors; columns marked \"paper\" are reference "
                             "values from the paper, table label N -> truncation n=N+1)\n";
                print_table(rows);
                std::cout << "\n";
            }
        }
    }

    if (o.out == "csv") print_csv(csv_rows);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fibonacci-polynomial collocation for generalized pantograph equations"};
    app.require_subcommand(1);

    auto add_common = [](CLI::App* cmd, CommonOpts& o, bool json_ok = true) {
        cmd->add_option("--out", o.out, "output format")
            ->check(CLI::IsMember(json_ok
                                      ? std::vector<std::string>{"table", "csv", "json"}
                                      : std::vector<std::string>{"table", "csv"}));
        cmd->add_option("--digits", o.digits,
                        "significant digits (default: full round-trip precision)");
    };

    // solve
    std::string solve_file, solve_cond = "replace", solve_dump;
    int solve_n = 0, solve_grid = 11;
    CommonOpts solve_opts;
    CLI::App* solve = app.add_subcommand("solve", "solve a problem file");
    solve->add_option("file", solve_file, "problem file (.pant)")->required();
    solve->add_option("--n", solve_n, "truncation (default: file's N, else 9)");
    solve->add_option("--conditions", solve_cond, "condition handling")
        ->check(CLI::IsMember({"replace", "append"}));
    solve->add_option("--grid", solve_grid, "output grid point count")->default_val(11);
    solve->add_option("--dump-system", solve_dump, "write [W* : G*] as CSV to this path");
    add_common(solve, solve_opts);

    // residual
    std::string res_file;
    int res_n = 0;
    bool res_dense = false;
    CommonOpts res_opts;
    CLI::App* res = app.add_subcommand("residual", "defect of the computed solution");
    res->add_option("file", res_file)->required();
    res->add_option("--n", res_n, "truncation (default: file's N, else 9)");
    res->add_flag("--dense", res_dense, "also report on a 10x denser uniform grid");
    add_common(res, res_opts);

    // adapt
    std::string adapt_file, adapt_cond = "replace";
    double adapt_tol = 1e-8;
    int adapt_n0 = 0, adapt_nmax = 32;
    CommonOpts adapt_opts;
    CLI::App* adapt = app.add_subcommand("adapt", "increase truncation until the defect is small");
    adapt->add_option("file", adapt_file)->required();
    adapt->add_option("--tol", adapt_tol, "target max defect")->required();
    adapt->add_option("--n0", adapt_n0, "starting truncation (default max(3, m+1))");
    adapt->add_option("--nmax", adapt_nmax, "truncation limit")->default_val(32);
    adapt->add_option("--conditions", adapt_cond)->check(CLI::IsMember({"replace", "append"}));
    add_common(adapt, adapt_opts);

    // oracle
    std::string oracle_file;
    double oracle_h = 1e-3;
    CommonOpts oracle_opts;
    oracle_opts.out = "csv";
    CLI::App* oracle = app.add_subcommand("oracle", "reference trajectory by dense RK4");
    oracle->set_help_flag("--help", "print help");  // frees -h for the step-size flag
    oracle->add_option("file", oracle_file)->required();
    oracle->add_option("--h", oracle_h, "step size")->default_val(1e-3);
    add_common(oracle, oracle_opts, false);

    // basis
    int basis_n = 8;
    CommonOpts basis_opts;
    CLI::App* basis = app.add_subcommand("basis", "dump basis polynomials and D as CSV");
    basis->add_option("--n", basis_n, "truncation")->default_val(8);

    // expr eval
    std::string expr_src;
    double expr_x = 0.0;
    CommonOpts expr_opts;
    CLI::App* expr = app.add_subcommand("expr", "expression utilities");
    expr->require_subcommand(1);
    CLI::App* expr_eval = expr->add_subcommand("eval", "evaluate an expression at a point");
    expr_eval->add_option("expression", expr_src)->required();
    expr_eval->add_option("--x", expr_x, "evaluation point")->default_val(0.0);
    add_common(expr_eval, expr_opts);

    // bench
    std::string bench_which = "all", bench_data = "data";
    std::vector<int> bench_labels;
    CommonOpts bench_opts;
    CLI::App* bench = app.add_subcommand("bench", "reproduce the published error tables");
    bench->add_option("example", bench_which, "example id 1..3, or 'all'")->default_val("all");
    bench->add_option("--n", bench_labels, "table labels N to run (default: the published ones)");
    bench->add_option("--data", bench_data, "directory with golden files")->default_val("data");
    add_common(bench, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed())
            return cmd_solve(solve_file, solve_n, solve_cond, solve_grid, solve_dump, solve_opts);
        if (res->parsed()) return cmd_residual(res_file, res_n, res_dense, res_opts);
        if (adapt->parsed())
            return cmd_adapt(adapt_file, adapt_tol, adapt_n0, adapt_nmax, adapt_cond, adapt_opts);
        if (oracle->parsed()) return cmd_oracle(oracle_file, oracle_h, oracle_opts);
        if (basis->parsed()) return cmd_basis(basis_n, basis_opts);
        if (expr->parsed()) return cmd_expr_eval(expr_src, expr_x, expr_opts);
        if (bench->parsed()) return cmd_bench(bench_which, bench_labels, bench_data, bench_opts);
    } catch (const ValidationError& e) {
        print_diagnostics(e.diagnostics);
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
