#pragma once

#include "fibcol/expr.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fibcol {

/// One functional term p(x) * y^(k)(alpha*x + beta) of the right-hand side.
struct FunctionalTerm {
    int k = 0;
    Expr p;
    double alpha = 1.0;
    double beta = 0.0;
};

/// One summand c * y^(k)(mu) of a mixed condition.
struct ConditionTerm {
    int k = 0;
    double c = 1.0;
    double mu = 0.0;
};

/// Mixed condition: sum of terms equals lambda.
struct Condition {
    std::vector<ConditionTerm> terms;
    double lambda = 0.0;
};

/// y^(m)(x) = sum of functional terms + g(x) on [a, b], with m conditions.
struct PantographProblem {
    int order = 1;
    double a = 0.0;
    double b = 1.0;
    std::vector<FunctionalTerm> terms;
    Expr g;
    std::vector<Condition> conditions;
    std::optional<Expr> exact;       // benchmarking only
    std::optional<int> default_n;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string where;    // field path or module location
    std::string message;
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

inline std::string render(const Diagnostic& d) {
    std::string s = d.severity == Severity::Error ? "error" : "warning";
    if (!d.where.empty()) s += " at " + d.where;
    return s + ": " + d.message;
}

/// Structural checks for a problem at truncation n. Returns diagnostics,
/// never throws. Functional arguments escaping [a, b] are a warning only:
/// the basis is globally defined, but conditioning may degrade.
inline std::vector<Diagnostic> validate(const PantographProblem& p, int n) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string where, std::string msg) {
        out.push_back({Severity::Error, std::move(where), std::move(msg)});
    };
    auto warning = [&](std::string where, std::string msg) {
        out.push_back({Severity::Warning, std::move(where), std::move(msg)});
    };

    const int m = p.order;
    if (m < 1) error("order", "order must be a positive integer");
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || p.a >= p.b)
        error("interval", "interval must satisfy a < b with finite endpoints");
    if (m >= 1 && m + 1 > n)
        error("N", "m+1 <= N violated: order " + std::to_string(m) + " needs N >= " +
                       std::to_string(m + 1) + ", got " + std::to_string(n));
    if (static_cast<int>(p.conditions.size()) != m && m >= 1)
        error("conditions", "expected exactly " + std::to_string(m) + " conditions, got " +
                                std::to_string(p.conditions.size()));
    if (p.g.empty()) error("g", "forcing expression is missing");

    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        const auto& term = p.terms[t];
        const std::string where = "terms[" + std::to_string(t) + "]";
        if (term.k < 0 || term.k >= m)
            error(where + ".k", "derivative order k must satisfy 0 <= k <= m-1");
        if (!std::isfinite(term.alpha) || !std::isfinite(term.beta))
            error(where, "alpha and beta must be finite");
        if (term.p.empty()) error(where + ".p", "coefficient expression is missing");
        if (std::isfinite(term.alpha) && std::isfinite(term.beta) && p.a < p.b) {
            const double lo = std::min(term.alpha * p.a + term.beta, term.alpha * p.b + term.beta);
            const double hi = std::max(term.alpha * p.a + term.beta, term.alpha * p.b + term.beta);
            const double tol = 1e-12 * (1.0 + std::abs(p.a) + std::abs(p.b));
            if (lo < p.a - tol || hi > p.b + tol)
                warning(where, "functional argument leaves [a,b]: image is [" +
                                   format_double(lo) + ", " + format_double(hi) + "]");
        }
    }

    for (std::size_t r = 0; r < p.conditions.size(); ++r) {
        const auto& cond = p.conditions[r];
        const std::string where = "conditions[" + std::to_string(r) + "]";
        if (cond.terms.empty()) error(where, "condition has no terms");
        if (!std::isfinite(cond.lambda)) error(where + ".lambda", "lambda must be finite");
        for (std::size_t t = 0; t < cond.terms.size(); ++t) {
            const auto& ct = cond.terms[t];
            const std::string w = where + ".terms[" + std::to_string(t) + "]";
            if (ct.k < 0 || ct.k >= m)
                error(w + ".k", "derivative order k must satisfy 0 <= k <= m-1");
            if (!std::isfinite(ct.c)) error(w + ".c", "coefficient must be finite");
            if (!std::isfinite(ct.mu) || ct.mu < p.a || ct.mu > p.b)
                error(w + ".mu", "evaluation point mu must lie in [a,b]");
        }
    }
    return out;
}

struct LoadResult {
    std::optional<PantographProblem> problem;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return problem.has_value(); }
};

namespace detail {

inline bool expect_fields(const nlohmann::json& j, const std::string& where,
                          std::initializer_list<const char*> known,
                          std::vector<Diagnostic>& out) {
    bool ok = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return it.key() == k;
            }) == known.end()) {
            out.push_back({Severity::Error, where, "unknown field '" + it.key() + "'"});
            ok = false;
        }
    }
    return ok;
}

inline std::optional<Expr> parse_field_expr(const nlohmann::json& j, const std::string& where,
                                            std::vector<Diagnostic>& out) {
    if (!j.is_string()) {
        out.push_back({Severity::Error, where, "expected an expression string"});
        return std::nullopt;
    }
    try {
        return Expr::parse(j.get<std::string>());
    } catch (const ParseError& e) {
        out.push_back({Severity::Error, where + " (offset " + std::to_string(e.offset) + ")",
                       e.what()});
        return std::nullopt;
    }
}

inline std::optional<double> get_number(const nlohmann::json& j, const char* field,
                                        const std::string& where, std::vector<Diagnostic>& out) {
    if (!j.contains(field)) {
        out.push_back({Severity::Error, where, std::string("missing required field '") + field +
                                                   "'"});
        return std::nullopt;
    }
    if (!j[field].is_number()) {
        out.push_back({Severity::Error, where + "." + field, "expected a number"});
        return std::nullopt;
    }
    return j[field].get<double>();
}

}  // namespace detail

/// Parse and expression-compile a UTF-8 JSON problem file. On success the
/// returned problem has passed validate() with n = the file's N (or the
/// minimal legal truncation when N is absent); warnings are still reported.
inline LoadResult load_problem(std::string_view text) {
    using nlohmann::json;
    LoadResult res;
    auto& out = res.diagnostics;

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        out.push_back({Severity::Error, "byte " + std::to_string(e.byte), e.what()});
        return res;
    }
    if (!j.is_object()) {
        out.push_back({Severity::Error, "", "problem file must be a JSON object"});
        return res;
    }

    detail::expect_fields(j, "", {"order", "interval", "terms", "g", "conditions", "exact", "N"},
                          out);

    PantographProblem p;

    if (!j.contains("order") || !j["order"].is_number_integer())
        out.push_back({Severity::Error, "order", "missing or non-integer field 'order'"});
    else
        p.order = j["order"].get<int>();

    if (!j.contains("interval") || !j["interval"].is_array() || j["interval"].size() != 2 ||
        !j["interval"][0].is_number() || !j["interval"][1].is_number()) {
        out.push_back({Severity::Error, "interval", "expected field 'interval' as [a, b]"});
    } else {
        p.a = j["interval"][0].get<double>();
        p.b = j["interval"][1].get<double>();
    }

    if (j.contains("terms")) {
        if (!j["terms"].is_array()) {
            out.push_back({Severity::Error, "terms", "expected an array of functional terms"});
        } else {
            for (std::size_t i = 0; i < j["terms"].size(); ++i) {
                const auto& jt = j["terms"][i];
                const std::string where = "terms[" + std::to_string(i) + "]";
                if (!jt.is_object()) {
                    out.push_back({Severity::Error, where, "expected an object"});
                    continue;
                }
                detail::expect_fields(jt, where, {"k", "p", "alpha", "beta"}, out);
                FunctionalTerm t;
                if (auto k = detail::get_number(jt, "k", where, out)) t.k = static_cast<int>(*k);
                if (auto a = detail::get_number(jt, "alpha", where, out)) t.alpha = *a;
                if (auto b = detail::get_number(jt, "beta", where, out)) t.beta = *b;
                if (!jt.contains("p"))
                    out.push_back({Severity::Error, where, "missing required field 'p'"});
                else if (auto e = detail::parse_field_expr(jt["p"], where + ".p", out))
                    t.p = *e;
                p.terms.push_back(std::move(t));
            }
        }
    }

    if (!j.contains("g"))
        out.push_back({Severity::Error, "g", "missing required field 'g'"});
    else if (auto e = detail::parse_field_expr(j["g"], "g", out))
        p.g = *e;

    if (!j.contains("conditions") || !j["conditions"].is_array()) {
        out.push_back({Severity::Error, "conditions", "missing field 'conditions' (array)"});
    } else {
        for (std::size_t r = 0; r < j["conditions"].size(); ++r) {
            const auto& jc = j["conditions"][r];
            const std::string where = "conditions[" + std::to_string(r) + "]";
            if (!jc.is_object()) {
                out.push_back({Severity::Error, where, "expected an object"});
                continue;
            }
            detail::expect_fields(jc, where, {"terms", "lambda"}, out);
            Condition c;
            if (auto l = detail::get_number(jc, "lambda", where, out)) c.lambda = *l;
            if (!jc.contains("terms") || !jc["terms"].is_array()) {
                out.push_back({Severity::Error, where, "missing field 'terms' (array)"});
            } else {
                for (std::size_t t = 0; t < jc["terms"].size(); ++t) {
                    const auto& jct = jc["terms"][t];
                    const std::string w = where + ".terms[" + std::to_string(t) + "]";
                    if (!jct.is_object()) {
                        out.push_back({Severity::Error, w, "expected an object"});
                        continue;
                    }
                    detail::expect_fields(jct, w, {"k", "c", "mu"}, out);
                    ConditionTerm ct;
                    if (auto k = detail::get_number(jct, "k", w, out)) ct.k = static_cast<int>(*k);
                    if (auto cv = detail::get_number(jct, "c", w, out)) ct.c = *cv;
                    if (auto mu = detail::get_number(jct, "mu", w, out)) ct.mu = *mu;
                    c.terms.push_back(ct);
                }
            }
            p.conditions.push_back(std::move(c));
        }
    }

    if (j.contains("exact")) {
        if (auto e = detail::parse_field_expr(j["exact"], "exact", out)) p.exact = *e;
    }
    if (j.contains("N")) {
        if (!j["N"].is_number_integer() || j["N"].get<int>() < 1)
            out.push_back({Severity::Error, "N", "expected a positive integer"});
        else
            p.default_n = j["N"].get<int>();
    }

    if (has_errors(out)) return res;

    const int n_check = p.default_n.value_or(p.order + 1);
    auto vd = validate(p, n_check);
    out.insert(out.end(), vd.begin(), vd.end());
    if (has_errors(out)) return res;

    res.problem = std::move(p);
    return res;
}

/// Serialize back to the problem-file format; load_problem(save_problem(p))
/// reproduces p structurally.
inline std::string save_problem(const PantographProblem& p) {
    using nlohmann::json;
    json j;
    j["order"] = p.order;
    j["interval"] = {p.a, p.b};
    j["terms"] = json::array();
    for (const auto& t : p.terms)
        j["terms"].push_back(
            {{"k", t.k}, {"p", t.p.str()}, {"alpha", t.alpha}, {"beta", t.beta}});
    j["g"] = p.g.str();
    j["conditions"] = json::array();
    for (const auto& c : p.conditions) {
        json jc;
        jc["terms"] = json::array();
        for (const auto& ct : c.terms)
            jc["terms"].push_back({{"k", ct.k}, {"c", ct.c}, {"mu", ct.mu}});
        jc["lambda"] = c.lambda;
        j["conditions"].push_back(std::move(jc));
    }
    if (p.exact) j["exact"] = p.exact->str();
    if (p.default_n) j["N"] = *p.default_n;
    return j.dump(2) + "\n";
}

}  // namespace fibcol
