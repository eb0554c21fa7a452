#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fibcol {

/// First grammar violation in an expression source text.
struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(std::size_t off, const std::string& msg)
        : std::runtime_error(msg + " (offset " + std::to_string(off) + ")"), offset(off) {}
};

/// Evaluation left the real domain (divide by zero, ln/sqrt of a negative
/// argument, fractional power of a negative base, non-finite result).
struct EvalError : std::runtime_error {
    std::size_t offset;      // byte offset of the offending subexpression
    std::string subexpr;     // its pretty-printed form
    EvalError(std::size_t off, std::string sub, const std::string& msg)
        : std::runtime_error(msg + " in `" + sub + "`"), offset(off), subexpr(std::move(sub)) {}
};

enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };
enum class Builtin : std::uint8_t { Exp, Sin, Cos, Ln, Sqrt };

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Immutable single-variable arithmetic expression. Nodes live in a flat
/// arena; copying an Expr copies the arena (value semantics).
class Expr {
public:
    enum class Kind : std::uint8_t { Number, Var, ConstPi, ConstE, Neg, Binary, Call };

    struct Node {
        Kind kind;
        double number = 0.0;       // Kind::Number
        BinaryOp op = BinaryOp::Add;
        Builtin fn = Builtin::Exp;
        int lhs = -1;
        int rhs = -1;
        std::uint32_t offset = 0;  // source byte offset, diagnostics only
    };

    Expr() = default;

    bool empty() const { return root_ < 0; }

    static Expr parse(std::string_view source);

    double operator()(double x) const {
        if (empty()) throw std::logic_error("Expr: evaluating an empty expression");
        return eval_node(root_, x);
    }

    std::string str() const { return empty() ? std::string() : print_node(root_, 0); }

    /// Structural equality; source offsets are ignored.
    friend bool same_structure(const Expr& a, const Expr& b) {
        if (a.empty() || b.empty()) return a.empty() == b.empty();
        return a.same_node(a.root_, b, b.root_);
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }

private:
    std::vector<Node> nodes_;
    int root_ = -1;

    friend class ExprParser;

    int add(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    bool same_node(int i, const Expr& o, int j) const {
        const Node& a = nodes_[static_cast<std::size_t>(i)];
        const Node& b = o.nodes_[static_cast<std::size_t>(j)];
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case Kind::Number: return a.number == b.number;
            case Kind::Var:
            case Kind::ConstPi:
            case Kind::ConstE: return true;
            case Kind::Neg: return same_node(a.lhs, o, b.lhs);
            case Kind::Binary:
                return a.op == b.op && same_node(a.lhs, o, b.lhs) && same_node(a.rhs, o, b.rhs);
            case Kind::Call: return a.fn == b.fn && same_node(a.lhs, o, b.lhs);
        }
        return false;
    }

    [[noreturn]] void fail(int i, const std::string& msg) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        throw EvalError(n.offset, print_node(i, 0), msg);
    }

    double eval_node(int i, double x) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        double v = 0.0;
        switch (n.kind) {
            case Kind::Number: v = n.number; break;
            case Kind::Var: v = x; break;
            case Kind::ConstPi: v = 3.14159265358979323846; break;
            case Kind::ConstE: v = 2.71828182845904523536; break;
            case Kind::Neg: v = -eval_node(n.lhs, x); break;
            case Kind::Binary: {
                const double a = eval_node(n.lhs, x);
                const double b = eval_node(n.rhs, x);
                switch (n.op) {
                    case BinaryOp::Add: v = a + b; break;
                    case BinaryOp::Sub: v = a - b; break;
                    case BinaryOp::Mul: v = a * b; break;
                    case BinaryOp::Div:
                        if (b == 0.0) fail(i, "division by zero");
                        v = a / b;
                        break;
                    case BinaryOp::Pow:
                        if (a < 0.0 && b != std::nearbyint(b))
                            fail(i, "fractional power of a negative base");
                        v = std::pow(a, b);
                        break;
                }
                break;
            }
            case Kind::Call: {
                const double a = eval_node(n.lhs, x);
                switch (n.fn) {
                    case Builtin::Exp: v = std::exp(a); break;
                    case Builtin::Sin: v = std::sin(a); break;
                    case Builtin::Cos: v = std::cos(a); break;
                    case Builtin::Ln:
                        if (a < 0.0) fail(i, "ln of a negative argument");
                        v = std::log(a);
                        break;
                    case Builtin::Sqrt:
                        if (a < 0.0) fail(i, "sqrt of a negative argument");
                        v = std::sqrt(a);
                        break;
                }
                break;
            }
        }
        if (!std::isfinite(v)) fail(i, "non-finite result");
        return v;
    }

    // Precedence levels for printing: +,- = 1; *,/ = 2; unary minus = 3;
    // ^ = 4; atoms = 5. Matches the parse grammar, so str() round-trips.
    int prec(int i) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.kind) {
            case Kind::Binary:
                switch (n.op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub: return 1;
                    case BinaryOp::Mul:
                    case BinaryOp::Div: return 2;
                    case BinaryOp::Pow: return 4;
                }
                return 1;
            case Kind::Neg: return 3;
            default: return 5;
        }
    }

    std::string print_node(int i, int) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        auto wrap = [this](int child, bool parens) {
            std::string s = print_node(child, 0);
            return parens ? "(" + s + ")" : s;
        };
        switch (n.kind) {
            case Kind::Number: return format_double(n.number);
            case Kind::Var: return "x";
            case Kind::ConstPi: return "pi";
            case Kind::ConstE: return "e";
            case Kind::Neg: return "-" + wrap(n.lhs, prec(n.lhs) < 3);
            case Kind::Call: {
                static const char* names[] = {"exp", "sin", "cos", "ln", "sqrt"};
                return std::string(names[static_cast<int>(n.fn)]) + "(" + print_node(n.lhs, 0) + ")";
            }
            case Kind::Binary: {
                static const char* ops[] = {"+", "-", "*", "/", "^"};
                const int p = prec(i);
                if (n.op == BinaryOp::Pow)
                    // right-associative; base must be an atom, exponent may be unary
                    return wrap(n.lhs, prec(n.lhs) < 5) + "^" + wrap(n.rhs, prec(n.rhs) < 3);
                // left-associative grammar: equal precedence on the right
                // re-associates unless parenthesized
                const bool lp = prec(n.lhs) < p;
                const bool rp = prec(n.rhs) <= p;
                return wrap(n.lhs, lp) + ops[static_cast<int>(n.op)] + wrap(n.rhs, rp);
            }
        }
        return {};
    }
};

/// Recursive-descent parser for
///   expr   := term  { ('+'|'-') term }
///   term   := unary { ('*'|'/') unary }
///   unary  := '-' unary | power
///   power  := atom [ '^' unary ]              (right-associative)
///   atom   := number | 'x' | 'pi' | 'e' | fn '(' expr ')' | '(' expr ')'
/// Whitespace is insignificant; implicit multiplication is rejected.
class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    Expr run() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "empty expression");
        Expr e;
        e.root_ = parse_expr(e);
        skip_ws();
        if (pos_ < src_.size()) throw ParseError(pos_, "unexpected trailing input");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                      src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    int parse_expr(Expr& e) {
        int lhs = parse_term(e);
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (eat('+'))
                lhs = binary(e, BinaryOp::Add, lhs, parse_term(e), at);
            else if (eat('-'))
                lhs = binary(e, BinaryOp::Sub, lhs, parse_term(e), at);
            else
                return lhs;
        }
    }

    int parse_term(Expr& e) {
        int lhs = parse_unary(e);
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (eat('*'))
                lhs = binary(e, BinaryOp::Mul, lhs, parse_unary(e), at);
            else if (eat('/'))
                lhs = binary(e, BinaryOp::Div, lhs, parse_unary(e), at);
            else
                return lhs;
        }
    }

    int parse_unary(Expr& e) {
        skip_ws();
        const std::size_t at = pos_;
        if (eat('-')) {
            Expr::Node n{Expr::Kind::Neg};
            n.lhs = parse_unary(e);
            n.offset = static_cast<std::uint32_t>(at);
            return e.add(n);
        }
        return parse_power(e);
    }

    int parse_power(Expr& e) {
        int base = parse_atom(e);
        skip_ws();
        const std::size_t at = pos_;
        if (eat('^')) return binary(e, BinaryOp::Pow, base, parse_unary(e), at);
        return base;
    }

    int binary(Expr& e, BinaryOp op, int lhs, int rhs, std::size_t at) {
        Expr::Node n{Expr::Kind::Binary};
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        n.offset = static_cast<std::uint32_t>(at);
        return e.add(n);
    }

    int parse_atom(Expr& e) {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "expected an operand");
        const std::size_t at = pos_;
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = parse_expr(e);
            if (!eat(')')) throw ParseError(pos_, "expected ')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number(e);
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_ident(e);
        throw ParseError(at, std::string("unexpected character '") + c + "'");
    }

    int parse_number(Expr& e) {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < src_.size() && src_[end] >= '0' && src_[end] <= '9') ++end;
        };
        digits();
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            digits();
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t mark = end;
            ++end;
            if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
            const std::size_t ds = end;
            digits();
            if (end == ds) end = mark;  // 'e' was not an exponent; leave it
        }
        double v = 0.0;
        auto res = std::from_chars(src_.data() + at, src_.data() + end, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + end)
            throw ParseError(at, "malformed number");
        pos_ = end;
        Expr::Node n{Expr::Kind::Number};
        n.number = v;
        n.offset = static_cast<std::uint32_t>(at);
        return e.add(n);
    }

    int parse_ident(Expr& e) {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        while (end < src_.size() &&
               ((src_[end] >= 'a' && src_[end] <= 'z') || (src_[end] >= 'A' && src_[end] <= 'Z') ||
                (src_[end] >= '0' && src_[end] <= '9') || src_[end] == '_'))
            ++end;
        const std::string_view name = src_.substr(at, end - at);
        pos_ = end;
        Expr::Node n{Expr::Kind::Var};
        n.offset = static_cast<std::uint32_t>(at);
        if (name == "x") {
            n.kind = Expr::Kind::Var;
        } else if (name == "pi") {
            n.kind = Expr::Kind::ConstPi;
        } else if (name == "e") {
            n.kind = Expr::Kind::ConstE;
        } else if (name == "exp" || name == "sin" || name == "cos" || name == "ln" ||
                   name == "sqrt") {
            n.kind = Expr::Kind::Call;
            n.fn = name == "exp"  ? Builtin::Exp
                   : name == "sin" ? Builtin::Sin
                   : name == "cos" ? Builtin::Cos
                   : name == "ln"  ? Builtin::Ln
                                   : Builtin::Sqrt;
            if (!eat('(')) throw ParseError(pos_, "expected '(' after function name");
            n.lhs = parse_expr(e);
            if (!eat(')')) throw ParseError(pos_, "expected ')'");
        } else {
            throw ParseError(at, "unknown identifier '" + std::string(name) + "'");
        }
        return e.add(n);
    }
};

inline Expr Expr::parse(std::string_view source) { return ExprParser(source).run(); }

inline Expr parse_expr(std::string_view source) { return Expr::parse(source); }

}  // namespace fibcol
