#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace fhde {

/// Syntax error with the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, size_t offset)
        : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + what),
          offset_(offset) {}
    [[nodiscard]] size_t offset() const { return offset_; }

private:
    size_t offset_;
};

/// Evaluation error naming the offending node and its arguments.
class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class UnaryOp { neg };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Builtin { sin, cos, tan, tanh, arctan, exp, log, sqrt, abs, min, max };

[[nodiscard]] constexpr const char* builtin_name(Builtin b) {
    switch (b) {
        case Builtin::sin: return "sin";
        case Builtin::cos: return "cos";
        case Builtin::tan: return "tan";
        case Builtin::tanh: return "tanh";
        case Builtin::arctan: return "arctan";
        case Builtin::exp: return "exp";
        case Builtin::log: return "log";
        case Builtin::sqrt: return "sqrt";
        case Builtin::abs: return "abs";
        case Builtin::min: return "min";
        case Builtin::max: return "max";
    }
    return "?";
}

[[nodiscard]] constexpr int builtin_arity(Builtin b) {
    return (b == Builtin::min || b == Builtin::max) ? 2 : 1;
}

/// Immutable value-semantic expression tree over variables t, x, y.
struct Expr {
    enum class Kind { constant, variable, unary, binary, call };

    Kind kind = Kind::constant;
    double value = 0.0;            // constant payload
    char var = 't';                // variable payload: 't' | 'x' | 'y'
    UnaryOp uop = UnaryOp::neg;
    BinaryOp bop = BinaryOp::add;
    Builtin callee = Builtin::sin;
    std::vector<Expr> args;

    static Expr constant(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("Expr: constants must be finite");
        Expr e;
        e.kind = Kind::constant;
        e.value = v;
        return e;
    }
    static Expr variable(char name) {
        if (name != 't' && name != 'x' && name != 'y')
            throw std::invalid_argument("Expr: variable must be one of t, x, y");
        Expr e;
        e.kind = Kind::variable;
        e.var = name;
        return e;
    }
    static Expr unary(UnaryOp op, Expr child) {
        Expr e;
        e.kind = Kind::unary;
        e.uop = op;
        e.args.push_back(std::move(child));
        return e;
    }
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
        Expr e;
        e.kind = Kind::binary;
        e.bop = op;
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }
    static Expr call(Builtin fn, std::vector<Expr> arguments) {
        if (static_cast<int>(arguments.size()) != builtin_arity(fn))
            throw std::invalid_argument("Expr: wrong arity for builtin call");
        Expr e;
        e.kind = Kind::call;
        e.callee = fn;
        e.args = std::move(arguments);
        return e;
    }
};

/// Which of t, x, y an expression mentions.
struct VarSet {
    bool t = false, x = false, y = false;
};

inline void collect_variables(const Expr& e, VarSet& out) {
    if (e.kind == Expr::Kind::variable) {
        if (e.var == 't') out.t = true;
        if (e.var == 'x') out.x = true;
        if (e.var == 'y') out.y = true;
    }
    for (const Expr& a : e.args) collect_variables(a, out);
}

[[nodiscard]] inline VarSet variables_used(const Expr& e) {
    VarSet s;
    collect_variables(e, s);
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void eval_fail(const std::string& what, const char* node, double a,
                                   std::optional<double> b = std::nullopt) {
    std::string msg = "evaluation error: " + what + " in '" + node + "' with argument";
    msg += b ? "s (" + std::to_string(a) + ", " + std::to_string(*b) + ")"
             : " (" + std::to_string(a) + ")";
    throw EvalError(msg);
}

inline double checked_finite(double r, const char* node, double a,
                             std::optional<double> b = std::nullopt) {
    if (!std::isfinite(r)) eval_fail("non-finite result", node, a, b);
    return r;
}

}  // namespace detail

/// IEEE double evaluation with bindings for all three variables. Division by
/// zero, log/sqrt outside their domains, and any non-finite intermediate
/// raise EvalError instead of propagating NaN/Inf.
inline double eval(const Expr& e, double t, double x, double y) {
    using detail::checked_finite;
    using detail::eval_fail;
    switch (e.kind) {
        case Expr::Kind::constant: return e.value;
        case Expr::Kind::variable: return e.var == 't' ? t : (e.var == 'x' ? x : y);
        case Expr::Kind::unary: return -eval(e.args[0], t, x, y);
        case Expr::Kind::binary: {
            const double a = eval(e.args[0], t, x, y);
            const double b = eval(e.args[1], t, x, y);
            switch (e.bop) {
                case BinaryOp::add: return checked_finite(a + b, "+", a, b);
                case BinaryOp::sub: return checked_finite(a - b, "-", a, b);
                case BinaryOp::mul: return checked_finite(a * b, "*", a, b);
                case BinaryOp::div:
                    if (b == 0.0) eval_fail("division by zero", "/", a, b);
                    return checked_finite(a / b, "/", a, b);
                case BinaryOp::pow: return checked_finite(std::pow(a, b), "^", a, b);
            }
            break;
        }
        case Expr::Kind::call: {
            const double a = eval(e.args[0], t, x, y);
            switch (e.callee) {
                case Builtin::sin: return std::sin(a);
                case Builtin::cos: return std::cos(a);
                case Builtin::tan: return checked_finite(std::tan(a), "tan", a);
                case Builtin::tanh: return std::tanh(a);
                case Builtin::arctan: return std::atan(a);
                case Builtin::exp: return checked_finite(std::exp(a), "exp", a);
                case Builtin::log:
                    if (a <= 0.0) eval_fail("argument outside domain", "log", a);
                    return checked_finite(std::log(a), "log", a);
                case Builtin::sqrt:
                    if (a < 0.0) eval_fail("argument outside domain", "sqrt", a);
                    return std::sqrt(a);
                case Builtin::abs: return std::abs(a);
                case Builtin::min:
                case Builtin::max: {
                    const double b = eval(e.args[1], t, x, y);
                    return e.callee == Builtin::min ? std::min(a, b) : std::max(a, b);
                }
            }
            break;
        }
    }
    throw EvalError("evaluation error: malformed expression node");
}

// ---------------------------------------------------------------------------
// Parsing
//
// expr   := term (('+'|'-') term)*
// term   := factor (('*'|'/') factor)*
// factor := '-'? base
// base   := atom ('^' factor)?          -- '^' right-associative
// atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Unary minus binds looser than '^', so -2^2 = -(2^2). Numbers are decimal
// literals with optional fraction and exponent. pi and e are predefined.
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        Expr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view src_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    }
    [[nodiscard]] char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected '") + what + "'", pos_);
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = Expr::binary(BinaryOp::add, std::move(e), parse_term());
            else if (accept('-'))
                e = Expr::binary(BinaryOp::sub, std::move(e), parse_term());
            else
                return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (accept('*'))
                e = Expr::binary(BinaryOp::mul, std::move(e), parse_factor());
            else if (accept('/'))
                e = Expr::binary(BinaryOp::div, std::move(e), parse_factor());
            else
                return e;
        }
    }

    Expr parse_factor() {
        if (accept('-')) return Expr::unary(UnaryOp::neg, parse_base());
        return parse_base();
    }

    Expr parse_base() {
        Expr e = parse_atom();
        if (accept('^')) return Expr::binary(BinaryOp::pow, std::move(e), parse_factor());
        return e;
    }

    Expr parse_atom() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')', ")");
            return e;
        }
        if (c >= '0' && c <= '9') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_name();
        throw ParseError("expected a number, name, or '('", pos_);
    }

    Expr parse_number() {
        const size_t start = pos_;
        while (peek() >= '0' && peek() <= '9') ++pos_;
        if (peek() == '.') {
            ++pos_;
            if (!(peek() >= '0' && peek() <= '9'))
                throw ParseError("expected digits after decimal point", pos_);
            while (peek() >= '0' && peek() <= '9') ++pos_;
        }
        if (peek() == 'e' || peek() == 'E') {
            const size_t mark = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (peek() >= '0' && peek() <= '9') {
                while (peek() >= '0' && peek() <= '9') ++pos_;
            } else {
                pos_ = mark;  // not an exponent; leave 'e' for the next token
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (res.ec != std::errc() || !std::isfinite(v))
            throw ParseError("invalid numeric literal", start);
        return Expr::constant(v);
    }

    Expr parse_name() {
        const size_t start = pos_;
        auto is_ident = [](char ch) {
            return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                   (ch >= '0' && ch <= '9') || ch == '_';
        };
        while (is_ident(peek())) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        skip_ws();
        if (peek() == '(') {
            ++pos_;
            const auto fn = lookup_builtin(name);
            if (!fn) throw ParseError("unknown function '" + std::string(name) + "'", start);
            std::vector<Expr> args;
            args.push_back(parse_expr());
            while (accept(',')) args.push_back(parse_expr());
            expect(')', ")");
            if (static_cast<int>(args.size()) != builtin_arity(*fn))
                throw ParseError("function '" + std::string(name) + "' expects " +
                                     std::to_string(builtin_arity(*fn)) + " argument(s), got " +
                                     std::to_string(args.size()),
                                 start);
            return Expr::call(*fn, std::move(args));
        }
        if (name == "t" || name == "x" || name == "y") return Expr::variable(name[0]);
        if (name == "pi") return Expr::constant(std::numbers::pi);
        if (name == "e") return Expr::constant(std::numbers::e);
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    static std::optional<Builtin> lookup_builtin(std::string_view name) {
        static constexpr std::pair<std::string_view, Builtin> table[] = {
            {"sin", Builtin::sin},   {"cos", Builtin::cos},     {"tan", Builtin::tan},
            {"tanh", Builtin::tanh}, {"arctan", Builtin::arctan}, {"exp", Builtin::exp},
            {"log", Builtin::log},   {"sqrt", Builtin::sqrt},   {"abs", Builtin::abs},
            {"min", Builtin::min},   {"max", Builtin::max},
        };
        for (const auto& [key, fn] : table)
            if (key == name) return fn;
        return std::nullopt;
    }
};

inline std::string format_shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

[[nodiscard]] inline Expr parse(std::string_view src) { return detail::Parser(src).run(); }

/// Canonical fully-parenthesized form; parse(to_string(e)) evaluates
/// identically to e on every binding.
[[nodiscard]] inline std::string to_string(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::constant:
            if (e.value < 0.0) return "(-" + detail::format_shortest(-e.value) + ")";
            return detail::format_shortest(e.value);
        case Expr::Kind::variable: return std::string(1, e.var);
        case Expr::Kind::unary: return "(-" + to_string(e.args[0]) + ")";
        case Expr::Kind::binary: {
            const char* op = "+";
            switch (e.bop) {
                case BinaryOp::add: op = "+"; break;
                case BinaryOp::sub: op = "-"; break;
                case BinaryOp::mul: op = "*"; break;
                case BinaryOp::div: op = "/"; break;
                case BinaryOp::pow: op = "^"; break;
            }
            return "(" + to_string(e.args[0]) + op + to_string(e.args[1]) + ")";
        }
        case Expr::Kind::call: {
            std::string s = builtin_name(e.callee);
            s += '(';
            for (size_t i = 0; i < e.args.size(); ++i) {
                if (i) s += ',';
                s += to_string(e.args[i]);
            }
            s += ')';
            return s;
        }
    }
    return "?";
}

}  // namespace fhde
