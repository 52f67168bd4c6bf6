#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fhde/expr.hpp"
#include "fhde/grid.hpp"

namespace fhde {

enum class SolveMode { picard, rootfind };

[[nodiscard]] constexpr const char* to_string(SolveMode m) {
    return m == SolveMode::picard ? "picard" : "rootfind";
}

/// One hybrid initial value problem
///   D^alpha [x(t) - f(t, x(t))] = g(t, x(t), I^beta x(t)),  x(t0) = x0
/// on J = [t0, t0 + a], together with its discretization and stopping
/// parameters. h is the continuous bound function for the source term g.
struct ProblemSpec {
    std::string name;
    double t0 = 0.0;
    double a = 1.0;
    double x0 = 0.0;
    double alpha = 0.5;
    double beta = 1.0;
    Expr f;  // over (t, x)
    Expr g;  // over (t, x, y) with y = I^beta x
    Expr h;  // over (t)
    int grid_n = 128;
    double tol = 1e-9;
    int max_iter = 50;

    [[nodiscard]] Grid grid() const { return Grid(t0, a, grid_n); }
};

/// Enforces the numeric constraints and the per-role variable restrictions
/// (f over {t,x}, g over {t,x,y}, h over {t}). Throws std::invalid_argument.
inline void validate_problem(const ProblemSpec& p) {
    if (!std::isfinite(p.t0) || !std::isfinite(p.a) || !(p.a > 0.0))
        throw std::invalid_argument("problem: interval length a must be positive");
    if (!std::isfinite(p.x0)) throw std::invalid_argument("problem: x0 must be finite");
    if (!(p.alpha > 0.0) || !(p.alpha < 1.0))
        throw std::invalid_argument("problem: alpha must lie in (0, 1)");
    if (!(p.beta > 0.0)) throw std::invalid_argument("problem: beta must be positive");
    if (p.grid_n < 2) throw std::invalid_argument("problem: grid_n must be at least 2");
    if (!(p.tol > 0.0)) throw std::invalid_argument("problem: tol must be positive");
    if (p.max_iter < 1) throw std::invalid_argument("problem: max_iter must be at least 1");

    const VarSet fs = variables_used(p.f);
    if (fs.y) throw std::invalid_argument("problem: f may only use variables t and x");
    const VarSet hs = variables_used(p.h);
    if (hs.x || hs.y) throw std::invalid_argument("problem: h may only use variable t");
}

/// Problem-file parse failure with a line-number message.
class ProblemFileError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A loaded problem file: the spec plus the requested solve mode.
struct ProblemFile {
    ProblemSpec spec;
    SolveMode mode = SolveMode::rootfind;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_real(std::string_view v, const std::string& key, int line) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw ProblemFileError("line " + std::to_string(line) + ": key '" + key +
                               "' needs a finite number, got '" + std::string(v) + "'");
    return out;
}

inline int parse_int(std::string_view v, const std::string& key, int line) {
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ProblemFileError("line " + std::to_string(line) + ": key '" + key +
                               "' needs an integer, got '" + std::string(v) + "'");
    return out;
}

}  // namespace detail

/// Parses the flat key = value problem format. Required keys: name, t0, a,
/// x0, alpha, beta, f, g, h, grid_n, tol, max_iter; optional: mode. Lines
/// starting with '#' and blank lines are skipped; one problem per file.
inline ProblemFile parse_problem_text(std::string_view text) {
    ProblemFile out;
    ProblemSpec& p = out.spec;

    std::vector<std::string> seen;
    auto mark_seen = [&](const std::string& key, int line) {
        for (const auto& s : seen)
            if (s == key)
                throw ProblemFileError("line " + std::to_string(line) + ": duplicate key '" +
                                       key + "'");
        seen.push_back(key);
    };

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ProblemFileError("line " + std::to_string(line_no) +
                                   ": expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ProblemFileError("line " + std::to_string(line_no) +
                                   ": expected 'key = value'");
        mark_seen(key, line_no);

        try {
            if (key == "name") p.name = std::string(value);
            else if (key == "t0") p.t0 = detail::parse_real(value, key, line_no);
            else if (key == "a") p.a = detail::parse_real(value, key, line_no);
            else if (key == "x0") p.x0 = detail::parse_real(value, key, line_no);
            else if (key == "alpha") p.alpha = detail::parse_real(value, key, line_no);
            else if (key == "beta") p.beta = detail::parse_real(value, key, line_no);
            else if (key == "f") p.f = parse(value);
            else if (key == "g") p.g = parse(value);
            else if (key == "h") p.h = parse(value);
            else if (key == "grid_n") p.grid_n = detail::parse_int(value, key, line_no);
            else if (key == "tol") p.tol = detail::parse_real(value, key, line_no);
            else if (key == "max_iter") p.max_iter = detail::parse_int(value, key, line_no);
            else if (key == "mode") {
                if (value == "picard") out.mode = SolveMode::picard;
                else if (value == "rootfind") out.mode = SolveMode::rootfind;
                else
                    throw ProblemFileError("line " + std::to_string(line_no) +
                                           ": mode must be 'picard' or 'rootfind'");
            } else {
                throw ProblemFileError("line " + std::to_string(line_no) + ": unknown key '" +
                                       key + "'");
            }
        } catch (const ParseError& e) {
            throw ProblemFileError("line " + std::to_string(line_no) + ": in expression '" +
                                   key + "': " + e.what());
        }
    }

    static constexpr const char* required[] = {"name", "t0",     "a",   "x0",       "alpha",
                                               "beta", "f",      "g",   "h",        "grid_n",
                                               "tol",  "max_iter"};
    for (const char* key : required) {
        bool found = false;
        for (const auto& s : seen)
            if (s == key) found = true;
        if (!found) throw ProblemFileError(std::string("missing required key '") + key + "'");
    }

    validate_problem(p);
    return out;
}

inline ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProblemFileError("cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str());
}

}  // namespace fhde
