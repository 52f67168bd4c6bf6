#pragma once

// Shared test utilities: the worked example problem, independent oracles,
// random generators, and subprocess helpers. Framework-free so both the
// unit suites and the acceptance runner can include it.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fhde/fhde.hpp"

namespace testsupport {

/// The shipped worked example: f = tanh(t)*arctan(x+1),
/// g = t^2 e^t |sin x| * y/(1+y), h = t^2 e^t on [0, 1] with x(0) = 0.
inline fhde::ProblemSpec example_problem(double beta = 1.0, int n = 512, double tol = 1e-9,
                                         int max_iter = 50) {
    fhde::ProblemSpec p;
    p.name = "tanh-arctan-hybrid";
    p.t0 = 0.0;
    p.a = 1.0;
    p.x0 = 0.0;
    p.alpha = 0.5;
    p.beta = beta;
    p.f = fhde::parse("tanh(t)*arctan(x+1)");
    p.g = fhde::parse("t^2*exp(t)*abs(sin(x))*y/(1+y)");
    p.h = fhde::parse("t^2*exp(t)");
    p.grid_n = n;
    p.tol = tol;
    p.max_iter = max_iter;
    return p;
}

/// Independent scalar root oracle: plain bisection on a sign change.
inline double bisect_root(const std::function<double(double)>& fn, double lo, double hi,
                          int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        (fn(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Analytic fractional integral of a piecewise-linear grid function via its
/// ramp decomposition u(s) = u_0 + sum_j m_j (s - t_j)_+ where m_j are the
/// slope changes; each ramp integrates to (t - t_j)_+^(a+1) / Gamma(a+2).
/// Deliberately uses std::tgamma and direct powers, not the library path.
inline std::vector<double> ramp_decomposition_integral(const fhde::GridFunction& u,
                                                       double alpha) {
    const fhde::Grid& g = u.grid();
    const int n = g.n;
    const double h = g.step();
    std::vector<double> slope_change(static_cast<size_t>(n));
    double prev_slope = 0.0;
    for (int j = 0; j < n; ++j) {
        const double s = (u[j + 1] - u[j]) / h;
        slope_change[static_cast<size_t>(j)] = s - prev_slope;
        prev_slope = s;
    }
    std::vector<double> out(static_cast<size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i) {
        const double ti = g.node(i);
        double acc = u[0] * std::pow(ti - g.t0, alpha) / std::tgamma(alpha + 1.0);
        for (int j = 0; j < i; ++j) {
            const double dt = ti - g.node(j);
            acc += slope_change[static_cast<size_t>(j)] * std::pow(dt, alpha + 1.0) /
                   std::tgamma(alpha + 2.0);
        }
        out[static_cast<size_t>(i)] = acc;
    }
    return out;
}

/// Random expression tree of bounded depth over t, x, y.
inline fhde::Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
    std::uniform_real_distribution<double> num(-5.0, 5.0);
    switch (pick(rng)) {
        case 0: return fhde::Expr::constant(num(rng));
        case 1: {
            const char vars[3] = {'t', 'x', 'y'};
            return fhde::Expr::variable(vars[rng() % 3]);
        }
        case 2: return fhde::Expr::unary(fhde::UnaryOp::neg, random_expr(rng, depth - 1));
        case 3: {
            const fhde::BinaryOp ops[5] = {fhde::BinaryOp::add, fhde::BinaryOp::sub,
                                           fhde::BinaryOp::mul, fhde::BinaryOp::div,
                                           fhde::BinaryOp::pow};
            return fhde::Expr::binary(ops[rng() % 5], random_expr(rng, depth - 1),
                                      random_expr(rng, depth - 1));
        }
        default: {
            const fhde::Builtin fns[11] = {
                fhde::Builtin::sin,  fhde::Builtin::cos,    fhde::Builtin::tan,
                fhde::Builtin::tanh, fhde::Builtin::arctan, fhde::Builtin::exp,
                fhde::Builtin::log,  fhde::Builtin::sqrt,   fhde::Builtin::abs,
                fhde::Builtin::min,  fhde::Builtin::max};
            const fhde::Builtin fn = fns[rng() % 11];
            std::vector<fhde::Expr> args;
            args.push_back(random_expr(rng, depth - 1));
            if (fhde::builtin_arity(fn) == 2) args.push_back(random_expr(rng, depth - 1));
            return fhde::Expr::call(fn, std::move(args));
        }
    }
}

inline std::optional<double> try_eval(const fhde::Expr& e, double t, double x, double y) {
    try {
        return fhde::eval(e, t, x, y);
    } catch (const fhde::EvalError&) {
        return std::nullopt;
    }
}

/// Fresh scratch directory under the system temp root.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("fhde_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

#ifdef FHDE_CLI_PATH
/// Runs the CLI with FHDE_LOG=quiet; returns the exit code.
inline int run_cli(const std::string& args) {
    const std::string cmd =
        "FHDE_LOG=quiet " + std::string(FHDE_CLI_PATH) + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}
#endif

/// Problem-file text for the worked example with substitutable pieces.
inline std::string example_problem_text(const std::string& f = "tanh(t)*arctan(x+1)",
                                        const std::string& h = "t^2*exp(t)",
                                        const std::string& extra = "") {
    std::string s;
    s += "name = scratch-problem\n";
    s += "t0 = 0\na = 1\nx0 = 0\nalpha = 0.5\nbeta = 1.0\n";
    s += "f = " + f + "\n";
    s += "g = t^2*exp(t)*abs(sin(x))*y/(1+y)\n";
    s += "h = " + h + "\n";
    s += "grid_n = 128\ntol = 1e-9\nmax_iter = 50\n";
    s += extra;
    return s;
}

}  // namespace testsupport
