#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fhde/contraction.hpp"
#include "fhde/expr.hpp"
#include "fhde/fracops.hpp"
#include "fhde/grid.hpp"
#include "fhde/problem.hpp"
#include "fhde/special.hpp"

namespace fhde {

/// Absolute slack for the sampled hypothesis inequalities.
inline constexpr double hypothesis_slack = 1e-9;
/// Adjacent-sample differences must exceed this for strict monotonicity.
inline constexpr double strictness_threshold = 1e-12;

// ---------------------------------------------------------------------------
// Operators of the hybrid integral equation  x = P(x) + Q(y)
// ---------------------------------------------------------------------------

/// Pointwise perturbation part: x0 - f(t0, x0) + f(t_i, x_i).
inline GridFunction perturbation_term(const GridFunction& x, const ProblemSpec& p) {
    if (!(x.grid() == p.grid()))
        throw std::invalid_argument("perturbation_term: function is not on the problem grid");
    const double c = p.x0 - eval(p.f, p.t0, p.x0, 0.0);
    std::vector<double> out(static_cast<size_t>(x.size()));
    for (int i = 0; i < x.size(); ++i)
        out[static_cast<size_t>(i)] = c + eval(p.f, x.grid().node(i), x[i], 0.0);
    return GridFunction(x.grid(), std::move(out));
}

/// Fractional source part: I^alpha of q, where q_i = g(t_i, y_i, (I^beta y)_i).
inline GridFunction source_integral_term(const GridFunction& y, const ProblemSpec& p) {
    if (!(y.grid() == p.grid()))
        throw std::invalid_argument("source_integral_term: function is not on the problem grid");
    const GridFunction w = rl_integral(y, FracOrder{p.beta});
    std::vector<double> q(static_cast<size_t>(y.size()));
    for (int i = 0; i < y.size(); ++i)
        q[static_cast<size_t>(i)] = eval(p.g, y.grid().node(i), y[i], w[i]);
    return rl_integral(GridFunction(y.grid(), std::move(q)), FracOrder{p.alpha});
}

/// Defect of x in the hybrid integral equation, max over nodes of
/// |x - perturbation_term(x) - source_integral_term(x)|.
inline double hie_residual(const GridFunction& x, const ProblemSpec& p) {
    return max_diff(x, perturbation_term(x, p) + source_integral_term(x, p));
}

// ---------------------------------------------------------------------------
// A-priori bound
// ---------------------------------------------------------------------------

/// The solution-norm certificate M = |x0 - f(t0,x0)| + pi/2 + L + a^alpha
/// * h_norm / Gamma(alpha+1), with L and h_norm taken as grid maxima. The
/// pi/2 term is the global arctan bound; M is a certificate, not tight.
struct Bounds {
    double L = 0.0;
    double h_norm = 0.0;
    double M = 0.0;
};

inline Bounds compute_bounds(const ProblemSpec& p) {
    const Grid g = p.grid();
    Bounds b;
    b.L = -std::numeric_limits<double>::infinity();
    b.h_norm = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.node_count(); ++i) {
        b.L = std::max(b.L, eval(p.f, g.node(i), 0.0, 0.0));
        b.h_norm = std::max(b.h_norm, eval(p.h, g.node(i), 0.0, 0.0));
    }
    b.M = std::abs(p.x0 - eval(p.f, p.t0, p.x0, 0.0)) + std::numbers::pi / 2.0 + b.L +
          std::pow(p.a, p.alpha) * b.h_norm / gamma(p.alpha + 1.0);
    return b;
}

// ---------------------------------------------------------------------------
// Hypothesis audit
// ---------------------------------------------------------------------------

enum class Verdict { pass, fail, unchecked };

[[nodiscard]] constexpr const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::unchecked: return "unchecked";
    }
    return "?";
}

/// Sample point where a check's worst margin is attained.
struct Witness {
    double t = 0.0;
    double x = 0.0;
    std::optional<double> x2;  // second state sample, for pairwise checks
    std::optional<double> y;   // integral-argument sample, for the source bound
};

struct HypothesisCheck {
    Verdict verdict = Verdict::unchecked;
    double margin = 0.0;
    Witness witness;
    std::string note;
};

/// Sampled verdicts for the four solvability conditions plus the advisory
/// monotonicity flag the iteration diagnostics rely on.
struct HypothesisReport {
    HypothesisCheck strictly_increasing;     // xi - f(t, xi) strictly increasing in xi
    HypothesisCheck arctan_contraction;      // |f(t,x) - f(t,x')| <= arctan|x - x'|
    HypothesisCheck offset_nonnegative;      // f(t,0) - f(t0,x0) + x0 >= 0
    HypothesisCheck source_bounded;          // 0 <= g(t,x,y) <= h(t)
    HypothesisCheck f_nondecreasing_in_x;    // advisory, not part of the gate

    [[nodiscard]] bool all_pass() const {
        return strictly_increasing.verdict == Verdict::pass &&
               arctan_contraction.verdict == Verdict::pass &&
               offset_nonnegative.verdict == Verdict::pass &&
               source_bounded.verdict == Verdict::pass;
    }
};

/// Sampling resolution for the hypothesis audit. When x_range is unset it
/// defaults to [0, M]: the iteration lives in the cone of nonnegative
/// functions, and the arctan contraction bound only holds there for
/// problems in the intended class.
struct SamplingPlan {
    int nt = 64;
    int nx = 64;
    int ny = 16;
    std::optional<std::pair<double, double>> x_range;
};

inline HypothesisReport check_hypotheses(const ProblemSpec& p, const SamplingPlan& plan = {}) {
    if (plan.nt < 2 || plan.nx < 2 || plan.ny < 2)
        throw std::invalid_argument("check_hypotheses: sampling counts must be >= 2");

    HypothesisReport rep;
    double x_lo = 0.0, x_hi = 1.0;
    if (plan.x_range) {
        x_lo = plan.x_range->first;
        x_hi = plan.x_range->second;
        if (!(x_lo < x_hi))
            throw std::invalid_argument("check_hypotheses: empty x_range");
    } else {
        x_hi = std::max(compute_bounds(p).M, 1.0);
    }

    std::vector<double> ts(static_cast<size_t>(plan.nt));
    for (int i = 0; i < plan.nt; ++i)
        ts[static_cast<size_t>(i)] = p.t0 + p.a * i / (plan.nt - 1);
    std::vector<double> xs(static_cast<size_t>(plan.nx));
    for (int j = 0; j < plan.nx; ++j)
        xs[static_cast<size_t>(j)] = x_lo + (x_hi - x_lo) * j / (plan.nx - 1);

    const std::string box =
        "sampled t in [" + std::to_string(p.t0) + ", " + std::to_string(p.t0 + p.a) +
        "], x in [" + std::to_string(x_lo) + ", " + std::to_string(x_hi) + "]";

    // shared f table; a failure leaves every f-based check unchecked
    std::vector<double> f_tab(static_cast<size_t>(plan.nt) * plan.nx);
    bool f_tab_ok = true;
    std::string f_tab_err;
    try {
        for (int i = 0; i < plan.nt; ++i)
            for (int j = 0; j < plan.nx; ++j)
                f_tab[static_cast<size_t>(i) * plan.nx + j] =
                    eval(p.f, ts[static_cast<size_t>(i)], xs[static_cast<size_t>(j)], 0.0);
    } catch (const EvalError& e) {
        f_tab_ok = false;
        f_tab_err = e.what();
    }
    auto f_at = [&](int i, int j) { return f_tab[static_cast<size_t>(i) * plan.nx + j]; };

    if (!f_tab_ok) {
        for (auto* c : {&rep.strictly_increasing, &rep.arctan_contraction,
                        &rep.f_nondecreasing_in_x}) {
            c->verdict = Verdict::unchecked;
            c->note = f_tab_err;
        }
    } else {
        // strict monotonicity of xi - f(t, xi) over adjacent samples
        auto& growth = rep.strictly_increasing;
        growth.margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < plan.nt; ++i)
            for (int j = 0; j + 1 < plan.nx; ++j) {
                const double d = (xs[static_cast<size_t>(j) + 1] - xs[static_cast<size_t>(j)]) -
                                 (f_at(i, j + 1) - f_at(i, j));
                if (d < growth.margin) {
                    growth.margin = d;
                    growth.witness = {ts[static_cast<size_t>(i)], xs[static_cast<size_t>(j)],
                                      xs[static_cast<size_t>(j) + 1], std::nullopt};
                }
            }
        growth.verdict = growth.margin > strictness_threshold ? Verdict::pass : Verdict::fail;
        growth.note = box;

        // |f(t,x) - f(t,x')| <= arctan|x - x'| over all sampled pairs
        auto& contraction = rep.arctan_contraction;
        contraction.margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < plan.nt; ++i)
            for (int j = 0; j < plan.nx; ++j)
                for (int k = j + 1; k < plan.nx; ++k) {
                    const double lhs = std::abs(f_at(i, k) - f_at(i, j));
                    const double gap =
                        std::atan(xs[static_cast<size_t>(k)] - xs[static_cast<size_t>(j)]) - lhs;
                    if (gap < contraction.margin) {
                        contraction.margin = gap;
                        contraction.witness = {ts[static_cast<size_t>(i)],
                                               xs[static_cast<size_t>(j)],
                                               xs[static_cast<size_t>(k)], std::nullopt};
                    }
                }
        contraction.verdict =
            contraction.margin >= -hypothesis_slack ? Verdict::pass : Verdict::fail;
        contraction.note = box;

        // advisory: f(t, .) nondecreasing (the iteration's monotone-chain
        // diagnostics assume it; violations are reported, not enforced)
        auto& adv = rep.f_nondecreasing_in_x;
        adv.margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < plan.nt; ++i)
            for (int j = 0; j + 1 < plan.nx; ++j) {
                const double d = f_at(i, j + 1) - f_at(i, j);
                if (d < adv.margin) {
                    adv.margin = d;
                    adv.witness = {ts[static_cast<size_t>(i)], xs[static_cast<size_t>(j)],
                                   xs[static_cast<size_t>(j) + 1], std::nullopt};
                }
            }
        adv.verdict = adv.margin >= -hypothesis_slack ? Verdict::pass : Verdict::fail;
        adv.note = "advisory; " + box;
    }

    // f(t,0) - f(t0,x0) + x0 >= 0
    auto& offset = rep.offset_nonnegative;
    try {
        const double f00 = eval(p.f, p.t0, p.x0, 0.0);
        offset.margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < plan.nt; ++i) {
            const double v = eval(p.f, ts[static_cast<size_t>(i)], 0.0, 0.0) - f00 + p.x0;
            if (v < offset.margin) {
                offset.margin = v;
                offset.witness = {ts[static_cast<size_t>(i)], 0.0, std::nullopt, std::nullopt};
            }
        }
        offset.verdict = offset.margin >= -hypothesis_slack ? Verdict::pass : Verdict::fail;
    } catch (const EvalError& e) {
        offset.verdict = Verdict::unchecked;
        offset.note = e.what();
    }

    // 0 <= g(t,x,y) <= h(t) over the sampled box
    auto& bound = rep.source_bounded;
    try {
        const double x_abs = std::max(std::abs(x_lo), std::abs(x_hi));
        const double y_hi = std::pow(p.a, p.beta) * x_abs / gamma(p.beta + 1.0);
        bound.margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < plan.nt; ++i) {
            const double ht = eval(p.h, ts[static_cast<size_t>(i)], 0.0, 0.0);
            for (int j = 0; j < plan.nx; ++j)
                for (int k = 0; k < plan.ny; ++k) {
                    const double yv = y_hi * k / (plan.ny - 1);
                    const double gv =
                        eval(p.g, ts[static_cast<size_t>(i)], xs[static_cast<size_t>(j)], yv);
                    const double m = std::min(gv, ht - gv);
                    if (m < bound.margin) {
                        bound.margin = m;
                        bound.witness = {ts[static_cast<size_t>(i)], xs[static_cast<size_t>(j)],
                                         std::nullopt, yv};
                    }
                }
        }
        bound.verdict = bound.margin >= -hypothesis_slack ? Verdict::pass : Verdict::fail;
        bound.note = "sampled y in [0, " + std::to_string(y_hi) + "]";
    } catch (const std::exception& e) {
        bound.verdict = Verdict::unchecked;
        bound.note = e.what();
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Inner solve: x = perturbation_term(x) + q  with the source q frozen
// ---------------------------------------------------------------------------

/// Solves x = P(x) + Q(y) for fixed y. Mode picard iterates the map from
/// the zero function; mode rootfind solves the scalar equation
/// xi - f(t_i, xi) = x0 - f(t0,x0) + Q(y)_i at each node by bracketing
/// bisection (well-posed when xi - f(t, xi) is strictly increasing).
/// Non-convergence is reported through the trace, never thrown; the
/// rootfind trace has a single step whose diff is the final residual.
inline std::pair<GridFunction, IterationTrace> inner_solve(const GridFunction& y,
                                                           const ProblemSpec& p,
                                                           SolveMode mode) {
    const GridFunction source = source_integral_term(y, p);

    if (mode == SolveMode::picard) {
        auto map = [&](const GridFunction& u) { return perturbation_term(u, p) + source; };
        return iterate_fixed_point(map, GridFunction::zeros(p.grid()), p.tol, p.max_iter);
    }

    const Grid grid = p.grid();
    const double bracket_limit = 10.0 * std::max(1.0, compute_bounds(p).M);
    const double c0 = p.x0 - eval(p.f, p.t0, p.x0, 0.0);

    IterationTrace trace;
    std::vector<double> out(static_cast<size_t>(grid.node_count()));
    double residual = 0.0;
    for (int i = 0; i < grid.node_count(); ++i) {
        const double ti = grid.node(i);
        const double c = c0 + source[i];
        auto shifted = [&](double xi) { return xi - eval(p.f, ti, xi, 0.0) - c; };

        double lo = std::min(0.0, c) - 1.0;
        double hi = std::max(0.0, c) + 1.0;
        bool bracketed = true;
        while (shifted(lo) > 0.0) {
            lo = 2.0 * lo - 1.0;
            if (lo < -bracket_limit) { bracketed = false; break; }
        }
        while (bracketed && shifted(hi) < 0.0) {
            hi = 2.0 * hi + 1.0;
            if (hi > bracket_limit) { bracketed = false; break; }
        }
        if (!bracketed) {
            trace.error = "rootfind: no sign change within [-" + std::to_string(bracket_limit) +
                          ", " + std::to_string(bracket_limit) + "] at node " + std::to_string(i);
            trace.steps = 0;
            return {GridFunction::zeros(grid), std::move(trace)};
        }

        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi));
             ++it) {
            const double mid = 0.5 * (lo + hi);
            (shifted(mid) < 0.0 ? lo : hi) = mid;
        }
        const double root = 0.5 * (lo + hi);
        out[static_cast<size_t>(i)] = root;
        residual = std::max(residual, std::abs(shifted(root)));
    }

    GridFunction x(grid, std::move(out));
    trace.diffs.push_back(residual);
    trace.monotone_order.push_back(partial_le(y, x));
    trace.steps = 1;
    trace.converged = residual <= p.tol;
    return {std::move(x), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Outer solve
// ---------------------------------------------------------------------------

enum class SolveStatus { converged, max_iter_exceeded, hypothesis_violation };

[[nodiscard]] constexpr const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
        case SolveStatus::hypothesis_violation: return "hypothesis_violation";
    }
    return "?";
}

struct SolverOptions {
    SolveMode mode = SolveMode::rootfind;
    /// When set, a failed hypothesis audit aborts before iterating.
    bool strict = false;
    /// converged additionally requires residual <= residual_tol_factor * tol.
    double residual_tol_factor = 100.0;
    SamplingPlan sampling;
};

struct SolveReport {
    explicit SolveReport(GridFunction sol) : solution(std::move(sol)) {}

    GridFunction solution;
    double residual = 0.0;
    int iterations_outer = 0;
    std::vector<IterationTrace> inner_traces;
    Bounds bounds;
    HypothesisReport hypothesis;
    SolveStatus status = SolveStatus::max_iter_exceeded;
};

/// Runs the source-relaxation iteration y_{k+1} = inner_solve(y_k) from
/// y_0 = 0 until successive iterates agree within tol. The audit result
/// downgrades the status but does not stop the iteration unless strict.
/// Non-convergence is a status, never an exception; expression evaluation
/// failures do propagate.
inline SolveReport outer_solve(const ProblemSpec& p, const SolverOptions& opt = {}) {
    validate_problem(p);
    const Grid grid = p.grid();

    SolveReport rep{GridFunction::zeros(grid)};
    rep.bounds = compute_bounds(p);
    rep.hypothesis = check_hypotheses(p, opt.sampling);

    if (opt.strict && !rep.hypothesis.all_pass()) {
        rep.status = SolveStatus::hypothesis_violation;
        rep.residual = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

    GridFunction y = GridFunction::zeros(grid);
    bool drifted = true;
    bool inner_failed = false;
    for (int k = 0; k < p.max_iter && drifted; ++k) {
        auto [x, trace] = inner_solve(y, p, opt.mode);
        rep.inner_traces.push_back(std::move(trace));
        ++rep.iterations_outer;
        if (!rep.inner_traces.back().error.empty() || !rep.inner_traces.back().converged) {
            inner_failed = true;
            y = std::move(x);
            break;
        }
        const double d = max_diff(x, y);
        y = std::move(x);
        drifted = d > p.tol;
    }

    rep.solution = y;
    rep.residual = hie_residual(y, p);

    const bool iteration_ok = !drifted && !inner_failed;
    const bool certified = iteration_ok &&
                           rep.residual <= opt.residual_tol_factor * p.tol &&
                           max_norm(rep.solution) <= rep.bounds.M + order_slack;
    if (!rep.hypothesis.all_pass())
        rep.status = SolveStatus::hypothesis_violation;
    else if (certified)
        rep.status = SolveStatus::converged;
    else
        rep.status = SolveStatus::max_iter_exceeded;
    return rep;
}

}  // namespace fhde
