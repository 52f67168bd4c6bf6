#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fhde/grid.hpp"

namespace fhde {

/// Round-off slack for the pointwise order; keeps floating-point noise from
/// flipping order flags on mathematically monotone chains.
inline constexpr double order_slack = 1e-12;

using ScalarFn = std::function<double(double)>;

/// The (psi, theta, phi) triple gauging contraction strength:
/// psi nonnegative non-decreasing with psi(0) = 0, theta/phi vanishing at 0,
/// and gap psi - theta + phi strictly positive away from 0.
struct ContractionTriple {
    ScalarFn psi;
    ScalarFn theta;
    ScalarFn phi;
};

/// Outcome of sampling-based triple validation. Semi-continuity of the three
/// functions cannot be decided from point samples; it stays caller-asserted
/// and the report says so.
struct TripleReport {
    bool zero_at_zero = false;
    bool psi_nondecreasing = false;
    bool gap_positive = false;
    bool pass = false;
    double min_gap = 0.0;
    double min_gap_at = 0.0;
    int samples = 0;
    std::string detail;
};

/// Samples the triple on a log-spaced ladder over (t_max*1e-9, t_max] and
/// checks the three computable conditions: zeros at zero, psi non-decreasing
/// across consecutive samples, and a strictly positive gap at every sample.
inline TripleReport validate_triple(const ContractionTriple& c, double t_max,
                                    int samples = 1000) {
    if (!(t_max > 0.0)) throw std::invalid_argument("validate_triple: t_max must be positive");
    if (samples < 100) throw std::invalid_argument("validate_triple: need at least 100 samples");
    if (!c.psi || !c.theta || !c.phi)
        throw std::invalid_argument("validate_triple: all three functions must be set");

    constexpr double zero_tol = 1e-15;
    TripleReport rep;
    rep.samples = samples;
    rep.zero_at_zero = std::abs(c.psi(0.0)) <= zero_tol && std::abs(c.theta(0.0)) <= zero_tol &&
                       std::abs(c.phi(0.0)) <= zero_tol;

    // log spacing concentrates samples near 0 where gaps typically
    // degenerate. The floor stays above min(1e-7, t_max/10): below that,
    // functions agreeing to second order (like t and arctan t) are equal in
    // double precision and no strict inequality is resolvable.
    const double lo = std::max(t_max * 1e-9, std::min(1e-7, 0.1 * t_max));
    rep.psi_nondecreasing = true;
    rep.gap_positive = true;
    double prev_psi = c.psi(0.0);
    bool first = true;
    for (int k = 0; k < samples; ++k) {
        const double frac = samples == 1 ? 1.0 : static_cast<double>(k) / (samples - 1);
        const double s = lo * std::pow(t_max / lo, frac);
        const double psi = c.psi(s);
        if (psi + order_slack < prev_psi) {
            rep.psi_nondecreasing = false;
            if (rep.detail.empty())
                rep.detail = "psi decreases near t = " + std::to_string(s);
        }
        prev_psi = psi;
        const double gap = psi - c.theta(s) + c.phi(s);
        if (first || gap < rep.min_gap) {
            rep.min_gap = gap;
            rep.min_gap_at = s;
            first = false;
        }
        if (!(gap > 0.0)) rep.gap_positive = false;
    }
    rep.pass = rep.zero_at_zero && rep.psi_nondecreasing && rep.gap_positive;
    if (!rep.zero_at_zero && rep.detail.empty())
        rep.detail = "psi, theta, phi must all vanish at 0";
    if (!rep.gap_positive && rep.detail.empty())
        rep.detail = "gap psi - theta + phi is not strictly positive at t = " +
                     std::to_string(rep.min_gap_at);
    if (rep.detail.empty())
        rep.detail = "sampled conditions hold; semi-continuity is caller-asserted";
    return rep;
}

/// Pointwise partial order u <= v induced by the cone of nonnegative grid
/// functions, with round-off slack.
[[nodiscard]] inline bool partial_le(const GridFunction& u, const GridFunction& v,
                                     double tol = order_slack) {
    require_same_grid(u, v);
    for (int i = 0; i < u.size(); ++i)
        if (v[i] - u[i] < -tol) return false;
    return true;
}

/// Least upper bound in the pointwise order: the nodewise maximum.
[[nodiscard]] inline GridFunction upper_bound(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v);
    std::vector<double> w(static_cast<size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) w[static_cast<size_t>(i)] = std::max(u[i], v[i]);
    return GridFunction(u.grid(), std::move(w));
}

/// Per-step diagnostics of a fixed-point iteration: successive-difference
/// norms and whether each step moved up in the pointwise order.
struct IterationTrace {
    std::vector<double> diffs;
    std::vector<bool> monotone_order;
    int steps = 0;
    bool converged = false;
    std::string error;  // nonempty when the map failed mid-iteration
};

/// Iterates x <- map(x) until the successive difference (max norm) drops to
/// tol or max_iter steps ran. A throwing map aborts with the partial trace
/// recorded so far.
template <typename MapFn>
std::pair<GridFunction, IterationTrace> iterate_fixed_point(MapFn&& map,
                                                            const GridFunction& x_start,
                                                            double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("iterate_fixed_point: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("iterate_fixed_point: max_iter must be >= 1");

    GridFunction x = x_start;
    IterationTrace trace;
    for (int k = 0; k < max_iter; ++k) {
        GridFunction next = x;
        try {
            next = map(x);
        } catch (const std::exception& e) {
            trace.error = e.what();
            break;
        }
        const double d = max_diff(x, next);
        trace.diffs.push_back(d);
        trace.monotone_order.push_back(partial_le(x, next));
        x = std::move(next);
        if (d <= tol) {
            trace.converged = true;
            break;
        }
    }
    trace.steps = static_cast<int>(trace.diffs.size());
    return {std::move(x), std::move(trace)};
}

}  // namespace fhde
