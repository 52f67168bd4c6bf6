#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fhde/grid.hpp"
#include "fhde/special.hpp"

namespace fhde {

/// Order of a fractional integral or derivative. Integrals accept any
/// alpha > 0; derivatives require 0 < alpha < 1.
struct FracOrder {
    double alpha;
};

namespace detail {

// k^p - (k-1)^p for k >= 1 without cancellation at large k.
inline double diff_pow(double k, double p) {
    if (k <= 1.0) return 1.0;
    return -std::pow(k, p) * std::expm1(p * std::log1p(-1.0 / k));
}

// Product-trapezoidal weights for the kernel (t-s)^(alpha-1) on a uniform
// mesh: the piecewise-linear interpolant of u is integrated exactly against
// the kernel. Per subinterval at lag k (node distances k*h and (k-1)*h from
// the evaluation point) the two hat-function moments are
//   left(k)  = h^a * (P(k) - (k-1) Q(k))
//   right(k) = h^a * (k Q(k) - P(k))
// with P(k) = (k^(a+1)-(k-1)^(a+1))/(a+1) and Q(k) = (k^a-(k-1)^a)/a.
// All weights are nonnegative (P, Q are slices of convex/monotone powers),
// which is what makes the operator order-preserving.
struct ConvolutionWeights {
    std::vector<double> interior;  // interior[k] multiplies u_{i-k}, 1 <= k <= n-1
    std::vector<double> left;      // left[i] multiplies u_0 in row i
    double self = 0.0;             // multiplies u_i
};

inline ConvolutionWeights product_trapezoid_weights(double alpha, int n, double h) {
    const double ha = std::pow(h, alpha);
    std::vector<double> cl(static_cast<size_t>(n) + 1, 0.0);
    std::vector<double> cr(static_cast<size_t>(n) + 2, 0.0);
    for (int k = 1; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p = diff_pow(kd, alpha + 1.0) / (alpha + 1.0);
        const double q = diff_pow(kd, alpha) / alpha;
        cl[static_cast<size_t>(k)] = ha * (p - (kd - 1.0) * q);
        cr[static_cast<size_t>(k)] = ha * (kd * q - p);
    }
    ConvolutionWeights w;
    w.interior.assign(static_cast<size_t>(n), 0.0);
    for (int k = 1; k < n; ++k)
        w.interior[static_cast<size_t>(k)] =
            cl[static_cast<size_t>(k)] + cr[static_cast<size_t>(k) + 1];
    w.left = std::move(cl);
    w.self = cr[1];
    return w;
}

}  // namespace detail

/// Fractional integral of order alpha > 0 with lower limit at the grid
/// origin: the convolution of u with (t-s)^(alpha-1)/Gamma(alpha),
/// discretized by product-trapezoidal quadrature (exact on the
/// piecewise-linear interpolant of u, for any alpha > 0). Node 0 carries 0.
inline GridFunction rl_integral(const GridFunction& u, FracOrder order) {
    const double alpha = order.alpha;
    if (!std::isfinite(alpha) || alpha <= 0.0)
        throw std::invalid_argument("rl_integral: order must be positive");
    const Grid& g = u.grid();
    const int n = g.n;
    const auto w = detail::product_trapezoid_weights(alpha, n, g.step());
    const double inv_gamma = 1.0 / gamma(alpha);

    std::vector<double> out(static_cast<size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i) {
        double s = w.left[static_cast<size_t>(i)] * u[0] + w.self * u[i];
        for (int j = 1; j < i; ++j) s += w.interior[static_cast<size_t>(i - j)] * u[j];
        out[static_cast<size_t>(i)] = s * inv_gamma;
    }
    return GridFunction(g, std::move(out));
}

/// Fractional derivative of order 0 < alpha < 1: the ordinary derivative of
/// the (1-alpha)-order integral, realized as central differences at interior
/// nodes and one-sided differences at the ends. Node 0 sits on the kernel
/// singularity and is unreliable whenever u(t0) != 0.
inline GridFunction rl_derivative(const GridFunction& u, FracOrder order) {
    const double alpha = order.alpha;
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("rl_derivative: order must lie in (0, 1)");
    const GridFunction v = rl_integral(u, FracOrder{1.0 - alpha});
    const int n = u.grid().n;
    const double h = u.grid().step();

    std::vector<double> out(static_cast<size_t>(n) + 1);
    out[0] = (v[1] - v[0]) / h;
    for (int i = 1; i < n; ++i)
        out[static_cast<size_t>(i)] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    out[static_cast<size_t>(n)] = (v[n] - v[n - 1]) / h;
    return GridFunction(u.grid(), std::move(out));
}

/// Analytic fractional integral of a power: I^alpha (s^p)(t) for lower
/// limit 0, i.e. Gamma(p+1)/Gamma(p+alpha+1) * t^(p+alpha).
inline double power_rule_oracle(double p, double alpha, double t) {
    if (!(p >= 0.0) || !(alpha > 0.0) || !(t >= 0.0))
        throw std::domain_error("power_rule_oracle: requires p >= 0, alpha > 0, t >= 0");
    if (t == 0.0) return 0.0;
    return gamma(p + 1.0) / gamma(p + alpha + 1.0) * std::pow(t, p + alpha);
}

}  // namespace fhde
