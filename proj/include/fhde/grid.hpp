#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fhde {

/// Uniform time mesh on [t0, t0 + a] with n subintervals (n + 1 nodes).
struct Grid {
    double t0;
    double a;
    int n;

    Grid(double t0_, double a_, int n_) : t0(t0_), a(a_), n(n_) {
        if (!std::isfinite(t0) || !std::isfinite(a) || !(a > 0.0))
            throw std::invalid_argument("Grid: interval length must be positive and finite");
        if (n < 2)
            throw std::invalid_argument("Grid: need at least 2 subintervals");
    }

    [[nodiscard]] double step() const { return a / n; }
    [[nodiscard]] int node_count() const { return n + 1; }
    [[nodiscard]] double node(int i) const { return t0 + (a * i) / n; }

    bool operator==(const Grid&) const = default;
};

/// A real-valued function sampled on a Grid: value(i) = u(grid.node(i)).
/// Values are finite by construction; any NaN/Inf is rejected at the door.
class GridFunction {
public:
    GridFunction(const Grid& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.node_count())
            throw std::invalid_argument("GridFunction: value count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("GridFunction: values must be finite");
    }

    static GridFunction zeros(const Grid& grid) {
        return GridFunction(grid, std::vector<double>(grid.node_count(), 0.0));
    }

    static GridFunction constant(const Grid& grid, double c) {
        return GridFunction(grid, std::vector<double>(grid.node_count(), c));
    }

    /// Samples fn(t_i) at every node.
    template <typename Fn>
    static GridFunction sample(const Grid& grid, Fn&& fn) {
        std::vector<double> v(grid.node_count());
        for (int i = 0; i < grid.node_count(); ++i) v[i] = fn(grid.node(i));
        return GridFunction(grid, std::move(v));
    }

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] int size() const { return static_cast<int>(values_.size()); }
    [[nodiscard]] double operator[](int i) const { return values_[static_cast<size_t>(i)]; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const GridFunction& u, const GridFunction& v) {
    if (!(u.grid() == v.grid()))
        throw std::invalid_argument("grid mismatch: functions live on different meshes");
}

[[nodiscard]] inline double max_norm(const GridFunction& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

/// max_i |u_i - v_i| on a shared grid.
[[nodiscard]] inline double max_diff(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v);
    double m = 0.0;
    for (int i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
    return m;
}

inline GridFunction operator+(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v);
    std::vector<double> w(static_cast<size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) w[static_cast<size_t>(i)] = u[i] + v[i];
    return GridFunction(u.grid(), std::move(w));
}

inline GridFunction operator-(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v);
    std::vector<double> w(static_cast<size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) w[static_cast<size_t>(i)] = u[i] - v[i];
    return GridFunction(u.grid(), std::move(w));
}

inline GridFunction operator*(double c, const GridFunction& u) {
    std::vector<double> w(static_cast<size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) w[static_cast<size_t>(i)] = c * u[i];
    return GridFunction(u.grid(), std::move(w));
}

inline GridFunction operator+(const GridFunction& u, double c) {
    std::vector<double> w(static_cast<size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) w[static_cast<size_t>(i)] = u[i] + c;
    return GridFunction(u.grid(), std::move(w));
}

}  // namespace fhde
