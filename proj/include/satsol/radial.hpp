#pragma once

// Radial grids, quadrature and finite-difference operators for radially
// symmetric functions on the plane.
//
// All operators share one discretization: node j sits at r_j = j*dr, the
// origin node owns the disk of radius dr/2 and every other node the annulus
// [r_j - dr/2, r_j + dr/2] (truncated at R). With these weights the ghost-node
// Laplacian is exactly minus the gradient of the discrete Dirichlet form, so
// energies, multipliers and residuals computed from the same profile are
// mutually consistent to rounding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satsol/error.hpp"

namespace satsol {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform mesh r_j = j*dr, j = 0..n, on the disk of radius R.
class RadialGrid {
public:
    static constexpr std::size_t min_intervals = 16;

    RadialGrid(double radius, std::size_t intervals)
        : radius_(radius), intervals_(intervals), spacing_(radius / static_cast<double>(intervals)) {
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw InvalidArgument("radial grid: radius must be positive and finite, got " +
                                  std::to_string(radius));
        }
        if (intervals < min_intervals) {
            throw InvalidArgument("radial grid: need at least 16 intervals, got " +
                                  std::to_string(intervals));
        }
    }

    double radius() const noexcept { return radius_; }
    std::size_t intervals() const noexcept { return intervals_; }
    std::size_t size() const noexcept { return intervals_ + 1; }
    double spacing() const noexcept { return spacing_; }

    double node(std::size_t j) const noexcept {
        return j == intervals_ ? radius_ : static_cast<double>(j) * spacing_;
    }

    /// Quadrature weight of node j, including the 2*pi of the angular integral.
    double weight(std::size_t j) const noexcept {
        if (j == 0) {
            return two_pi * spacing_ * spacing_ / 8.0;
        }
        if (j == intervals_) {
            return two_pi * radius_ * spacing_ / 2.0;
        }
        return two_pi * node(j) * spacing_;
    }

    std::vector<double> nodes() const {
        std::vector<double> r(size());
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] = node(j);
        }
        return r;
    }

    friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

private:
    double radius_;
    std::size_t intervals_;
    double spacing_;
};

inline RadialGrid make_grid(double radius, std::size_t intervals) {
    return RadialGrid(radius, intervals);
}

/// Grid of fixed spacing whose radius is the nearest multiple of `spacing` to `radius`.
inline RadialGrid grid_with_spacing(double radius, double spacing) {
    if (!(spacing > 0.0) || !(radius > 0.0)) {
        throw InvalidArgument("radial grid: radius and spacing must be positive");
    }
    const auto intervals = static_cast<std::size_t>(std::llround(radius / spacing));
    return RadialGrid(static_cast<double>(intervals) * spacing, intervals);
}

/// Real samples of a radial function on a RadialGrid.
class RadialProfile {
public:
    explicit RadialProfile(RadialGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

    RadialProfile(RadialGrid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw InvalidArgument("radial profile: expected " + std::to_string(grid_.size()) +
                                  " samples, got " + std::to_string(values_.size()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw InvalidArgument("radial profile: non-finite sample");
            }
        }
    }

    template <class F>
    static RadialProfile sample(RadialGrid grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] = f(grid.node(j));
        }
        return RadialProfile(grid, std::move(v));
    }

    const RadialGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t j) const noexcept { return values_[j]; }
    double& operator[](std::size_t j) noexcept { return values_[j]; }
    double front() const noexcept { return values_.front(); }
    double back() const noexcept { return values_.back(); }

    template <class F>
    RadialProfile map(F&& f) const {
        RadialProfile out(grid_);
        for (std::size_t j = 0; j < values_.size(); ++j) {
            out.values_[j] = f(values_[j]);
        }
        return out;
    }

    RadialProfile& operator*=(double c) noexcept {
        for (double& v : values_) {
            v *= c;
        }
        return *this;
    }

private:
    RadialGrid grid_;
    std::vector<double> values_;
};

/// Integral over the plane of a radial function, 2*pi * int_0^R f(r) r dr.
inline double integrate_radial(const RadialProfile& f) {
    const auto& g = f.grid();
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        sum += g.weight(j) * f[j];
    }
    return sum;
}

/// Weighted inner product matching integrate_radial.
inline double inner_radial(const RadialProfile& f, const RadialProfile& g) {
    if (!(f.grid() == g.grid())) {
        throw InvalidArgument("inner_radial: profiles live on different grids");
    }
    const auto& grid = f.grid();
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        sum += grid.weight(j) * f[j] * g[j];
    }
    return sum;
}

/// f'' + f'/r with an even ghost node at the origin (where the limit is 2 f''(0)).
/// The last node carries the Dirichlet constraint and its entry is zero.
inline RadialProfile radial_laplacian(const RadialProfile& f) {
    const auto& g = f.grid();
    const std::size_t n = g.intervals();
    if (n < 3) {
        throw InvalidArgument("radial_laplacian: grid too small");
    }
    const double h = g.spacing();
    const double inv_h2 = 1.0 / (h * h);
    RadialProfile out(g);
    out[0] = 4.0 * (f[1] - f[0]) * inv_h2;
    for (std::size_t j = 1; j < n; ++j) {
        const double jj = static_cast<double>(j);
        // (r_{j+1/2}(f_{j+1}-f_j) - r_{j-1/2}(f_j-f_{j-1})) / (r_j h^2)
        out[j] = ((jj + 0.5) * (f[j + 1] - f[j]) - (jj - 0.5) * (f[j] - f[j - 1])) * inv_h2 / jj;
    }
    out[n] = 0.0;
    return out;
}

/// Discrete Dirichlet form 2*pi * sum_j r_{j+1/2} (f_{j+1}-f_j)(g_{j+1}-g_j)/dr.
inline double gradient_inner(const RadialProfile& f, const RadialProfile& g) {
    if (!(f.grid() == g.grid())) {
        throw InvalidArgument("gradient_inner: profiles live on different grids");
    }
    const auto& grid = f.grid();
    const double h = grid.spacing();
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < f.size(); ++j) {
        const double mid = (static_cast<double>(j) + 0.5) * h;
        sum += mid * (f[j + 1] - f[j]) * (g[j + 1] - g[j]);
    }
    return two_pi * sum / h;
}

/// int |grad f|^2 over the plane; differences are centered at the cell midpoints.
inline double gradient_norm_sq(const RadialProfile& f) { return gradient_inner(f, f); }

/// Profile on a grid of identical spacing and larger radius; new nodes are zero.
inline RadialProfile extend_by_zero(const RadialProfile& f, const RadialGrid& target) {
    const auto& g = f.grid();
    if (std::abs(g.spacing() - target.spacing()) > 1e-12 * g.spacing() ||
        target.intervals() < g.intervals()) {
        throw InvalidArgument("extend_by_zero: target must share spacing and be at least as large");
    }
    RadialProfile out(target);
    for (std::size_t j = 0; j < f.size(); ++j) {
        out[j] = f[j];
    }
    return out;
}

/// Cubic (Catmull-Rom) interpolation of a profile at radius r, even about r = 0,
/// zero beyond the outer radius.
inline double interpolate(const RadialProfile& f, double r) {
    const auto& g = f.grid();
    r = std::abs(r);
    if (r >= g.radius()) {
        return 0.0;
    }
    const double t = r / g.spacing();
    const auto j = static_cast<std::ptrdiff_t>(std::floor(t));
    const double u = t - static_cast<double>(j);
    const auto n = static_cast<std::ptrdiff_t>(g.intervals());
    auto at = [&](std::ptrdiff_t k) {
        if (k < 0) {
            k = -k;
        }
        return k > n ? 0.0 : f[static_cast<std::size_t>(k)];
    };
    const double p0 = at(j - 1), p1 = at(j), p2 = at(j + 1), p3 = at(j + 2);
    return p1 + 0.5 * u *
                    (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                    u * (3.0 * (p1 - p2) + p3 - p0)));
}

/// Resample onto another grid by cubic interpolation.
inline RadialProfile resample(const RadialProfile& f, const RadialGrid& target) {
    return RadialProfile::sample(target, [&](double r) { return interpolate(f, r); });
}

inline double sup_norm(const RadialProfile& f) {
    double m = 0.0;
    for (double v : f.values()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace satsol
