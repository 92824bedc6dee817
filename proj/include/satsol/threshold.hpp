#pragma once

// Existence threshold T0 = inf |grad w|^2 / int[w^2 - ln(1+w^2)] over unit-power w.
//
// The infimum is approached by spreading a profile out (w_delta(x) = delta w(delta x),
// delta -> 0), where the quotient tends to |grad w|^2 / (1/2 ||w||_4^4). The smallest
// such limit is attained by the Townes soliton Q (Delta Q - Q + Q^3 = 0) and equals
// its squared L2 norm, so T0 is reported as ||Q||^2 together with a decreasing
// sequence of trial quotients that certifies it from above.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "satsol/defaults.hpp"
#include "satsol/error.hpp"
#include "satsol/functionals.hpp"
#include "satsol/radial.hpp"

namespace satsol {

struct TownesResult {
    RadialProfile profile;
    double amplitude = 0.0; ///< Q(0)
    double mass = 0.0;      ///< ||Q||_2^2
};

struct UpperBound {
    double delta = 0.0;
    double quotient = 0.0;
};

struct ThresholdEstimate {
    std::vector<UpperBound> upper_bounds;
    double townes_mass = 0.0;
    double T0_estimate = 0.0;
    double bracket_width = 0.0;
};

enum class Classification { NoGroundState, GroundStateExists, Marginal };

inline const char* to_string(Classification c) {
    switch (c) {
    case Classification::NoGroundState:
        return "NoGroundState";
    case Classification::GroundStateExists:
        return "GroundStateExists";
    case Classification::Marginal:
        return "Marginal";
    }
    return "?";
}

namespace detail {

enum class ShotFate { Undershoot, Overshoot, Undecided };

// Forward march of the discrete equation Delta_h Q = Q - Q^3 from Q(0) = a with the
// even ghost node; stops at the first zero crossing (overshoot) or the first
// non-decreasing step (undershoot).
inline ShotFate march_townes(const RadialGrid& grid, double a, std::vector<double>& q) {
    const double h2 = grid.spacing() * grid.spacing();
    const std::size_t n = grid.intervals();
    q.assign(grid.size(), 0.0);
    q[0] = a;
    q[1] = a + h2 * (a - a * a * a) / 4.0;
    if (q[1] <= 0.0) {
        return ShotFate::Overshoot;
    }
    if (q[1] >= q[0]) {
        return ShotFate::Undershoot;
    }
    for (std::size_t j = 1; j < n; ++j) {
        const double jj = static_cast<double>(j);
        const double f = q[j] - q[j] * q[j] * q[j];
        q[j + 1] = q[j] + (jj * h2 * f + (jj - 0.5) * (q[j] - q[j - 1])) / (jj + 0.5);
        if (q[j + 1] <= 0.0) {
            return ShotFate::Overshoot;
        }
        if (q[j + 1] >= q[j]) {
            return ShotFate::Undershoot;
        }
    }
    return ShotFate::Undecided;
}

// Forward march without stopping, nodes 0..last.
inline void march_townes_to(const RadialGrid& grid, double a, std::size_t last,
                            std::vector<double>& q) {
    const double h2 = grid.spacing() * grid.spacing();
    q.assign(grid.size(), 0.0);
    q[0] = a;
    q[1] = a + h2 * (a - a * a * a) / 4.0;
    for (std::size_t j = 1; j < last; ++j) {
        const double jj = static_cast<double>(j);
        const double f = q[j] - q[j] * q[j] * q[j];
        q[j + 1] = q[j] + (jj * h2 * f + (jj - 0.5) * (q[j] - q[j - 1])) / (jj + 0.5);
    }
}

// Backward march of the same discrete equation from the Dirichlet node, scaled so the
// value at node `join` equals `target`. The backward direction is stable for the
// decaying branch; the cubic term is kept so the join is exact for the full equation.
inline std::vector<double> townes_tail(const RadialGrid& grid, std::size_t join, double target) {
    const double h2 = grid.spacing() * grid.spacing();
    const std::size_t n = grid.intervals();
    std::vector<double> z(grid.size(), 0.0);
    auto march = [&](double seed, bool cubic) {
        z.assign(grid.size(), 0.0);
        z[n - 1] = seed;
        for (std::size_t j = n - 1; j > join; --j) {
            const double jj = static_cast<double>(j);
            const double f = z[j] - (cubic ? z[j] * z[j] * z[j] : 0.0);
            z[j - 1] = ((2.0 * jj) * z[j] + jj * h2 * f - (jj + 0.5) * z[j + 1]) / (jj - 0.5);
        }
        return z[join];
    };
    // Linear march fixes the scale; a few secant steps absorb the cubic term.
    double s0 = target / march(1.0, false);
    double v0 = march(s0, true) - target;
    double s1 = s0 * (1.0 - v0 / target);
    double v1 = march(s1, true) - target;
    for (int it = 0; it < 50 && std::abs(v1) > 1e-15 * target && v1 != v0; ++it) {
        const double s2 = s1 - v1 * (s1 - s0) / (v1 - v0);
        s0 = s1;
        v0 = v1;
        s1 = s2;
        v1 = march(s1, true) - target;
    }
    march(s1, true);
    return z;
}

} // namespace detail

/// Townes soliton on `grid` by shooting on Q(0) in [1, 4] until the bracket is
/// narrower than `tol`.
inline TownesResult townes_profile(double tol = defaults::townes_tol,
                                   RadialGrid grid = make_grid(defaults::townes_radius,
                                                               defaults::townes_intervals)) {
    if (!(tol > 1e-12 && tol < 1e-4)) {
        throw InvalidArgument("townes_profile: tol must lie in (1e-12, 1e-4)");
    }
    using detail::ShotFate;
    std::vector<double> q_lo;
    std::vector<double> q_hi;
    double lo = 1.0;
    double hi = 4.0;
    if (detail::march_townes(grid, lo, q_lo) != ShotFate::Undershoot ||
        detail::march_townes(grid, hi, q_hi) != ShotFate::Overshoot) {
        throw BracketError("townes_profile: no decay/blow-up bracket in [1, 4]");
    }
    std::vector<double> q;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const ShotFate fate = detail::march_townes(grid, mid, q);
        if (fate == ShotFate::Overshoot) {
            hi = mid;
        } else if (fate == ShotFate::Undershoot) {
            lo = mid;
        } else {
            lo = hi = mid;
            break;
        }
    }
    detail::march_townes(grid, lo, q_lo);
    detail::march_townes(grid, hi, q_hi);

    // Join node: inside the region where both bracket ends still agree, at most mid-grid.
    const std::size_t n = grid.intervals();
    std::size_t join = 1;
    while (join + 1 < n / 2 && q_lo[join + 1] > 0.0 && q_hi[join + 1] > 0.0 &&
           q_lo[join + 1] < q_lo[join] && q_hi[join + 1] < q_hi[join] &&
           std::abs(q_lo[join + 1] - q_hi[join + 1]) <= 1e-6 * q_lo[join + 1]) {
        ++join;
    }
    if (join < 2) {
        throw NumericalFailure("townes_profile: shooting bracket never resolved the core");
    }

    // Fitting-point match: the forward march from Q(0) = a and the backward tail
    // (which carries the Dirichlet condition) must agree at node join+1 once their
    // values agree at `join`. The Dirichlet root sits just outside the decay/blow-up
    // bracket, so this is a plain secant started from the bracket ends.
    std::vector<double> fwd;
    std::vector<double> tail;
    auto mismatch = [&](double a) {
        detail::march_townes_to(grid, a, join + 1, fwd);
        tail = detail::townes_tail(grid, join, fwd[join]);
        return (fwd[join + 1] - tail[join + 1]) / fwd[join];
    };
    double a0 = lo;
    double a = hi > lo ? hi : lo + tol;
    double m0 = mismatch(a0);
    double m1 = mismatch(a);
    for (int it = 0; it < 30 && m1 != 0.0 && m1 != m0; ++it) {
        const double next = a - m1 * (a - a0) / (m1 - m0);
        a0 = a;
        m0 = m1;
        a = next;
        m1 = mismatch(a);
        if (std::abs(a - a0) <= 4.0 * std::numeric_limits<double>::epsilon() * a) {
            break;
        }
    }
    if (!std::isfinite(a) || std::abs(a - 0.5 * (lo + hi)) > 1e-6) {
        throw NumericalFailure("townes_profile: fitting-point match drifted from the shooting bracket");
    }
    mismatch(a);
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t j = 0; j <= join; ++j) {
        values[j] = fwd[j];
    }
    for (std::size_t j = join + 1; j < n; ++j) {
        values[j] = tail[j];
    }
    values[n] = 0.0;
    RadialProfile profile(grid, std::move(values));
    const double mass = power_P(profile);
    return TownesResult{std::move(profile), a, mass};
}

/// ||Delta_h Q - Q + Q^3|| / ||Q|| over the non-boundary nodes.
inline double townes_residual(const RadialProfile& q) {
    const RadialProfile lap = radial_laplacian(q);
    RadialProfile res(q.grid());
    for (std::size_t j = 0; j + 1 < q.size(); ++j) {
        res[j] = lap[j] - q[j] + q[j] * q[j] * q[j];
    }
    return std::sqrt(power_P(res) / power_P(q));
}

/// w_delta(x) = delta w(delta x) on a grid of radius R/delta with the same node count,
/// so the rescaling is exact (no interpolation).
inline RadialProfile scaled_trial(const RadialProfile& w, double delta,
                                  double max_radius = defaults::max_trial_radius) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw InvalidArgument("scaled_trial: scale must lie in (0, 1]");
    }
    const double radius = w.grid().radius() / delta;
    if (radius > max_radius) {
        throw ResourceError("scaled_trial: scaled radius " + std::to_string(radius) +
                            " exceeds the configured maximum " + std::to_string(max_radius));
    }
    std::vector<double> v(w.values().begin(), w.values().end());
    for (double& x : v) {
        x *= delta;
    }
    return RadialProfile(RadialGrid(radius, w.grid().intervals()), std::move(v));
}

/// Rayleigh quotients of the spread-out trial functions w_delta, each renormalized.
inline std::vector<UpperBound> upper_bound_sequence(const RadialProfile& w,
                                                    const std::vector<double>& deltas,
                                                    double max_radius = defaults::max_trial_radius) {
    if (std::abs(power_P(w) - 1.0) > 1e-8) {
        throw InvalidArgument("upper_bound_sequence: trial profile must have unit power");
    }
    std::vector<UpperBound> out;
    out.reserve(deltas.size());
    for (double delta : deltas) {
        out.push_back({delta, rayleigh_Q(normalized(scaled_trial(w, delta, max_radius)))});
    }
    return out;
}

/// delta_k = ratio^k, k = 0..terms-1
inline std::vector<double> geometric_deltas(std::size_t terms = defaults::delta_terms,
                                            double ratio = defaults::delta_ratio) {
    std::vector<double> d(terms);
    double x = 1.0;
    for (auto& v : d) {
        v = x;
        x *= ratio;
    }
    return d;
}

enum class TrialFunction { Townes, Gaussian };

struct ThresholdOptions {
    double tol = defaults::townes_tol;
    double radius = defaults::townes_radius;
    std::size_t intervals = defaults::townes_intervals;
    std::vector<double> deltas = geometric_deltas();
    TrialFunction trial = TrialFunction::Townes;
    double max_radius = defaults::max_trial_radius;
};

/// Assemble a ThresholdEstimate from the given Townes solution and trial sequence.
inline ThresholdEstimate make_estimate(double townes_mass, std::vector<UpperBound> bounds) {
    if (!(townes_mass > 0.0)) {
        throw NumericalFailure("threshold: non-positive Townes mass");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : bounds) {
        if (!(b.quotient > townes_mass)) {
            throw NumericalFailure("threshold: trial quotient " + std::to_string(b.quotient) +
                                   " does not exceed the Townes mass " +
                                   std::to_string(townes_mass));
        }
        best = std::min(best, b.quotient);
    }
    ThresholdEstimate est;
    est.upper_bounds = std::move(bounds);
    est.townes_mass = townes_mass;
    est.T0_estimate = townes_mass;
    est.bracket_width = std::isfinite(best) ? best - townes_mass : 0.0;
    return est;
}

inline ThresholdEstimate estimate_threshold(const ThresholdOptions& opt = {}) {
    const RadialGrid grid(opt.radius, opt.intervals);
    TownesResult townes = townes_profile(opt.tol, grid);
    RadialProfile trial = opt.trial == TrialFunction::Townes
                              ? normalized(townes.profile)
                              : normalized(RadialProfile::sample(grid, [](double r) {
                                    return unit_gaussian(r);
                                }));
    return make_estimate(townes.mass, upper_bound_sequence(trial, opt.deltas, opt.max_radius));
}

/// Existence regime of the ground state at coupling gamma.
inline Classification classify_gamma(double gamma, const ThresholdEstimate& est) {
    const double gap = gamma + est.T0_estimate;
    if (std::abs(gap) <= est.bracket_width) {
        return Classification::Marginal;
    }
    return gap > 0.0 ? Classification::NoGroundState : Classification::GroundStateExists;
}

} // namespace satsol
