#pragma once

// Energy-type functionals of the saturable model and the scalar auxiliary
// functions used in the existence argument.

#include <cmath>
#include <concepts>
#include <string>

#include "satsol/error.hpp"
#include "satsol/radial.hpp"

namespace satsol {

/// Below this argument the auxiliary functions switch to their Taylor series.
inline constexpr double series_cutoff = 1e-4;
inline constexpr double f_series_cutoff = 0.1;

/// G(s) = s - ln(1+s) >= 0, the saturable potential density at s = rho^2.
template <std::floating_point Real>
Real g_sat(Real s) {
    if (!(s >= Real(0))) {
        throw InvalidArgument("g_sat: argument must be non-negative");
    }
    if (s < Real(series_cutoff)) {
        return s * s * (Real(1) / 2 - s * (Real(1) / 3 - s * (Real(1) / 4 - s / 5)));
    }
    return s - std::log1p(s);
}

/// h(s) = (s - ln(1+s)) / s^2, strictly decreasing from 1/2 on s > 0.
template <std::floating_point Real>
Real h_ratio(Real s) {
    if (!(s > Real(0))) {
        throw InvalidArgument("h_ratio: argument must be positive");
    }
    if (s < Real(series_cutoff)) {
        return Real(1) / 2 - s * (Real(1) / 3 - s * (Real(1) / 4 - s / 5));
    }
    return (s - std::log1p(s)) / (s * s);
}

/// F(s) = 2[s - ln(1+s)] - s^2/(1+s), non-negative with F'(s) = s^2/(1+s)^2.
template <std::floating_point Real>
Real f_aux(Real s) {
    if (!(s >= Real(0))) {
        throw InvalidArgument("f_aux: argument must be non-negative");
    }
    // The closed form cancels to O(s^3), so the series runs much further out than for g.
    if (s < Real(f_series_cutoff)) {
        // sum_{k>=2} (-1)^k (k-1)/(k+1) s^(k+1); 40 terms reach roundoff at s = 0.1
        Real acc = 0;
        for (int k = 41; k >= 2; --k) {
            const Real c = Real(k - 1) / Real(k + 1);
            acc = (k % 2 == 0 ? c : -c) + s * acc;
        }
        return s * s * s * acc;
    }
    return Real(2) * (s - std::log1p(s)) - s * s / (Real(1) + s);
}

/// int [rho^2 - ln(1+rho^2)]
inline double potential_term(const RadialProfile& rho) {
    return integrate_radial(rho.map([](double v) { return g_sat(v * v); }));
}

/// int rho^4/(1+rho^2)
inline double saturated_quartic(const RadialProfile& rho) {
    return integrate_radial(rho.map([](double v) {
        const double s = v * v;
        return s * s / (1.0 + s);
    }));
}

inline double power_P(const RadialProfile& rho) { return inner_radial(rho, rho); }

/// H[rho] = int |grad rho|^2 + gamma [rho^2 - ln(1+rho^2)]
inline double energy_H(const RadialProfile& rho, double gamma) {
    return gradient_norm_sq(rho) + gamma * potential_term(rho);
}

namespace detail {

inline void require_normalized(const RadialProfile& rho, double tol, const char* who) {
    const double p = power_P(rho);
    if (std::abs(p - 1.0) > tol) {
        throw InvalidArgument(std::string(who) + ": profile must have unit power, got P = " +
                              std::to_string(p));
    }
}

} // namespace detail

/// Kinetic-to-potential quotient whose infimum over unit-power profiles is the
/// existence threshold T0.
inline double rayleigh_Q(const RadialProfile& w) {
    detail::require_normalized(w, 1e-8, "rayleigh_Q");
    const double pot = potential_term(w);
    if (!(pot > 0.0)) {
        throw InvalidArgument("rayleigh_Q: profile has zero potential");
    }
    return gradient_norm_sq(w) / pot;
}

/// Multiplier from testing the Euler-Lagrange equation against rho:
/// lambda = -int |grad rho|^2 - gamma int rho^4/(1+rho^2).
inline double lagrange_lambda(const RadialProfile& rho, double gamma) {
    detail::require_normalized(rho, 1e-6, "lagrange_lambda");
    return -gradient_norm_sq(rho) - gamma * saturated_quartic(rho);
}

/// Multiplier predicted by the Pohozaev (dilation) identity: -gamma int G(rho^2).
inline double pohozaev_lambda(const RadialProfile& rho, double gamma) {
    return -gamma * potential_term(rho);
}

/// |lambda + gamma int G(rho^2)| / max(|lambda|, 1e-12)
inline double pohozaev_residual(const RadialProfile& rho, double gamma, double lambda) {
    return std::abs(lambda + gamma * potential_term(rho)) / std::max(std::abs(lambda), 1e-12);
}

/// Pair energy E[u,v] with u = rho cos(phi), v = rho sin(phi) for a constant phase,
/// evaluated from the two component fields.
inline double energy_E_polar(const RadialProfile& rho, double phi, double gamma) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const RadialProfile u = rho.map([c](double v) { return v * c; });
    const RadialProfile v = rho.map([s](double x) { return x * s; });
    RadialProfile density(rho.grid());
    for (std::size_t j = 0; j < density.size(); ++j) {
        density[j] = g_sat(u[j] * u[j] + v[j] * v[j]);
    }
    return gradient_norm_sq(u) + gradient_norm_sq(v) + gamma * integrate_radial(density);
}

struct FunctionalReport {
    double energy_H = 0.0;
    double power_P = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double lambda_pz2 = 0.0;
    double lambda_pz1 = 0.0;
    double pohozaev_residual = 0.0;
};

/// Every functional of a (normalized) profile at coupling gamma.
inline FunctionalReport functional_report(const RadialProfile& rho, double gamma) {
    FunctionalReport r;
    r.kinetic = gradient_norm_sq(rho);
    r.potential = potential_term(rho);
    r.energy_H = r.kinetic + gamma * r.potential;
    r.power_P = power_P(rho);
    r.lambda_pz2 = -r.kinetic - gamma * saturated_quartic(rho);
    r.lambda_pz1 = -gamma * r.potential;
    r.pohozaev_residual = std::abs(r.lambda_pz2 - r.lambda_pz1) /
                          std::max(std::abs(r.lambda_pz2), 1e-12);
    return r;
}

/// Normalized Gaussian pi^{-1/2} width^{-1} exp(-r^2 / (2 width^2)); unit power in the plane.
inline double unit_gaussian(double r, double width = 1.0) {
    return std::exp(-r * r / (2.0 * width * width)) / (std::sqrt(std::numbers::pi) * width);
}

/// Rescale to unit power. Throws on a zero profile.
inline RadialProfile normalized(RadialProfile rho) {
    const double p = power_P(rho);
    if (!(p > 0.0)) {
        throw InvalidArgument("normalized: zero profile");
    }
    rho *= 1.0 / std::sqrt(p);
    return rho;
}

} // namespace satsol
