#pragma once

// Shared fixtures for the unit suites. The Gamma = -30 ground state takes a few
// seconds, so each test binary computes it at most once.

#include "satsol/satsol.hpp"

namespace satsol::fixtures {

inline const ThresholdEstimate& threshold() {
    static const ThresholdEstimate est = estimate_threshold();
    return est;
}

inline const GroundState& ground_state_30() {
    static const GroundState gs = solve_ground_state(-30.0, FlowConfig{}, threshold());
    return gs;
}

/// Coarse flow settings for qualitative tests.
inline FlowConfig coarse_flow(double dr = 1.0 / 64.0) {
    FlowConfig cfg;
    cfg.with_spacing(dr);
    return cfg;
}

inline RadialProfile unit_gaussian_on(const RadialGrid& g, double width = 1.0) {
    return RadialProfile::sample(g, [width](double r) { return unit_gaussian(r, width); });
}

// Continuum oracles (mpmath/scipy, tests/oracles/derive_values.py).
inline constexpr double oracle_townes_amplitude = 2.2062008647;
inline constexpr double oracle_townes_mass = 11.70089629;
inline constexpr double oracle_gs30_lambda = 6.9736852537;
inline constexpr double oracle_gs30_mu = -2.4726564887;
inline constexpr double oracle_gs30_rho0 = 1.2799891639;

} // namespace satsol::fixtures
