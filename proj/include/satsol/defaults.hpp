#pragma once

// Every numerical default in one place. The solvers' option structs and the CLI
// read from here; nothing else hard-codes these values.

#include <cstddef>
#include <vector>

namespace satsol::defaults {

// threshold
inline constexpr double townes_tol = 1e-10;
inline constexpr double townes_radius = 12.0;
inline constexpr std::size_t townes_intervals = 1024;
inline constexpr std::size_t delta_terms = 6;
inline constexpr double delta_ratio = 0.5;
inline constexpr double max_trial_radius = 1e4;

// gradient flow
inline constexpr double flow_spacing = 1.0 / 192.0;
inline constexpr double flow_step_factor = 0.4; ///< step = factor * spacing^2
inline constexpr long flow_max_iters = 4'000'000;
inline constexpr double flow_residual_tol = 1e-8;
inline constexpr double flow_tail_tol = 1e-6;
inline constexpr double flow_seed_width = 1.5;
inline constexpr long flow_check_every = 100;
inline constexpr long flow_trace_stride = 100;
inline constexpr int flow_divergence_window = 50;
inline constexpr double ball_mu_tol = 1e-8;
inline constexpr double ball_boundary_tol = 1e-10;
inline std::vector<double> ball_schedule() { return {8.0, 12.0, 16.0, 24.0}; }

// shooting
inline constexpr std::size_t shoot_substeps = 8;

// vanishing signature
inline constexpr double vanishing_amplitude_ratio = 0.1;
inline constexpr double vanishing_energy = 1e-3;

// propagation
inline constexpr double prop_box_half_width = 10.0;
inline constexpr std::size_t prop_samples = 256;
inline constexpr double prop_z = 10.0;
inline constexpr double prop_dz = 1e-3;
inline constexpr double prop_boundary_tol = 1e-8;

// polar invariance suite
inline constexpr std::size_t polar_profiles = 5;
inline constexpr unsigned long long polar_seed = 20240601ULL;

} // namespace satsol::defaults
