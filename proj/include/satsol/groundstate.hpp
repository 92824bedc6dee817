#pragma once

// Ground states: minimizers of H[rho] = int |grad rho|^2 + gamma [rho^2 - ln(1+rho^2)]
// at unit power, computed by a normalized gradient flow on a sequence of growing
// Dirichlet balls, plus an independent shooting solve of the radial
// Euler-Lagrange equation  rho'' + rho'/r - gamma rho^3/(1+rho^2) = lambda rho.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "satsol/defaults.hpp"
#include "satsol/error.hpp"
#include "satsol/functionals.hpp"
#include "satsol/radial.hpp"
#include "satsol/threshold.hpp"

namespace satsol {

struct FlowConfig {
    double spacing = defaults::flow_spacing; ///< dr, shared by every ball
    double step = defaults::flow_step_factor * defaults::flow_spacing * defaults::flow_spacing;
    long max_iters = defaults::flow_max_iters;
    double residual_tol = defaults::flow_residual_tol; ///< el_residual stopping threshold
    double tail_tol = defaults::flow_tail_tol; ///< pointwise relative residual in the tail
    std::vector<double> ball_schedule = defaults::ball_schedule();
    double seed_width = defaults::flow_seed_width;
    long check_every = defaults::flow_check_every;
    long trace_stride = defaults::flow_trace_stride;
    int divergence_window = defaults::flow_divergence_window;
    double mu_tol = defaults::ball_mu_tol;             ///< ball-to-ball change in mu
    double boundary_tol = defaults::ball_boundary_tol; ///< rho(0.9 R) at the accepted ball

    /// Spacing and the matching 0.4 dr^2 step together.
    FlowConfig& with_spacing(double dr) {
        spacing = dr;
        step = defaults::flow_step_factor * dr * dr;
        return *this;
    }

    void validate() const {
        if (!(spacing > 0.0) || !(step > 0.0)) {
            throw InvalidArgument("flow config: spacing and step must be positive");
        }
        if (!(residual_tol > 1e-12 && residual_tol < 1e-2)) {
            throw InvalidArgument("flow config: residual_tol must lie in (1e-12, 1e-2)");
        }
        if (!(tail_tol > 0.0) || max_iters < 1 || check_every < 1 || trace_stride < 1 ||
            divergence_window < 1) {
            throw InvalidArgument("flow config: non-positive tolerance or count");
        }
        if (ball_schedule.empty()) {
            throw InvalidArgument("flow config: empty ball schedule");
        }
        for (std::size_t i = 0; i < ball_schedule.size(); ++i) {
            if (!(ball_schedule[i] > 0.0) || (i > 0 && !(ball_schedule[i] > ball_schedule[i - 1]))) {
                throw InvalidArgument("flow config: ball schedule must be positive and strictly increasing");
            }
        }
    }
};

struct TraceEntry {
    long iter = 0;
    double energy = 0.0;
    double sup_rho = 0.0;
};

using FlowTrace = std::vector<TraceEntry>;

class FlowConvergenceError : public ConvergenceError {
public:
    FlowConvergenceError(const std::string& what, FlowTrace trace)
        : ConvergenceError(what), trace_(std::move(trace)) {}
    const FlowTrace& trace() const noexcept { return trace_; }

private:
    FlowTrace trace_;
};

struct BallSolution {
    RadialProfile profile;
    double mu = 0.0;     ///< mu_{gamma,eps} = H at the minimizer
    double lambda = 0.0; ///< multiplier from the pz2 formula
    double el_residual = 0.0;
    double tail_residual = 0.0;
    long iterations = 0;
    FlowTrace trace;
};

struct GroundState {
    double gamma = 0.0;
    RadialProfile profile;
    double lambda = 0.0;
    double mu = 0.0;
    double el_residual = 0.0;
    double pohozaev = 0.0;   ///< pohozaev_residual(profile, gamma, lambda)
    double lambda_pz1 = 0.0;
    std::vector<std::pair<double, double>> ball_energies; ///< (R, mu_{gamma,eps})
    double decay_rate = 0.0; ///< minus the tail slope of ln(rho sqrt r)
    double phase = 0.0;      ///< global phase, metadata only
};

namespace detail {

// Pointwise residual Delta rho - gamma rho^3/(1+rho^2) - lambda rho on nodes 0..n-1.
inline std::vector<double> el_pointwise(const RadialProfile& rho, double gamma, double lambda) {
    const RadialProfile lap = radial_laplacian(rho);
    std::vector<double> res(rho.size(), 0.0);
    for (std::size_t j = 0; j + 1 < rho.size(); ++j) {
        const double v = rho[j];
        res[j] = lap[j] - gamma * v * v * v / (1.0 + v * v) - lambda * v;
    }
    return res;
}

inline double tail_residual(const RadialProfile& rho, const std::vector<double>& res, double lambda) {
    const double scale = std::max(std::abs(lambda), 1e-300);
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < rho.size(); ++j) {
        if (rho[j] > 1e-300) {
            worst = std::max(worst, std::abs(res[j]) / (scale * rho[j]));
        }
    }
    return worst;
}

} // namespace detail

/// ||Delta rho - gamma rho^3/(1+rho^2) - lambda rho|| / ||rho|| over the non-boundary nodes.
inline double el_residual(const RadialProfile& rho, double gamma, double lambda) {
    const double norm = power_P(rho);
    if (!(norm > 0.0)) {
        return 0.0;
    }
    const std::vector<double> res = detail::el_pointwise(rho, gamma, lambda);
    return std::sqrt(inner_radial(RadialProfile(rho.grid(), res), RadialProfile(rho.grid(), res)) / norm);
}

/// Decay rate from a least-squares fit of ln(rho sqrt r) against r on [lo R, hi R].
inline double decay_rate(const RadialProfile& rho, double lo = 0.5, double hi = 0.8) {
    const auto& g = rho.grid();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (std::size_t j = 1; j < rho.size(); ++j) {
        const double r = g.node(j);
        if (r < lo * g.radius() || r > hi * g.radius() || !(rho[j] > 0.0)) {
            continue;
        }
        const double y = std::log(rho[j] * std::sqrt(r));
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
        ++count;
    }
    if (count < 3) {
        throw NumericalFailure("decay_rate: fewer than three positive samples in the tail window");
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return -slope;
}

/// Normalized gradient flow on the ball of radius R (rounded to a multiple of the
/// configured spacing). Starts from `warm` (extended by zero) or from a Gaussian.
inline BallSolution solve_ball(double gamma, double radius, const FlowConfig& cfg,
                               const RadialProfile* warm = nullptr) {
    cfg.validate();
    if (!(gamma <= 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("solve_ball: coupling must be non-positive and finite");
    }
    const RadialGrid grid = grid_with_spacing(radius, cfg.spacing);
    const std::size_t n = grid.intervals();
    RadialProfile rho = warm != nullptr
                            ? extend_by_zero(*warm, grid)
                            : RadialProfile::sample(grid, [&](double r) {
                                  return unit_gaussian(r, cfg.seed_width);
                              });
    rho[n] = 0.0;
    rho = normalized(std::move(rho));

    std::vector<double> w(grid.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = grid.weight(j);
    }
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const double tau = cfg.step;
    std::vector<double> next(grid.size(), 0.0);
    auto& cur = rho;

    auto energy_of = [&](const RadialProfile& f) {
        double kin = 0.0;
        double pot = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = f[j + 1] - f[j];
            kin += (static_cast<double>(j) + 0.5) * d * d;
            pot += w[j] * g_sat(f[j] * f[j]);
        }
        return two_pi * kin + gamma * pot;
    };

    BallSolution out{rho, 0.0, 0.0, 0.0, 0.0, 0, {}};
    double energy = energy_of(cur);
    double sup = sup_norm(cur);
    out.trace.push_back({0, energy, sup});
    int rising = 0;

    for (long it = 1; it <= cfg.max_iters; ++it) {
        // Explicit descent step on nodes 0..n-1; node n stays zero.
        double p = 0.0;
        {
            const double v0 = cur[0];
            next[0] = v0 + tau * (4.0 * (cur[1] - v0) * inv_h2 - gamma * v0 * v0 * v0 / (1.0 + v0 * v0));
            p += w[0] * next[0] * next[0];
        }
        for (std::size_t j = 1; j < n; ++j) {
            const double jj = static_cast<double>(j);
            const double v = cur[j];
            const double lap = ((jj + 0.5) * (cur[j + 1] - v) - (jj - 0.5) * (v - cur[j - 1])) * inv_h2 / jj;
            next[j] = v + tau * (lap - gamma * v * v * v / (1.0 + v * v));
            p += w[j] * next[j] * next[j];
        }
        next[n] = 0.0;
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw StepSizeError("solve_ball: flow produced a non-finite or zero state; reduce the step");
        }
        const double scale = 1.0 / std::sqrt(p);
        for (std::size_t j = 0; j < n; ++j) {
            cur[j] = next[j] * scale;
        }

        const double e = energy_of(cur);
        rising = e > energy + 1e-12 * std::max(1.0, std::abs(energy)) ? rising + 1 : 0;
        energy = e;
        if (rising >= cfg.divergence_window) {
            out.trace.push_back({it, energy, sup_norm(cur)});
            throw StepSizeError("solve_ball: energy increased for " +
                                std::to_string(cfg.divergence_window) +
                                " consecutive steps; reduce the step (currently " +
                                std::to_string(tau) + ")");
        }
        if (it % cfg.trace_stride == 0) {
            out.trace.push_back({it, energy, sup_norm(cur)});
        }
        if (it % cfg.check_every == 0 || it == cfg.max_iters) {
            const double lambda = -gradient_norm_sq(cur) - gamma * saturated_quartic(cur);
            const std::vector<double> res = detail::el_pointwise(cur, gamma, lambda);
            double num = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                num += w[j] * res[j] * res[j];
            }
            const double el = std::sqrt(num);
            if (el < cfg.residual_tol) {
                const double tail = detail::tail_residual(cur, res, lambda);
                if (tail < cfg.tail_tol) {
                    if (out.trace.back().iter != it) {
                        out.trace.push_back({it, energy, sup_norm(cur)});
                    }
                    out.profile = cur;
                    out.mu = energy;
                    out.lambda = lambda;
                    out.el_residual = el;
                    out.tail_residual = tail;
                    out.iterations = it;
                    return out;
                }
            }
        }
    }
    throw FlowConvergenceError("solve_ball: no convergence within " + std::to_string(cfg.max_iters) +
                                   " iterations at R = " + std::to_string(grid.radius()),
                               std::move(out.trace));
}

/// Ground state at coupling gamma by ball continuation. Refuses couplings outside the
/// existence regime of `est` (computed with default options when not supplied).
inline GroundState solve_ground_state(double gamma, const FlowConfig& cfg = {},
                                      std::optional<ThresholdEstimate> est = std::nullopt) {
    cfg.validate();
    if (!est) {
        est = estimate_threshold();
    }
    const Classification cls = classify_gamma(gamma, *est);
    if (cls != Classification::GroundStateExists) {
        throw DomainError(std::string("solve_ground_state: gamma = ") + std::to_string(gamma) +
                          " is classified " + to_string(cls) + " (threshold T0 ~ " +
                          std::to_string(est->T0_estimate) +
                          "); no ground state exists for gamma > -T0");
    }
    std::vector<std::pair<double, double>> energies;
    std::optional<BallSolution> prev;
    for (double radius : cfg.ball_schedule) {
        BallSolution ball = solve_ball(gamma, radius, cfg, prev ? &prev->profile : nullptr);
        energies.emplace_back(ball.profile.grid().radius(), ball.mu);
        const bool settled = prev && std::abs(ball.mu - prev->mu) < cfg.mu_tol &&
                             std::abs(interpolate(ball.profile, 0.9 * ball.profile.grid().radius())) <
                                 cfg.boundary_tol;
        prev = std::move(ball);
        if (settled) {
            const RadialProfile& rho = prev->profile;
            return GroundState{gamma,
                               rho,
                               prev->lambda,
                               prev->mu,
                               el_residual(rho, gamma, prev->lambda),
                               pohozaev_residual(rho, gamma, prev->lambda),
                               pohozaev_lambda(rho, gamma),
                               std::move(energies),
                               decay_rate(rho),
                               0.0};
        }
    }
    throw ConvergenceError("solve_ground_state: ball schedule exhausted before mu settled");
}

struct ShootResult {
    RadialProfile profile;
    double lambda = 0.0;
    double amplitude = 0.0;
};

namespace detail {

enum class OdeFate { Blowup, Crossing, Undecided };

// RK4 integration of the radial equation on a fine mesh r_k = k h, started from the
// series rho = a + c2 r^2 + c4 r^4. Samples are stored in `out` (size steps + 1).
// Stops at a zero crossing or a turning point when `stop_on_event`.
struct RadialOde {
    double gamma;
    double lambda;

    double force(double v) const { return lambda * v + gamma * v * v * v / (1.0 + v * v); }

    OdeFate run(double a, double h, std::size_t steps, std::vector<double>& out,
                bool stop_on_event) const {
        out.assign(steps + 1, 0.0);
        const double fa = force(a);
        const double dfa = lambda + gamma * a * a * (3.0 + a * a) / ((1.0 + a * a) * (1.0 + a * a));
        const double c2 = fa / 4.0;
        const double c4 = dfa * c2 / 16.0;
        out[0] = a;
        double y = a + h * h * (c2 + c4 * h * h);
        double dy = h * (2.0 * c2 + 4.0 * c4 * h * h);
        out[1] = y;
        auto acc = [&](double r, double v, double dv) { return force(v) - dv / r; };
        for (std::size_t k = 1; k < steps; ++k) {
            const double r = static_cast<double>(k) * h;
            const double k1y = dy;
            const double k1v = acc(r, y, dy);
            const double k2y = dy + 0.5 * h * k1v;
            const double k2v = acc(r + 0.5 * h, y + 0.5 * h * k1y, k2y);
            const double k3y = dy + 0.5 * h * k2v;
            const double k3v = acc(r + 0.5 * h, y + 0.5 * h * k2y, k3y);
            const double k4y = dy + h * k3v;
            const double k4v = acc(r + h, y + h * k3y, k4y);
            y += h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0;
            dy += h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0;
            out[k + 1] = y;
            if (!std::isfinite(y)) {
                return OdeFate::Blowup;
            }
            if (stop_on_event) {
                if (y <= 0.0) {
                    return OdeFate::Crossing;
                }
                if (dy > 0.0) {
                    return OdeFate::Blowup;
                }
            }
        }
        return OdeFate::Undecided;
    }
};

} // namespace detail

/// Shooting solve of the radial Euler-Lagrange equation on `grid`: bisection on rho(0)
/// (zero crossing = too large, turning up = too small) at fixed lambda, and a secant
/// on lambda for unit power. Beyond the region where the shot is trustworthy the
/// profile continues as the linear tail K0(sqrt(lambda) r).
inline ShootResult shoot_ode(double gamma, double lambda_guess, double amp_guess,
                             const RadialGrid& grid = make_grid(12.0, 1536),
                             std::size_t substeps = defaults::shoot_substeps) {
    if (!(gamma < 0.0) || !(lambda_guess > 0.0) || !(amp_guess > 0.0)) {
        throw InvalidArgument("shoot_ode: need gamma < 0, lambda_guess > 0, amp_guess > 0");
    }
    if (substeps < 2 || substeps % 2 != 0) {
        throw InvalidArgument("shoot_ode: substeps must be even and at least 2");
    }
    const double h = grid.spacing() / static_cast<double>(substeps);
    const std::size_t steps = grid.intervals() * substeps;
    // Events are looked for on a mesh twice as long as the grid.
    const std::size_t event_steps = 2 * steps;
    std::vector<double> buf;
    std::vector<double> lo_vals;
    std::vector<double> hi_vals;
    std::vector<double> fine(steps + 1);

    auto profile_at = [&](double lambda, double& amp) {
        const detail::RadialOde ode{gamma, lambda};
        auto fate = [&](double a) { return ode.run(a, h, event_steps, buf, true); };
        double lo = amp;
        double hi = amp;
        if (fate(amp) == detail::OdeFate::Crossing) {
            for (int k = 0;; ++k) {
                if (k == 80) {
                    throw BracketError("shoot_ode: no decaying shot below the amplitude guess");
                }
                hi = lo;
                lo *= 0.9;
                if (fate(lo) != detail::OdeFate::Crossing) {
                    break;
                }
            }
        } else {
            for (int k = 0;; ++k) {
                if (k == 80) {
                    throw BracketError("shoot_ode: no zero-crossing shot above the amplitude guess");
                }
                lo = hi;
                hi *= 1.1;
                if (fate(hi) == detail::OdeFate::Crossing) {
                    break;
                }
            }
        }
        for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            const detail::OdeFate fm = fate(mid);
            if (fm == detail::OdeFate::Crossing) {
                hi = mid;
            } else if (fm == detail::OdeFate::Blowup) {
                lo = mid;
            } else {
                lo = hi = mid;
            }
        }
        amp = 0.5 * (lo + hi);
        ode.run(lo, h, steps, lo_vals, false);
        ode.run(hi, h, steps, hi_vals, false);
        // Trust the shot while both bracket ends agree and still decay.
        std::size_t cut = 1;
        while (cut + 1 <= steps && lo_vals[cut + 1] > 0.0 && hi_vals[cut + 1] > 0.0 &&
               lo_vals[cut + 1] < lo_vals[cut] &&
               std::abs(lo_vals[cut + 1] - hi_vals[cut + 1]) <= 1e-9 * lo_vals[cut + 1]) {
            ++cut;
        }
        const double k = std::sqrt(lambda);
        const double rc = static_cast<double>(cut) * h;
        const double vc = 0.5 * (lo_vals[cut] + hi_vals[cut]);
        const double kc = std::cyl_bessel_k(0.0, k * rc);
        for (std::size_t i = 0; i <= steps; ++i) {
            if (i <= cut) {
                fine[i] = 0.5 * (lo_vals[i] + hi_vals[i]);
            } else {
                const double r = static_cast<double>(i) * h;
                fine[i] = vc * std::cyl_bessel_k(0.0, k * r) / kc;
            }
        }
        // Composite Simpson for 2 pi int rho^2 r dr.
        double s = 0.0;
        for (std::size_t i = 0; i <= steps; ++i) {
            const double r = static_cast<double>(i) * h;
            const double c = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            s += c * fine[i] * fine[i] * r;
        }
        return two_pi * s * h / 3.0;
    };

    double amp = amp_guess;
    double l0 = lambda_guess;
    double p0 = profile_at(l0, amp) - 1.0;
    double l1 = lambda_guess * (1.0 + 1e-3);
    double p1 = profile_at(l1, amp) - 1.0;
    for (int it = 0; it < 60 && std::abs(p1) > 1e-13; ++it) {
        if (p1 == p0) {
            break;
        }
        const double l2 = l1 - p1 * (l1 - l0) / (p1 - p0);
        if (!(l2 > 0.0) || !(l2 < -gamma)) {
            throw ConvergenceError("shoot_ode: multiplier left the admissible range (0, -gamma)");
        }
        l0 = l1;
        p0 = p1;
        l1 = l2;
        p1 = profile_at(l1, amp) - 1.0;
    }
    if (!(std::abs(p1) <= 1e-10)) {
        throw ConvergenceError("shoot_ode: could not reach unit power, defect " + std::to_string(p1));
    }
    std::vector<double> values(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        values[j] = fine[j * substeps];
    }
    values.back() = 0.0;
    return ShootResult{RadialProfile(grid, std::move(values)), l1, amp};
}

struct SweepEntry {
    double gamma = 0.0;
    Classification classification = Classification::NoGroundState;
    std::optional<GroundState> state;
    std::string error; ///< non-empty when the solve failed
};

/// Classify and (where a ground state exists) solve every coupling. Entries run
/// concurrently and come back in input order; a failing entry never aborts the sweep.
inline std::vector<SweepEntry> sweep(const std::vector<double>& gammas, const FlowConfig& cfg = {},
                                     std::optional<ThresholdEstimate> est = std::nullopt) {
    if (gammas.empty()) {
        throw InvalidArgument("sweep: empty coupling list");
    }
    cfg.validate();
    if (!est) {
        est = estimate_threshold();
    }
    std::vector<std::future<SweepEntry>> jobs;
    jobs.reserve(gammas.size());
    for (double gamma : gammas) {
        jobs.push_back(std::async(std::launch::async, [gamma, &cfg, &est]() {
            SweepEntry e;
            e.gamma = gamma;
            e.classification = classify_gamma(gamma, *est);
            if (e.classification == Classification::GroundStateExists) {
                try {
                    e.state = solve_ground_state(gamma, cfg, est);
                } catch (const std::exception& ex) {
                    e.error = ex.what();
                }
            }
            return e;
        }));
    }
    std::vector<SweepEntry> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) {
        out.push_back(j.get());
    }
    return out;
}

} // namespace satsol
