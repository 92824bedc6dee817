#pragma once

// Pass/fail reports for the identities and qualitative properties a ground state
// must satisfy, the vanishing signature of the non-existence regime, and the
// scalar inequalities behind the threshold.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "satsol/defaults.hpp"
#include "satsol/error.hpp"
#include "satsol/functionals.hpp"
#include "satsol/groundstate.hpp"
#include "satsol/radial.hpp"

namespace satsol {

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
};

class DiagnosticsReport {
public:
    void add(std::string name, bool passed, double measured, double tolerance) {
        for (const auto& c : checks_) {
            if (c.name == name) {
                throw InvalidArgument("diagnostics: duplicate check name " + name);
            }
        }
        checks_.push_back({std::move(name), passed, measured, tolerance});
    }

    /// Append every check of `other`, prefixing names to keep them unique.
    void merge(const DiagnosticsReport& other, const std::string& prefix = "") {
        for (const auto& c : other.checks_) {
            add(prefix + c.name, c.passed, c.measured, c.tolerance);
        }
    }

    const std::vector<Check>& checks() const noexcept { return checks_; }

    bool overall() const noexcept {
        return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
    }

    const Check* find(const std::string& name) const {
        for (const auto& c : checks_) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }

private:
    std::vector<Check> checks_;
};

struct GroundStateTolerances {
    double normalization = 1e-8;
    double el_residual = 1e-6;
    double pohozaev = 1e-4;
    double multipliers = 1e-4;
    double decay = 0.05;
};

/// Every check is computed from the stored profile and gamma, plus the stored
/// lambda where the check is about lambda; no check reuses another's result.
inline DiagnosticsReport verify_ground_state(const GroundState& gs,
                                             const GroundStateTolerances& tol = {}) {
    const RadialProfile& rho = gs.profile;
    const double gamma = gs.gamma;
    DiagnosticsReport rep;

    const double p = power_P(rho);
    rep.add("normalization", std::abs(p - 1.0) <= tol.normalization, std::abs(p - 1.0),
            tol.normalization);

    const double el = el_residual(rho, gamma, gs.lambda);
    rep.add("el_residual", el < tol.el_residual, el, tol.el_residual);

    const double pz = pohozaev_residual(rho, gamma, gs.lambda);
    rep.add("pohozaev_residual", pz < tol.pohozaev, pz, tol.pohozaev);

    const double pz2 = -gradient_norm_sq(rho) - gamma * saturated_quartic(rho);
    const double pz1 = pohozaev_lambda(rho, gamma);
    const double consistency = std::abs(pz1 - pz2) / std::max(std::abs(pz2), 1e-300);
    rep.add("multiplier_consistency", consistency < tol.multipliers, consistency, tol.multipliers);

    rep.add("lambda_positive", gs.lambda > 0.0, gs.lambda, 0.0);

    const double mu = energy_H(rho, gamma);
    rep.add("mu_negative", mu < 0.0, mu, 0.0);

    const std::size_t n = rho.grid().intervals();
    double lowest = std::numeric_limits<double>::infinity();
    double worst_rise = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        lowest = std::min(lowest, rho[j]);
        worst_rise = std::max(worst_rise, rho[j + 1] - rho[j]);
    }
    rep.add("positivity", lowest > 0.0, lowest, 0.0);
    rep.add("monotonicity", worst_rise < 0.0, worst_rise, 0.0);

    double decay_err = std::numeric_limits<double>::infinity();
    if (gs.lambda > 0.0) {
        try {
            const double k = std::sqrt(gs.lambda);
            decay_err = std::abs(decay_rate(rho) - k) / k;
        } catch (const NumericalFailure&) {
        }
    }
    rep.add("decay_exponent", decay_err < tol.decay, decay_err, tol.decay);
    return rep;
}

/// One entry of a ball-continuation series at fixed gamma.
struct BallRecord {
    double radius = 0.0;
    double mu = 0.0;
    double sup_rho = 0.0;
};

struct VanishingThresholds {
    double amplitude_ratio = defaults::vanishing_amplitude_ratio;
    double energy = defaults::vanishing_energy;
};

struct VanishingSummary {
    bool monotone = false;
    double amplitude_ratio = 0.0; ///< sup rho(final) / sup rho(initial)
    double final_mu = 0.0;
    bool vanishing = false;
};

inline VanishingSummary analyze_vanishing(const std::vector<BallRecord>& series,
                                          const VanishingThresholds& th = {}) {
    if (series.size() < 3) {
        throw InvalidArgument("detect_vanishing: need at least three ball records");
    }
    VanishingSummary s;
    s.monotone = true;
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].radius > series[i - 1].radius)) {
            throw InvalidArgument("detect_vanishing: radii must increase");
        }
        s.monotone = s.monotone && series[i].sup_rho < series[i - 1].sup_rho;
    }
    s.amplitude_ratio = series.back().sup_rho / series.front().sup_rho;
    s.final_mu = series.back().mu;
    s.vanishing = s.monotone && s.amplitude_ratio < th.amplitude_ratio &&
                  std::abs(s.final_mu) < th.energy;
    return s;
}

/// True when the series shows the spreading-out signature: amplitude falling
/// monotonically by the configured ratio and the ball energy tending to zero.
inline bool detect_vanishing(const std::vector<BallRecord>& series,
                             const VanishingThresholds& th = {}) {
    return analyze_vanishing(series, th).vanishing;
}

/// Flow solves at fixed gamma over a radius schedule, warm-started, as BallRecords.
inline std::vector<BallRecord> ball_series(double gamma, const FlowConfig& cfg) {
    std::vector<BallRecord> out;
    std::optional<BallSolution> prev;
    for (double radius : cfg.ball_schedule) {
        BallSolution b = solve_ball(gamma, radius, cfg, prev ? &prev->profile : nullptr);
        out.push_back({b.profile.grid().radius(), b.mu, sup_norm(b.profile)});
        prev = std::move(b);
    }
    return out;
}

/// Logarithmically spaced samples on [lo, hi].
template <std::floating_point Real = double>
std::vector<Real> log_grid(std::size_t points = 10000, Real lo = Real(1e-8), Real hi = Real(1e6)) {
    if (points < 2 || !(lo > Real(0)) || !(hi > lo)) {
        throw InvalidArgument("log_grid: need at least two points on a positive interval");
    }
    std::vector<Real> s(points);
    const Real a = std::log(lo);
    const Real b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i) {
        s[i] = std::exp(a + (b - a) * static_cast<Real>(i) / static_cast<Real>(points - 1));
    }
    s.front() = lo;
    s.back() = hi;
    return s;
}

/// h(s) < 1/2 and strictly decreasing, sup h -> 1/2 as s -> 0, F(s) >= 0 with
/// equality only at 0. The sup-approach check only runs when a sample is <= 1e-6.
template <std::floating_point Real>
DiagnosticsReport inequality_suite(std::vector<Real> samples) {
    if (samples.empty()) {
        throw InvalidArgument("inequality_suite: empty sample set");
    }
    for (Real s : samples) {
        if (!(s >= Real(0))) {
            throw InvalidArgument("inequality_suite: samples must be non-negative");
        }
    }
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

    DiagnosticsReport rep;
    std::vector<Real> hs;
    Real smallest_positive = std::numeric_limits<Real>::infinity();
    for (Real s : samples) {
        if (s > Real(0)) {
            hs.push_back(h_ratio(s));
            smallest_positive = std::min(smallest_positive, s);
        }
    }
    if (!hs.empty()) {
        const Real hmax = *std::max_element(hs.begin(), hs.end());
        rep.add("h_below_half", hmax < Real(0.5), static_cast<double>(hmax), 0.5);
        Real rise = -std::numeric_limits<Real>::infinity();
        for (std::size_t i = 1; i < hs.size(); ++i) {
            rise = std::max(rise, hs[i] - hs[i - 1]);
        }
        if (hs.size() > 1) {
            rep.add("h_decreasing", rise < Real(0), static_cast<double>(rise), 0.0);
        }
        if (smallest_positive <= Real(1e-6)) {
            const Real gap = Real(0.5) - hmax;
            rep.add("h_sup_approach", gap <= Real(1e-6), static_cast<double>(gap), 1e-6);
        }
    }

    Real fmin = std::numeric_limits<Real>::infinity();
    Real fmin_positive = std::numeric_limits<Real>::infinity();
    for (Real s : samples) {
        const Real f = f_aux(s);
        fmin = std::min(fmin, f);
        if (s > Real(0)) {
            fmin_positive = std::min(fmin_positive, f);
        }
    }
    rep.add("f_aux_nonnegative", fmin >= Real(0), static_cast<double>(fmin), 0.0);
    if (samples.front() == Real(0)) {
        const Real f0 = f_aux(Real(0));
        rep.add("f_aux_zero_at_origin", std::abs(f0) <= Real(1e-14), static_cast<double>(std::abs(f0)),
                1e-14);
    }
    if (std::isfinite(static_cast<double>(fmin_positive))) {
        rep.add("f_aux_positive", fmin_positive > Real(0), static_cast<double>(fmin_positive), 0.0);
    }
    return rep;
}

/// Smooth, positive, normalized radial profiles built from random Gaussian mixtures.
inline std::vector<RadialProfile> random_smooth_profiles(std::size_t count, std::uint64_t seed,
                                                         const RadialGrid& grid = make_grid(12.0, 1024)) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> width(0.5, 2.5);
    std::uniform_int_distribution<int> terms(1, 4);
    std::vector<RadialProfile> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const int m = terms(rng);
        std::vector<std::pair<double, double>> mix;
        for (int i = 0; i < m; ++i) {
            const double a = amp(rng);
            mix.emplace_back(a, width(rng));
        }
        RadialProfile p = RadialProfile::sample(grid, [&](double r) {
            double v = 0.0;
            for (auto [a, w] : mix) {
                v += a * std::exp(-r * r / (2.0 * w * w));
            }
            return v;
        });
        p[grid.intervals()] = 0.0;
        out.push_back(normalized(std::move(p)));
    }
    return out;
}

inline const std::vector<double>& default_polar_phases() {
    static const std::vector<double> phases{0.0, 0.7, std::numbers::pi / 4.0, 2.0};
    return phases;
}

/// E[rho cos phi, rho sin phi] must not depend on phi; one check per profile with the
/// largest relative deviation from the phi = 0 value.
inline DiagnosticsReport polar_invariance_report(const std::vector<RadialProfile>& profiles,
                                                 double gamma = -30.0,
                                                 const std::vector<double>& phases = default_polar_phases(),
                                                 double tol = 1e-12) {
    if (profiles.empty() || phases.empty()) {
        throw InvalidArgument("polar_invariance_report: need profiles and phases");
    }
    DiagnosticsReport rep;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const double ref = energy_H(profiles[k], gamma);
        double worst = 0.0;
        for (double phi : phases) {
            const double e = energy_E_polar(profiles[k], phi, gamma);
            worst = std::max(worst, std::abs(e - ref) / std::max(std::abs(ref), 1e-300));
        }
        rep.add("polar_invariance_" + std::to_string(k), worst <= tol, worst, tol);
    }
    return rep;
}

} // namespace satsol
