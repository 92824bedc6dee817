#pragma once

// Split-step Fourier propagation of the single-beam paraxial equation
//   i F_z + Delta F - gamma |F|^2/(1+|F|^2) F = 0
// on a periodic square box, and the exact relaxation of the slow field E0.
// A stationary state F = e^{i lambda z} rho(|x|) keeps its modulus and turns its
// phase at rate lambda.
//
// Link with -lfftw3.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "satsol/defaults.hpp"
#include "satsol/diagnostics.hpp"
#include "satsol/error.hpp"
#include "satsol/groundstate.hpp"
#include "satsol/radial.hpp"

namespace satsol {

using cplx = std::complex<double>;

/// Complex samples on the periodic square [-L, L)^2, x_i = -L + i dx, dx = 2L/m.
class Field2D {
public:
    Field2D(double box_half_width, std::size_t m)
        : half_width_(box_half_width), m_(m), values_(m * m, cplx(0.0, 0.0)) {
        if (!(box_half_width > 0.0) || !std::isfinite(box_half_width)) {
            throw InvalidArgument("Field2D: box half-width must be positive");
        }
        if (m < 8 || !std::has_single_bit(m)) {
            throw InvalidArgument("Field2D: samples per axis must be a power of two >= 8");
        }
    }

    double box_half_width() const noexcept { return half_width_; }
    std::size_t m() const noexcept { return m_; }
    double dx() const noexcept { return 2.0 * half_width_ / static_cast<double>(m_); }
    double coord(std::size_t i) const noexcept { return -half_width_ + static_cast<double>(i) * dx(); }
    double cell_area() const noexcept { return dx() * dx(); }
    /// Index of x = 0 on each axis.
    std::size_t center() const noexcept { return m_ / 2; }

    cplx& at(std::size_t i, std::size_t j) noexcept { return values_[i * m_ + j]; }
    const cplx& at(std::size_t i, std::size_t j) const noexcept { return values_[i * m_ + j]; }
    std::vector<cplx>& values() noexcept { return values_; }
    const std::vector<cplx>& values() const noexcept { return values_; }

    double power() const noexcept {
        double s = 0.0;
        for (const cplx& v : values_) {
            s += std::norm(v);
        }
        return s * cell_area();
    }

    double max_modulus() const noexcept {
        double s = 0.0;
        for (const cplx& v : values_) {
            s = std::max(s, std::abs(v));
        }
        return s;
    }

private:
    double half_width_;
    std::size_t m_;
    std::vector<cplx> values_;
};

/// Radial profile placed on the Cartesian box by cubic interpolation in |x|.
inline Field2D embed_radial(const RadialProfile& rho, double box_half_width, std::size_t m) {
    Field2D f(box_half_width, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            f.at(i, j) = interpolate(rho, std::hypot(f.coord(i), f.coord(j)));
        }
    }
    return f;
}

/// Largest |F| on the outer frame max(|x1|, |x2|) >= 0.9 L.
inline double boundary_amplitude(const Field2D& f) {
    const double edge = 0.9 * f.box_half_width();
    double s = 0.0;
    for (std::size_t i = 0; i < f.m(); ++i) {
        for (std::size_t j = 0; j < f.m(); ++j) {
            if (std::max(std::abs(f.coord(i)), std::abs(f.coord(j))) >= edge) {
                s = std::max(s, std::abs(f.at(i, j)));
            }
        }
    }
    return s;
}

/// Largest mismatch between a field and its mirror images (x1 -> -x1, x2 -> -x2,
/// x1 <-> x2). Zero for an exactly radial field; index 0 has no partner on the grid.
inline double symmetry_defect(const Field2D& f) {
    const std::size_t m = f.m();
    double s = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 1; j < m; ++j) {
            const cplx v = f.at(i, j);
            s = std::max({s, std::abs(v - f.at(m - i, j)), std::abs(v - f.at(i, m - j)),
                          std::abs(v - f.at(j, i))});
        }
    }
    return s;
}

namespace detail {

// FFTW planning is not thread safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

class FftPair {
public:
    explicit FftPair(std::size_t m) : m_(m) {
        buf_ = fftw_alloc_complex(m * m);
        if (buf_ == nullptr) {
            throw ResourceError("fftw: allocation failed");
        }
        const std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        const int n = static_cast<int>(m);
        fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (fwd_ == nullptr || bwd_ == nullptr) {
            release();
            throw ResourceError("fftw: planning failed");
        }
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;
    ~FftPair() { release(); }

    cplx* data() noexcept { return reinterpret_cast<cplx*>(buf_); }
    void forward() noexcept { fftw_execute(fwd_); }
    void backward() noexcept { fftw_execute(bwd_); }

private:
    void release() noexcept {
        const std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (fwd_ != nullptr) {
            fftw_destroy_plan(fwd_);
        }
        if (bwd_ != nullptr) {
            fftw_destroy_plan(bwd_);
        }
        fftw_free(buf_);
        fwd_ = bwd_ = nullptr;
        buf_ = nullptr;
    }

    std::size_t m_;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

} // namespace detail

struct PropagationTrace {
    std::vector<double> z;
    std::vector<double> power;
    std::vector<double> center_phase;
    std::vector<double> profile_error;
    double initial_power = 0.0;

    std::size_t size() const noexcept { return z.size(); }
};

struct PropagationResult {
    PropagationTrace trace;
    Field2D field;
};

struct EvolveOptions {
    double boundary_tol = defaults::prop_boundary_tol; ///< resolution precondition on boundary_amplitude(F0)
    std::size_t record_every = 1;
};

/// Strang splitting: half linear step exp(-i|k|^2 dz/2) in Fourier space, exact
/// nonlinear rotation exp(-i gamma I/(1+I) dz), half linear step. Records power,
/// the unwrapped phase at the origin and max||F| - |F0|| / max|F0| after each step.
inline PropagationResult split_step_evolve(const Field2D& f0, double gamma, double dz,
                                           std::size_t steps, const EvolveOptions& opt = {}) {
    if (!(dz > 0.0) || !std::isfinite(dz) || steps < 1 || opt.record_every < 1) {
        throw InvalidArgument("split_step_evolve: need dz > 0 and at least one step");
    }
    const double edge = boundary_amplitude(f0);
    if (!(edge < opt.boundary_tol)) {
        throw DomainError("split_step_evolve: box does not resolve the field, boundary amplitude " +
                          std::to_string(edge) + " exceeds " + std::to_string(opt.boundary_tol));
    }
    const std::size_t m = f0.m();
    const std::size_t mm = m * m;
    const double dk = std::numbers::pi / f0.box_half_width();
    const double inv = 1.0 / static_cast<double>(mm);

    // Half-step propagator with the inverse-transform normalization folded in.
    std::vector<cplx> half(mm);
    for (std::size_t i = 0; i < m; ++i) {
        const double ki = dk * (i < m / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(m));
        for (std::size_t j = 0; j < m; ++j) {
            const double kj = dk * (j < m / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(m));
            half[i * m + j] = std::polar(inv, -(ki * ki + kj * kj) * dz / 2.0);
        }
    }

    detail::FftPair fft(m);
    cplx* u = fft.data();
    std::copy(f0.values().begin(), f0.values().end(), u);

    std::vector<double> ref(mm);
    for (std::size_t k = 0; k < mm; ++k) {
        ref[k] = std::abs(f0.values()[k]);
    }
    const double ref_max = *std::max_element(ref.begin(), ref.end());
    if (!(ref_max > 0.0)) {
        throw InvalidArgument("split_step_evolve: zero initial field");
    }
    const std::size_t origin = f0.center() * m + f0.center();

    PropagationTrace trace;
    trace.initial_power = f0.power();
    const double cell = f0.cell_area();
    double phase = std::arg(u[origin]);
    double last_arg = phase;

    auto linear_half = [&]() {
        fft.forward();
        for (std::size_t k = 0; k < mm; ++k) {
            u[k] *= half[k];
        }
        fft.backward();
    };

    for (std::size_t s = 1; s <= steps; ++s) {
        linear_half();
        for (std::size_t k = 0; k < mm; ++k) {
            const double in = std::norm(u[k]);
            u[k] *= std::polar(1.0, -gamma * in / (1.0 + in) * dz);
        }
        linear_half();

        if (s % opt.record_every == 0 || s == steps) {
            double p = 0.0;
            double err = 0.0;
            for (std::size_t k = 0; k < mm; ++k) {
                const double a2 = std::norm(u[k]);
                p += a2;
                err = std::max(err, std::abs(std::sqrt(a2) - ref[k]));
            }
            if (!std::isfinite(p)) {
                throw NumericalFailure("split_step_evolve: non-finite field at step " + std::to_string(s));
            }
            const double a = std::arg(u[origin]);
            double d = a - last_arg;
            d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
            phase += d;
            last_arg = a;
            trace.z.push_back(static_cast<double>(s) * dz);
            trace.power.push_back(p * cell);
            trace.center_phase.push_back(phase);
            trace.profile_error.push_back(err / ref_max);
        }
    }

    Field2D out(f0.box_half_width(), m);
    std::copy(u, u + mm, out.values().begin());
    return PropagationResult{std::move(trace), std::move(out)};
}

/// Least-squares slope of the center phase against z.
inline double phase_slope(const PropagationTrace& t) {
    if (t.size() < 2) {
        throw InvalidArgument("phase_slope: need at least two samples");
    }
    const double n = static_cast<double>(t.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        sx += t.z[k];
        sy += t.center_phase[k];
        sxx += t.z[k] * t.z[k];
        sxy += t.z[k] * t.center_phase[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double max_power_drift(const PropagationTrace& t) {
    double s = 0.0;
    for (double p : t.power) {
        s = std::max(s, std::abs(p - t.initial_power) / t.initial_power);
    }
    return s;
}

struct StationarityTolerances {
    double profile_error = 1e-3;
    double phase_slope = 1e-2;
    double power_drift = 1e-10;
};

inline DiagnosticsReport stationarity_report(const GroundState& gs, const PropagationTrace& t,
                                             const StationarityTolerances& tol = {}) {
    if (t.size() == 0) {
        throw InvalidArgument("stationarity_report: empty trace");
    }
    DiagnosticsReport rep;
    const double err = *std::max_element(t.profile_error.begin(), t.profile_error.end());
    rep.add("profile_error", err < tol.profile_error, err, tol.profile_error);
    const double slope = t.size() >= 2 ? phase_slope(t) : t.center_phase.front() / t.z.front();
    const double rel = std::abs(slope - gs.lambda) / std::abs(gs.lambda);
    rep.add("phase_slope", rel < tol.phase_slope, rel, tol.phase_slope);
    const double drift = max_power_drift(t);
    rep.add("power_drift", drift < tol.power_drift, drift, tol.power_drift);
    return rep;
}

/// Exact relaxation dE0/dt = -E0 - I0/(1+I0) of a field of slow responses. The
/// deviation from the steady state E0* = -I0/(1+I0) is multiplied by e^{-dt} each step;
/// the last step is shortened to land on t_end.
inline std::vector<double> relax_E0(const std::vector<double>& intensity, std::vector<double> e0,
                                    double t_end, double dt) {
    if (intensity.size() != e0.size()) {
        throw InvalidArgument("relax_E0: intensity and E0 differ in size");
    }
    if (!(dt > 0.0) || !(t_end >= dt) || !std::isfinite(t_end)) {
        throw InvalidArgument("relax_E0: need 0 < dt <= t_end");
    }
    for (double i0 : intensity) {
        if (!(i0 >= 0.0)) {
            throw InvalidArgument("relax_E0: intensity must be non-negative");
        }
    }
    std::vector<double> steady(e0.size());
    std::vector<double> dev(e0.size());
    for (std::size_t k = 0; k < e0.size(); ++k) {
        steady[k] = -intensity[k] / (1.0 + intensity[k]);
        dev[k] = e0[k] - steady[k];
    }
    const auto full = static_cast<long>(std::floor(t_end / dt * (1.0 + 1e-14)));
    const double rest = t_end - static_cast<double>(full) * dt;
    const double decay = std::exp(-dt);
    for (long s = 0; s < full; ++s) {
        for (double& d : dev) {
            d *= decay;
        }
    }
    if (rest > 0.0) {
        const double last = std::exp(-rest);
        for (double& d : dev) {
            d *= last;
        }
    }
    for (std::size_t k = 0; k < e0.size(); ++k) {
        e0[k] = steady[k] + dev[k];
    }
    return e0;
}

inline double relax_E0(double intensity, double e0, double t_end, double dt) {
    return relax_E0(std::vector<double>{intensity}, std::vector<double>{e0}, t_end, dt).front();
}

/// Binary snapshot: "SATF", u32 m, u32 reserved, then m*m little-endian f64 pairs
/// (re, im), row-major.
inline void write_snapshot(const Field2D& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open snapshot file " + path);
    }
    auto put_u32 = [&](std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) {
            b[i] = static_cast<unsigned char>(v >> (8 * i));
        }
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    auto put_f64 = [&](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) {
            b[i] = static_cast<unsigned char>(bits >> (8 * i));
        }
        out.write(reinterpret_cast<const char*>(b), 8);
    };
    out.write("SATF", 4);
    put_u32(static_cast<std::uint32_t>(f.m()));
    put_u32(0);
    for (const cplx& v : f.values()) {
        put_f64(v.real());
        put_f64(v.imag());
    }
    if (!out) {
        throw IoError("failed writing snapshot file " + path);
    }
}

/// Inverse of write_snapshot; the box width is not stored and must be supplied.
inline Field2D read_snapshot(const std::string& path, double box_half_width) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open snapshot file " + path);
    }
    char magic[4];
    unsigned char hdr[8];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(hdr), 8);
    if (!in || std::memcmp(magic, "SATF", 4) != 0) {
        throw IoError("not a field snapshot: " + path);
    }
    std::uint32_t m = 0;
    for (int i = 0; i < 4; ++i) {
        m |= static_cast<std::uint32_t>(hdr[i]) << (8 * i);
    }
    Field2D f(box_half_width, m);
    for (cplx& v : f.values()) {
        unsigned char b[16];
        in.read(reinterpret_cast<char*>(b), 16);
        if (!in) {
            throw IoError("truncated snapshot file " + path);
        }
        std::uint64_t re = 0, im = 0;
        for (int i = 0; i < 8; ++i) {
            re |= static_cast<std::uint64_t>(b[i]) << (8 * i);
            im |= static_cast<std::uint64_t>(b[8 + i]) << (8 * i);
        }
        v = cplx(std::bit_cast<double>(re), std::bit_cast<double>(im));
    }
    return f;
}

} // namespace satsol
