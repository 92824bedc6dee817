#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace satsol;
using std::numbers::pi;

namespace {

// Frozen arbitrary-precision values (tests/oracles/derive_values.py).
constexpr double g_at_1e8 = 4.9999999666666669167e-17;
constexpr double one_minus_ln2 = 0.30685281944005469058;
constexpr double f_at_1 = 0.11370563888010938117;
constexpr double gauss_potential = 0.069998325310417212553;
constexpr double gauss_rayleigh = 14.286056067275356906;
constexpr double gauss_lambda_30 = 2.9545764420277292892;
constexpr double gauss_pohozaev_30 = 0.28925522811272454827;

RadialProfile gaussian() { return fixtures::unit_gaussian_on(make_grid(10.0, 1024)); }

std::vector<RadialProfile> random_profiles(int count) {
    return random_smooth_profiles(static_cast<std::size_t>(count), 99, make_grid(12.0, 768));
}

} // namespace

TEST(Gsat, ClosedFormsAndSeries) {
    EXPECT_EQ(g_sat(0.0), 0.0);
    EXPECT_NEAR(g_sat(1.0), one_minus_ln2, 1e-16);
    EXPECT_NEAR(g_sat(1e-8), g_at_1e8, 4e-16 * g_at_1e8);
    EXPECT_THROW(g_sat(-1e-3), InvalidArgument);
}

TEST(Gsat, ContinuousAcrossSeriesCutoff) {
    const double below = g_sat(series_cutoff * (1.0 - 1e-12));
    const double above = g_sat(series_cutoff * (1.0 + 1e-12));
    EXPECT_NEAR(below, above, 1e-11 * above);
    EXPECT_NEAR(h_ratio(series_cutoff * (1 - 1e-12)), h_ratio(series_cutoff * (1 + 1e-12)), 1e-11);
    EXPECT_NEAR(f_aux(f_series_cutoff * (1 - 1e-12)), f_aux(f_series_cutoff * (1 + 1e-12)),
                1e-11 * f_aux(f_series_cutoff));
}

TEST(Hratio, LimitValueAndOrder) {
    EXPECT_NEAR(h_ratio(1e-9), 0.5, 1e-9);
    EXPECT_NEAR(h_ratio(1.0), one_minus_ln2, 1e-16);
    EXPECT_GT(h_ratio(0.5), h_ratio(1.0));
    EXPECT_GT(h_ratio(1.0), h_ratio(2.0));
    EXPECT_THROW(h_ratio(0.0), InvalidArgument);
}

TEST(Hratio, BoundedAndDecreasingOnLogGrid) {
    const auto s = log_grid<double>(2000, 1e-10, 1e6);
    double prev = 0.5;
    for (double x : s) {
        const double h = h_ratio(x);
        ASSERT_GT(h, 0.0);
        ASSERT_LT(h, 0.5);
        ASSERT_LT(h, prev) << "s = " << x;
        prev = h;
    }
}

TEST(Faux, ClosedFormsAndOrder) {
    EXPECT_EQ(f_aux(0.0), 0.0);
    EXPECT_NEAR(f_aux(1.0), f_at_1, 1e-16);
    EXPECT_GT(f_aux(2.0), f_aux(1.0));
    EXPECT_GT(f_aux(1.0), f_aux(0.5));
    EXPECT_THROW(f_aux(-1.0), InvalidArgument);
}

TEST(Faux, SmallArgumentOracles) {
    // mpmath, 40 digits
    EXPECT_NEAR(f_aux(1e-3), 3.3283393266738020316e-10, 4e-16 * 3.33e-10);
    EXPECT_NEAR(f_aux(0.05), 3.871928018361291687e-5, 4e-16 * 3.88e-5);
    // closed form; cancellation costs about 3 eps / s^2
    EXPECT_NEAR(f_aux(0.2), 2.0235530787574142432e-3, 5e-14 * 2.02e-3);
}

TEST(Faux, NonnegativeAndIncreasing) {
    const auto s = log_grid<double>(2000, 1e-8, 1e6);
    double prev = 0.0;
    for (double x : s) {
        const double f = f_aux(x);
        ASSERT_GT(f, prev) << "s = " << x;
        prev = f;
    }
}

TEST(Energy, ZeroAndPureKinetic) {
    EXPECT_EQ(energy_H(RadialProfile(make_grid(5.0, 64)), -30.0), 0.0);
    EXPECT_NEAR(energy_H(gaussian(), 0.0), 1.0, 1e-4);
}

TEST(Energy, BoundedBelowByCoupling) {
    for (const auto& p : random_profiles(8)) {
        for (double gamma : {-5.0, -30.0, -100.0}) {
            EXPECT_GE(energy_H(p, gamma), -std::abs(gamma));
        }
    }
}

TEST(Power, GaussianAndZero) {
    EXPECT_EQ(power_P(RadialProfile(make_grid(5.0, 64))), 0.0);
    EXPECT_NEAR(power_P(gaussian()), 1.0, 1e-5);
}

TEST(Power, ScalingFamilyPreservesPowerAndScalesKinetic) {
    const RadialProfile w = normalized(gaussian());
    for (double delta : {0.5, 0.25, 0.1}) {
        const RadialProfile wd = scaled_trial(w, delta);
        EXPECT_NEAR(power_P(wd), power_P(w), 1e-12);
        EXPECT_NEAR(gradient_norm_sq(wd), delta * delta * gradient_norm_sq(w),
                    1e-12 * gradient_norm_sq(w));
    }
}

TEST(Potential, BelowHalfQuartic) {
    for (const auto& p : random_profiles(8)) {
        const double quartic = integrate_radial(p.map([](double v) { return v * v * v * v; }));
        EXPECT_LE(potential_term(p), 0.5 * quartic);
        EXPECT_GE(potential_term(p), 0.0);
    }
}

TEST(Rayleigh, GaussianMatchesQuadratureOracle) {
    const RadialProfile w = normalized(gaussian());
    EXPECT_NEAR(rayleigh_Q(w), gauss_rayleigh, 1e-4 * gauss_rayleigh);
    EXPECT_NEAR(potential_term(w), gauss_potential, 1e-4 * gauss_potential);
}

TEST(Rayleigh, ExceedsQuarticLimit) {
    for (const auto& p : random_profiles(8)) {
        const double quartic = integrate_radial(p.map([](double v) { return v * v * v * v; }));
        EXPECT_GT(rayleigh_Q(p), gradient_norm_sq(p) / (0.5 * quartic));
    }
}

TEST(Rayleigh, RejectsUnnormalizedOrZero) {
    RadialProfile w = normalized(gaussian());
    w *= 1.01;
    EXPECT_THROW(rayleigh_Q(w), InvalidArgument);
    EXPECT_THROW(rayleigh_Q(RadialProfile(make_grid(5.0, 64))), InvalidArgument);
}

TEST(Lagrange, GaussianOracleAndFreeCase) {
    const RadialProfile w = normalized(gaussian());
    EXPECT_NEAR(lagrange_lambda(w, -30.0), gauss_lambda_30, 1e-4 * gauss_lambda_30);
    EXPECT_DOUBLE_EQ(lagrange_lambda(w, 0.0), -gradient_norm_sq(w));
    RadialProfile off = w;
    off *= 1.001;
    EXPECT_THROW(lagrange_lambda(off, -30.0), InvalidArgument);
}

TEST(Pohozaev, NonSolutionAndDegenerate) {
    const RadialProfile w = normalized(gaussian());
    const double res = pohozaev_residual(w, -30.0, lagrange_lambda(w, -30.0));
    EXPECT_NEAR(res, gauss_pohozaev_30, 1e-3 * gauss_pohozaev_30);
    EXPECT_EQ(pohozaev_residual(RadialProfile(make_grid(5.0, 64)), -30.0, 0.0), 0.0);
}

TEST(Polar, PhaseDoesNotChangeEnergy) {
    const RadialProfile w = normalized(gaussian());
    const double h = energy_H(w, -30.0);
    EXPECT_EQ(energy_E_polar(w, 0.0, -30.0), h);
    for (double phi : {pi / 4.0, 1.234, 0.7, 2.0}) {
        EXPECT_NEAR(energy_E_polar(w, phi, -30.0), h, 1e-12 * std::abs(h));
    }
}

TEST(Report, Invariants) {
    for (const auto& p : random_profiles(6)) {
        const FunctionalReport r = functional_report(p, -17.0);
        EXPECT_NEAR(r.energy_H, r.kinetic - 17.0 * r.potential, 1e-12 * std::abs(r.energy_H) + 1e-15);
        EXPECT_GE(r.potential, 0.0);
        EXPECT_NEAR(r.power_P, 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(r.lambda_pz1, pohozaev_lambda(p, -17.0));
    }
}
