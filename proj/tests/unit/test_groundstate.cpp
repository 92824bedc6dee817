#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace satsol;

namespace {

constexpr double gauss_el_residual_30 = 1.2723804524163233886;

} // namespace

TEST(ElResidual, ZeroProfileAndNonSolution) {
    EXPECT_EQ(el_residual(RadialProfile(make_grid(5.0, 64)), -30.0, 1.0), 0.0);
    const RadialProfile w = normalized(fixtures::unit_gaussian_on(make_grid(10.0, 1024)));
    const double res = el_residual(w, -30.0, lagrange_lambda(w, -30.0));
    EXPECT_NEAR(res, gauss_el_residual_30, 1e-3 * gauss_el_residual_30);
}

TEST(FlowConfig, Validation) {
    FlowConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.residual_tol = 0.1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = FlowConfig{};
    cfg.ball_schedule = {8.0, 8.0};
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = FlowConfig{};
    cfg.step = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    EXPECT_DOUBLE_EQ(FlowConfig{}.with_spacing(0.1).step, 0.4 * 0.01);
}

TEST(SolveBall, FreeCaseIsTheDirichletMode) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 32.0);
    const BallSolution b = solve_ball(0.0, 8.0, cfg);
    // Lowest Dirichlet eigenvalue of the disk: j0^2 / R^2.
    const double j0 = 2.404825557695773;
    EXPECT_NEAR(b.mu, j0 * j0 / 64.0, 1e-3 * j0 * j0 / 64.0);
    EXPECT_NEAR(b.lambda, -b.mu, 1e-12);
    EXPECT_LT(b.trace.back().energy, b.trace.front().energy);
}

TEST(SolveBall, EnergyMonotoneAndNormalized) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 32.0);
    cfg.trace_stride = 1;
    const BallSolution b = solve_ball(-30.0, 6.0, cfg);
    for (std::size_t k = 1; k < b.trace.size(); ++k) {
        ASSERT_LE(b.trace[k].energy, b.trace[k - 1].energy + 1e-12 * std::abs(b.trace[k - 1].energy));
    }
    EXPECT_NEAR(power_P(b.profile), 1.0, 1e-12);
    EXPECT_EQ(b.profile.back(), 0.0);
    EXPECT_LT(b.el_residual, cfg.residual_tol);
    EXPECT_LT(b.mu, 0.0);
    EXPECT_GT(b.lambda, 0.0);
}

TEST(SolveBall, AboveThresholdStaysSmallAndPositiveEnergy) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 16.0);
    const BallSolution a = solve_ball(-5.0, 8.0, cfg);
    const BallSolution b = solve_ball(-5.0, 12.0, cfg, &a.profile);
    EXPECT_GT(a.mu, 0.0);
    EXPECT_GT(b.mu, 0.0);
    EXPECT_LT(b.mu, a.mu);
    EXPECT_LT(sup_norm(b.profile), sup_norm(a.profile));
}

TEST(SolveBall, LargeStepIsReported) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 32.0);
    cfg.step = 2.0 * cfg.spacing * cfg.spacing;
    EXPECT_THROW(solve_ball(-30.0, 6.0, cfg), StepSizeError);
}

TEST(SolveBall, IterationCapCarriesTrace) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 32.0);
    cfg.max_iters = 500;
    cfg.trace_stride = 50;
    try {
        solve_ball(-30.0, 6.0, cfg);
        FAIL() << "expected a convergence error";
    } catch (const FlowConvergenceError& e) {
        EXPECT_GE(e.trace().size(), 10u);
    }
}

TEST(SolveBall, RejectsPositiveCoupling) {
    EXPECT_THROW(solve_ball(1.0, 6.0, fixtures::coarse_flow()), InvalidArgument);
}

TEST(SolveBall, BallEnergiesDecreaseWithRadius) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 64.0);
    std::optional<BallSolution> prev;
    for (double r : {2.0, 3.0, 4.0, 6.0}) {
        BallSolution b = solve_ball(-30.0, r, cfg, prev ? &prev->profile : nullptr);
        if (prev) {
            EXPECT_LT(b.mu, prev->mu) << "R = " << r;
        }
        prev = std::move(b);
    }
    EXPECT_LT(prev->mu, 0.0);
}

TEST(GroundState, Gamma30MatchesContinuumOracle) {
    const GroundState& gs = fixtures::ground_state_30();
    // The flow solves the second-order discretization; O(dr^2) away from the continuum.
    EXPECT_NEAR(gs.lambda, fixtures::oracle_gs30_lambda, 2e-4 * fixtures::oracle_gs30_lambda);
    EXPECT_NEAR(gs.mu, fixtures::oracle_gs30_mu, 2e-4 * std::abs(fixtures::oracle_gs30_mu));
    EXPECT_NEAR(gs.profile[0], fixtures::oracle_gs30_rho0, 2e-4 * fixtures::oracle_gs30_rho0);
}

TEST(GroundState, Gamma30Invariants) {
    const GroundState& gs = fixtures::ground_state_30();
    EXPECT_EQ(gs.gamma, -30.0);
    EXPECT_NEAR(power_P(gs.profile), 1.0, 1e-12);
    EXPECT_GT(gs.lambda, 0.0);
    EXPECT_LT(gs.mu, 0.0);
    EXPECT_LT(gs.el_residual, 1e-8);
    EXPECT_LT(gs.pohozaev, 1e-4);
    EXPECT_LT(std::abs(gs.lambda_pz1 - gs.lambda) / gs.lambda, 1e-4);
    EXPECT_NEAR(gs.decay_rate, std::sqrt(gs.lambda), 0.05 * std::sqrt(gs.lambda));
    EXPECT_EQ(gs.phase, 0.0);
    const std::size_t n = gs.profile.grid().intervals();
    for (std::size_t j = 0; j < n; ++j) {
        ASSERT_GT(gs.profile[j], 0.0);
        ASSERT_GT(gs.profile[j], gs.profile[j + 1]);
    }
    ASSERT_GE(gs.ball_energies.size(), 2u);
    for (auto [r, mu] : gs.ball_energies) {
        EXPECT_LT(mu, 0.0);
    }
}

TEST(GroundState, TwiceTheTownesMass) {
    const double gamma = -2.0 * fixtures::threshold().townes_mass;
    const GroundState gs = solve_ground_state(gamma, fixtures::coarse_flow(1.0 / 96.0), fixtures::threshold());
    EXPECT_GT(gs.lambda, 0.0);
    EXPECT_LT(gs.mu, 0.0);
    EXPECT_LT(gs.el_residual, 1e-6);
    for (std::size_t j = 0; j + 1 < gs.profile.size(); ++j) {
        ASSERT_GT(gs.profile[j], gs.profile[j + 1]);
    }
}

TEST(GroundState, RefusesOutsideExistenceRegime) {
    const ThresholdEstimate& est = fixtures::threshold();
    EXPECT_THROW(solve_ground_state(-5.0, FlowConfig{}, est), DomainError);
    EXPECT_THROW(solve_ground_state(0.0, FlowConfig{}, est), DomainError);
    EXPECT_THROW(solve_ground_state(-est.T0_estimate, FlowConfig{}, est), DomainError);
}

TEST(GroundState, ScheduleTooShortIsAConvergenceError) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 32.0);
    cfg.ball_schedule = {3.0, 4.0};
    EXPECT_THROW(solve_ground_state(-30.0, cfg, fixtures::threshold()), ConvergenceError);
}

TEST(Shoot, MatchesFlowMinimizer) {
    const GroundState& gs = fixtures::ground_state_30();
    const ShootResult s = shoot_ode(-30.0, gs.lambda, gs.profile[0], gs.profile.grid());
    const RadialProfile sn = normalized(s.profile);
    double diff = 0.0;
    for (std::size_t j = 0; j < sn.size(); ++j) {
        diff = std::max(diff, std::abs(sn[j] - gs.profile[j]));
    }
    EXPECT_LT(diff, 1e-4);
    EXPECT_NEAR(s.lambda, fixtures::oracle_gs30_lambda, 1e-7 * fixtures::oracle_gs30_lambda);
    EXPECT_NEAR(s.amplitude, fixtures::oracle_gs30_rho0, 1e-7);
}

TEST(Shoot, PohozaevOnFineGrid) {
    const ShootResult s = shoot_ode(-30.0, 7.0, 1.3, make_grid(12.0, 6144));
    EXPECT_LT(pohozaev_residual(s.profile, -30.0, s.lambda), 1e-5);
    EXPECT_NEAR(power_P(s.profile), 1.0, 1e-5);
}

TEST(Shoot, BracketsFromFarTooLargeAmplitude) {
    const ShootResult s = shoot_ode(-30.0, 7.0, 40.0, make_grid(12.0, 1536));
    EXPECT_NEAR(s.amplitude, fixtures::oracle_gs30_rho0, 1e-6);
}

TEST(Shoot, Errors) {
    EXPECT_THROW(shoot_ode(-30.0, -1.0, 1.0), InvalidArgument);
    EXPECT_THROW(shoot_ode(1.0, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(shoot_ode(-30.0, 1.0, 0.0), InvalidArgument);
    // lambda beyond -gamma: the linearization never oscillates, so nothing crosses zero.
    EXPECT_THROW(shoot_ode(-30.0, 45.0, 1.0), BracketError);
}

TEST(Sweep, ClassifiesAndSolvesInOrder) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 64.0);
    cfg.ball_schedule = {8.0, 16.0, 32.0, 48.0};
    const auto out = sweep({-5.0, -15.0, -30.0}, cfg, fixtures::threshold());
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].gamma, -5.0);
    EXPECT_EQ(out[0].classification, Classification::NoGroundState);
    EXPECT_FALSE(out[0].state.has_value());
    for (int k : {1, 2}) {
        EXPECT_EQ(out[k].classification, Classification::GroundStateExists);
        ASSERT_TRUE(out[k].state.has_value()) << out[k].error;
        EXPECT_GT(out[k].state->lambda, 0.0);
        EXPECT_LT(out[k].state->mu, 0.0);
    }
    EXPECT_LT(out[2].state->lambda, fixtures::oracle_gs30_lambda * 1.01);
    EXPECT_LT(out[1].state->lambda, out[2].state->lambda);
}

TEST(Sweep, ZeroCouplingAndFailures) {
    FlowConfig cfg = fixtures::coarse_flow(1.0 / 32.0);
    cfg.max_iters = 100;
    const auto out = sweep({0.0, -30.0}, cfg, fixtures::threshold());
    EXPECT_EQ(out[0].classification, Classification::NoGroundState);
    EXPECT_EQ(out[1].classification, Classification::GroundStateExists);
    EXPECT_FALSE(out[1].state.has_value());
    EXPECT_FALSE(out[1].error.empty());
    EXPECT_THROW(sweep({}, cfg, fixtures::threshold()), InvalidArgument);
}
