#include <gtest/gtest.h>

#include <cmath>

#include "pmelab/error.hpp"
#include "pmelab/operators.hpp"
#include "pmelab/solver.hpp"
#include "pmelab/solver_checks.hpp"
#include "test_support.hpp"

namespace pmelab {
namespace {

TEST(Pressure, Examples) {
  auto g = testing::unit_line(16);
  EXPECT_EQ(pressure_from_density(g->constant(1.0), 2.0).max(), 2.0);
  auto v = pressure_from_density(g->constant(4.0), 1.5);
  EXPECT_DOUBLE_EQ(v.min(), 6.0);
  EXPECT_DOUBLE_EQ(v.max(), 6.0);
}

TEST(Pressure, RoundTrip) {
  SplitMix64 rng(3);
  auto g = testing::unit_square(16);
  for (int k = 0; k < 20; ++k) {
    const double gamma = rng.uniform(1.05, 4.0);
    auto u = g->sample_fn([&](const Point&) { return rng.uniform(1e-3, 10.0); });
    auto back = density_from_pressure(pressure_from_density(u, gamma), gamma);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(back[i], u[i], 1e-14 * u[i] * 4);
  }
}

TEST(Pressure, Errors) {
  auto g = testing::unit_line(16);
  EXPECT_THROW(pressure_from_density(g->constant(1.0), 1.0), std::invalid_argument);
  EXPECT_THROW(pressure_from_density(g->constant(1.0), 0.5), std::invalid_argument);
  EXPECT_THROW(pressure_from_density(g->constant(0.0), 2.0), std::invalid_argument);
  EXPECT_THROW(density_from_pressure(g->constant(-1.0), 2.0), std::invalid_argument);
}

TEST(Step, ConstantStaysConstant) {
  auto g = testing::unit_square(16);
  for (Scheme scheme : {Scheme::explicit_euler, Scheme::semi_implicit}) {
    SolverState s = make_state(g->constant(1.7), 2.5);
    StepOptions opt;
    opt.scheme = scheme;
    for (int k = 0; k < 10; ++k) s = step(s, 1e-3, opt);
    EXPECT_EQ(s.u.min(), 1.7);
    EXPECT_EQ(s.u.max(), 1.7);
    EXPECT_NEAR(s.t, 1e-2, 1e-15);
  }
}

TEST(Step, ExplicitConservesMass) {
  SplitMix64 rng(5);
  for (int dim = 1; dim <= 2; ++dim) {
    auto g = dim == 1 ? testing::unit_line(64) : testing::unit_square(24);
    SolverState s = make_state(testing::random_smooth_data(g, rng), 2.0);
    const double m0 = integrate(s.u);
    const double dt = stable_time_step(s);
    for (int k = 0; k < 20; ++k) s = step(s, dt);
    EXPECT_NEAR(integrate(s.u), m0, 1e-14 * m0);
  }
}

TEST(Step, WeightedExplicitConservesWeightedMass) {
  auto g = testing::weighted_line(64);
  SolverState s = make_state(testing::sine_data(g), 2.0);
  const double m0 = integrate(s.u, Measure::weighted);
  const double dt = stable_time_step(s);
  for (int k = 0; k < 20; ++k) s = step(s, dt);
  // Delta - grad f . grad is self-adjoint in dmu only up to O(h^2).
  EXPECT_NEAR(integrate(s.u, Measure::weighted), m0, 1e-6 * m0);
}

TEST(Step, PositivityLossIsReported) {
  auto g = testing::unit_line(32);
  SolverState s = make_state(testing::sine_data(g, 0.9), 2.0);
  StepOptions opt;
  opt.u_floor = 1e-6;
  try {
    step(s, 1000 * stable_time_step(s, 1.0), opt);
    FAIL() << "expected StepError";
  } catch (const StepError& e) {
    EXPECT_EQ(e.reason(), StepError::Reason::positivity);
  }
}

TEST(Step, SemiImplicitStallReported) {
  auto g = testing::unit_line(64);
  SolverState s = make_state(testing::sine_data(g), 2.0);
  StepOptions opt;
  opt.scheme = Scheme::semi_implicit;
  opt.max_iters = 1;
  opt.solver_tol = 1e-15;
  try {
    step(s, 50 * stable_time_step(s), opt);
    FAIL() << "expected StepError";
  } catch (const StepError& e) {
    EXPECT_EQ(e.reason(), StepError::Reason::no_convergence);
  }
}

TEST(Step, RejectsNonPositiveStep) {
  auto g = testing::unit_line(16);
  EXPECT_THROW(step(make_state(g->constant(1.0), 2.0), 0.0), std::invalid_argument);
}

TEST(Run, ConstantDataGivesConstantSamples) {
  auto g = testing::unit_line(32);
  auto traj = run(g->constant(2.0), 2.0, 1.0, {0.25, 0.5, 1.0});
  ASSERT_EQ(traj.size(), 3u);
  EXPECT_EQ(traj.times(), (std::vector<double>{0.25, 0.5, 1.0}));
  for (const auto& s : traj.samples) {
    EXPECT_EQ(s.u.min(), 2.0);
    EXPECT_EQ(s.u.max(), 2.0);
  }
}

TEST(Run, SupPressureNonincreasingOnRandomData) {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = trial % 2 ? testing::unit_square(16) : testing::unit_line(64);
    const double gamma = rng.uniform(1.3, 3.0);
    auto traj = run(testing::random_smooth_data(g, rng), gamma, 0.2,
                    testing::uniform_times(0.02, 0.2, 10));
    double prev = traj.initial.v.max();
    for (const auto& s : traj.samples) {
      EXPECT_LE(s.v.max(), prev * (1 + 1e-14)) << "trial " << trial << " t=" << s.t;
      prev = s.v.max();
    }
  }
}

TEST(Run, MassDrift) {
  auto g = testing::unit_line(64);
  auto u0 = testing::sine_data(g);
  const double m0 = integrate(u0);
  RunOptions explicit_opts;
  auto a = run(u0, 2.0, 0.2, {0.1, 0.2}, explicit_opts);
  EXPECT_LE(std::abs(a.diagnostics.back().mass - m0), 1e-12 * m0);
  RunOptions implicit_opts;
  implicit_opts.scheme = Scheme::semi_implicit;
  auto b = run(u0, 2.0, 0.2, {0.1, 0.2}, implicit_opts);
  EXPECT_LE(std::abs(b.diagnostics.back().mass - m0), 1e-8 * m0);
  EXPECT_LE((a.samples.back().u - b.samples.back().u).max_abs(), 1e-2);
}

TEST(Run, PositivityAndDiagnostics) {
  auto g = testing::unit_line(64);
  auto traj = run(testing::sine_data(g, 0.9), 3.0, 0.1, {0.05, 0.1});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& d = traj.diagnostics[k];
    EXPECT_GT(d.min_u, 0.0);
    EXPECT_EQ(d.min_u, traj.samples[k].u.min());
    EXPECT_EQ(d.sup_v, traj.samples[k].v.max());
  }
  EXPECT_EQ(traj.sup_v(), traj.initial.v.max());
}

TEST(Run, RejectsBadOutputTimes) {
  auto u0 = testing::unit_line(16)->constant(1.0);
  EXPECT_THROW(run(u0, 2.0, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(run(u0, 2.0, 1.0, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(run(u0, 2.0, 1.0, {0.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(run(u0, 2.0, 1.0, {0.5, 1.5}), std::invalid_argument);
}

TEST(Checks, ConstantSolutionHasZeroResiduals) {
  auto g = testing::unit_square(16);
  auto traj = run(g->constant(1.3), 2.0, 1.0, {0.25, 0.5, 0.75, 1.0});
  for (const auto& r : pressure_equation_residual(traj)) EXPECT_EQ(r.values.max_abs(), 0.0);
  for (auto which : {EvolutionIdentity::v_t, EvolutionIdentity::power_beta, EvolutionIdentity::w,
                     EvolutionIdentity::F_alpha}) {
    auto r = evolution_identity_check(traj, which, 1.5);
    EXPECT_EQ(r.max_residual, 0.0) << r.name;
    EXPECT_TRUE(r.pass);
  }
  auto integral = integral_identity_check(traj);
  EXPECT_NEAR(integral.first_derivative.max_residual, 0.0, 1e-12);
  EXPECT_NEAR(integral.second_derivative.max_residual, 0.0, 1e-10);
}

TEST(Checks, PowerOneIsThePressureEquation) {
  auto g = testing::unit_line(64);
  auto traj = run(testing::sine_data(g), 2.0, 0.1, testing::uniform_times(0.02, 0.1, 5));
  auto p = pressure_equation_check(traj);
  auto b = evolution_identity_check(traj, EvolutionIdentity::power_beta, 1.0);
  ASSERT_EQ(p.residuals.size(), b.residuals.size());
  for (std::size_t k = 0; k < p.residuals.size(); ++k)
    EXPECT_NEAR(p.residuals[k], b.residuals[k], 1e-12 * p.scale);
}

TEST(Checks, InsufficientSamples) {
  auto g = testing::unit_line(16);
  auto one = run(g->constant(1.0), 2.0, 1.0, {1.0});
  auto two = run(g->constant(1.0), 2.0, 1.0, {0.5, 1.0});
  EXPECT_THROW(pressure_equation_residual(one), InsufficientSamples);
  EXPECT_EQ(pressure_equation_residual(two).size(), 1u);
  EXPECT_THROW(evolution_identity_check(two, EvolutionIdentity::w), InsufficientSamples);
  EXPECT_THROW(integral_identity_check(two), InsufficientSamples);
}

}  // namespace
}  // namespace pmelab
