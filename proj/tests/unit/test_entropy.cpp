#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pmelab/entropy.hpp"
#include "pmelab/error.hpp"
#include "pmelab/operators.hpp"
#include "test_support.hpp"

namespace pmelab {
namespace {

TEST(Schedule, FlatValuesAtUnitTime) {
  auto s = make_schedule(2.0, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(s.a, 0.5);
  auto v = schedule_eval(s, 1.0);
  EXPECT_DOUBLE_EQ(v.sigma, 1.0);
  EXPECT_DOUBLE_EQ(v.beta, 1.0);
  EXPECT_DOUBLE_EQ(v.eta, 0.5);
}

TEST(Schedule, FlatValuesAreTheKappaZeroForms) {
  SplitMix64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const double gamma = rng.uniform(1.1, 4.0), d = rng.uniform(1.0, 6.0), t = rng.uniform(1e-3, 5.0);
    auto s = make_schedule(gamma, d, 0.0);
    auto v = schedule_eval(s, t);
    EXPECT_NEAR(v.sigma, std::pow(t, s.a), 1e-14 * v.sigma);
    EXPECT_DOUBLE_EQ(v.beta, t);
    EXPECT_NEAR(v.eta, s.a / t, 1e-14 * v.eta);
  }
}

TEST(Schedule, SeriesMatchesFlatLimit) {
  auto flat = schedule_eval(make_schedule(2.0, 2.0, 0.0), 1.0);
  auto tiny = schedule_eval(make_schedule(2.0, 2.0, 1e-10), 1.0);
  EXPECT_NEAR(tiny.sigma, flat.sigma, 1e-8);
  EXPECT_NEAR(tiny.beta, flat.beta, 1e-8);
  EXPECT_NEAR(tiny.eta, flat.eta, 1e-8);
}

TEST(Schedule, SeriesIsContinuousAtTheSwitch) {
  auto s = make_schedule(2.5, 3.0, 1.0);
  for (double x : {1e-6 * (1 - 1e-9), 1e-6 * (1 + 1e-9)}) {
    auto v = schedule_eval(s, x);
    const double sigma = std::pow(std::expm1(2 * x) / 2, s.a);
    EXPECT_NEAR(v.sigma / sigma, 1.0, 1e-12);
    EXPECT_NEAR(v.beta / (std::sinh(2 * x) / 2), 1.0, 1e-12);
    EXPECT_NEAR(v.eta / (2 * s.a / -std::expm1(-2 * x)), 1.0, 1e-12);
  }
}

TEST(Schedule, PositiveAndFiniteForLargeArguments) {
  auto s = make_schedule(2.0, 1.0, 40.0);
  for (double t : {1e-3, 0.1, 0.6, 5.0}) {
    auto v = schedule_eval(s, t);
    EXPECT_GT(v.sigma, 0.0);
    EXPECT_GT(v.beta, 0.0);
    EXPECT_GT(v.eta, 0.0);
    EXPECT_TRUE(std::isfinite(v.sigma));
  }
}

TEST(Schedule, BetaIdentityAndSigmaForms) {
  SplitMix64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const double kappa = rng.uniform(1e-3, 3.0), t = rng.uniform(1e-3, 3.0);
    auto s = make_schedule(rng.uniform(1.1, 4.0), rng.uniform(1.0, 4.0), kappa);
    auto v = schedule_eval(s, t);
    const double coth = 1.0 / std::tanh(kappa * t);
    EXPECT_NEAR((1 + v.beta_dot) / v.beta, 2 * kappa * coth, 1e-12 * 2 * kappa * coth);
    const double alt = std::pow(std::exp(kappa * t) * std::sinh(kappa * t) / kappa, s.a);
    EXPECT_NEAR(v.sigma, alt, 1e-12 * alt);
  }
}

TEST(Schedule, Errors) {
  EXPECT_THROW(make_schedule(1.0, 2.0, 0.0), std::invalid_argument);
  EXPECT_THROW(make_schedule(2.0, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(make_schedule(2.0, 2.0, -1.0), std::invalid_argument);
  EXPECT_THROW(schedule_eval(make_schedule(2.0, 2.0, 0.0), 0.0), std::invalid_argument);
}

TEST(Nash, ConstantData) {
  auto g = testing::unit_square(16);
  const double c = 1.3;
  auto state = make_state(g->constant(c), 2.0, 1.0);
  EXPECT_NEAR(nash_entropy(state, make_schedule(2.0, 2.0, 0.0)), -2 * c * c, 1e-13);
}

TEST(Nash, NegativeOnRandomStates) {
  SplitMix64 rng(31);
  auto g = testing::unit_line(64);
  for (int k = 0; k < 20; ++k) {
    auto state = make_state(testing::random_smooth_data(g, rng), rng.uniform(1.1, 3.0), rng.uniform(0.01, 2.0));
    EXPECT_LT(nash_entropy(state, make_schedule(state.gamma, 1.0, rng.uniform(0.0, 2.0))), 0.0);
  }
}

TEST(Nash, ZeroWeightAgreesWithUnweighted) {
  TorusSpec spec;
  spec.dim = 1;
  spec.points = {64};
  spec.periods = {1.0};
  spec.weight = SmoothFunction::constant(0.0);
  auto gw = build_torus(spec);
  auto gu = testing::unit_line(64);
  auto sched = make_schedule(2.0, 1.0, 0.4);
  auto sw = make_state(testing::sine_data(gw), 2.0, 0.3);
  auto su = make_state(testing::sine_data(gu), 2.0, 0.3);
  EXPECT_EQ(nash_entropy(sw, sched), nash_entropy(su, sched));
  EXPECT_EQ(w_entropy(sw, sched), w_entropy(su, sched));
  EXPECT_EQ(dissipation(sw, sched, 0.0).total, dissipation(su, sched, 0.0).total);
}

TEST(WEntropy, ConstantData) {
  const double c = 1.3;
  for (auto g : {testing::unit_line(16), testing::unit_square(16)}) {
    auto sched = make_schedule(2.0, 2.0, 0.0);
    for (double t : {0.25, 1.0, 4.0}) {
      auto state = make_state(g->constant(c), 2.0, t);
      EXPECT_NEAR(w_entropy(state, sched), -3 * std::sqrt(t) * c * c, 1e-12);
    }
  }
}

TEST(WEntropy, FlatFormAgreesWithSchedule) {
  auto g = testing::unit_square(32);
  SplitMix64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const double gamma = rng.uniform(1.2, 3.0), t = rng.uniform(0.05, 2.0);
    auto state = make_state(testing::random_smooth_data(g, rng), gamma, t);
    auto sched = make_schedule(gamma, 2.0, 0.0);
    const double a = sched.a;
    // t^{a+1} int (gamma |grad v|^2 / v - (a+1)/t) v u, assembled directly.
    const auto grad = gradient(state.v);
    double sum = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double gx = grad.component(0)[i], gy = grad.component(1)[i];
      const double v = state.v[i], u = state.u[i];
      sum += (gamma * (gx * gx + gy * gy) / v - (a + 1) / t) * v * u;
    }
    const double flat = std::pow(t, a + 1) * sum * g->cell_volume();
    EXPECT_NEAR(w_entropy(state, sched), flat, 1e-10 * std::abs(flat));
  }
}

TEST(WEntropy, EqualsNashPlusBetaTimesNashRate) {
  // W = N + beta dN/dt with dN/dt = -sigma' int v u + sigma gamma int |grad v|^2 u.
  SplitMix64 rng(43);
  auto g = testing::weighted_line(128);
  for (int k = 0; k < 10; ++k) {
    auto state = make_state(testing::random_smooth_data(g, rng), 2.0, rng.uniform(0.05, 1.0));
    auto sched = make_schedule(2.0, 3.0, rng.uniform(0.0, 2.0));
    auto c = schedule_eval(sched, state.t);
    const double vu = integrate(state.v * state.u, Measure::weighted);
    const double gu = integrate(norm_squared(gradient(state.v)) * state.u, Measure::weighted);
    const double n_rate = -c.sigma_dot * vu + c.sigma * state.gamma * gu;
    const double w = w_entropy(state, sched);
    EXPECT_NEAR(w, nash_entropy(state, sched) + c.beta * n_rate, 1e-12 * std::abs(w));
  }
}

TEST(WEntropy, NashRateByLaplacianFormConverges) {
  // dN/dt = -sigma int ((gamma-1) Delta v + sigma'/sigma) v u holds after an
  // integration by parts, so discretely only to O(h^2).
  std::vector<double> errors;
  for (int n : {64, 128, 256}) {
    auto g = testing::unit_line(n);
    auto state = make_state(g->sample(SmoothFunction(1.0, {{{1, 0, 0}, 0.4, 0.3}, {{2, 0, 0}, 0.2, 1.0}})), 3.0, 0.2);
    auto sched = make_schedule(3.0, 1.0, 0.5);
    auto c = schedule_eval(sched, state.t);
    const double n_rate = -c.sigma * integrate(((state.gamma - 1) * laplacian(state.v) + c.eta) * state.v * state.u);
    const double w = w_entropy(state, sched);
    errors.push_back(std::abs(w - (nash_entropy(state, sched) + c.beta * n_rate)) / std::abs(w));
  }
  EXPECT_LE(errors.back(), 1e-3);
  EXPECT_GE(errors[0] / errors[1], 3.7);
  EXPECT_GE(errors[1] / errors[2], 3.7);
}

TEST(Dissipation, ConstantDataMatchesHandComputation) {
  auto g = testing::unit_square(16);
  const double c = 1.3;
  auto sched = make_schedule(2.0, 2.0, 0.0);
  for (double t : {0.25, 1.0, 4.0}) {
    auto d = dissipation(make_state(g->constant(c), 2.0, t), sched, 0.0);
    EXPECT_NEAR(d.total, 1.5 / std::sqrt(t) * c * c, 1e-12);
    EXPECT_EQ(d.ricci, 0.0);
    EXPECT_EQ(d.weighted_extra, 0.0);
  }
}

TEST(Dissipation, FlatFormTwoRoutes) {
  auto g = testing::unit_square(32);
  SplitMix64 rng(47);
  for (int k = 0; k < 10; ++k) {
    const double gamma = rng.uniform(1.2, 3.0), t = rng.uniform(0.05, 2.0);
    auto state = make_state(testing::random_smooth_data(g, rng), gamma, t);
    auto sched = make_schedule(gamma, 2.0, 0.0);
    const double a = sched.a, n = 2.0;
    const auto hess = hessian(state.v);
    const auto lap = laplacian(state.v);
    double hess_sum = 0.0, trace_sum = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double shift = a / (n * (gamma - 1) * t);
      const double xx = hess.at(0, 0)[i] + shift, yy = hess.at(1, 1)[i] + shift, xy = hess.at(0, 1)[i];
      const double vu = state.v[i] * state.u[i];
      hess_sum += (xx * xx + yy * yy + 2 * xy * xy) * vu;
      const double tr = (gamma - 1) * lap[i] + a / t;
      trace_sum += tr * tr * vu;
    }
    const double h2 = g->cell_volume();
    const double flat = 2 * (gamma - 1) * std::pow(t, a + 1) * hess_sum * h2 +
                        2 * std::pow(t, a + 1) * trace_sum * h2;
    EXPECT_NEAR(dissipation(state, sched, 0.0).total, flat, 1e-12 * flat);
  }
}

TEST(Dissipation, TermsNonnegativeOnRandomStates) {
  SplitMix64 rng(53);
  for (int k = 0; k < 20; ++k) {
    auto g = k % 2 ? testing::weighted_line(64, rng.uniform(0.05, 0.3), rng.uniform(1.5, 5.0))
                   : testing::unit_square(16);
    auto state = make_state(testing::random_smooth_data(g, rng), rng.uniform(1.2, 3.0), rng.uniform(0.01, 1.0));
    const double K = bakry_emery_lower_bound(*g);
    auto sched = make_schedule(state.gamma, g->m_param(), curvature_level(K, state.u, state.gamma));
    auto d = dissipation(state, sched, K);
    EXPECT_GE(d.hessian, 0.0);
    EXPECT_GE(d.ricci, -1e-12 * d.total);
    EXPECT_GE(d.trace, 0.0);
    EXPECT_GE(d.weighted_extra, 0.0);
    EXPECT_GE(d.curvature_slack, 0.0);
  }
}

TEST(Monotonicity, ConstantSolution) {
  auto g = testing::unit_square(16);
  auto traj = run(g->constant(1.3), 2.0, 1.0, testing::uniform_times(0.9, 1.0, 11));
  auto r = monotonicity_report(traj, make_schedule(2.0, 2.0, 0.0), 0.0);
  EXPECT_TRUE(r.equality);
  EXPECT_TRUE(r.pass);
  // three-point differences of -3 sqrt(t) c^2 with spacing 0.01
  EXPECT_LE(r.max_equality_residual, 1e-4);
}

TEST(Monotonicity, SineRunDecreases) {
  auto g = testing::unit_line(128);
  auto traj = run(testing::sine_data(g), 2.0, 0.5, testing::geometric_times(0.01, 0.5, 25));
  auto r = monotonicity_report(traj, make_schedule(2.0, 1.0, 0.0), 0.0);
  EXPECT_TRUE(r.pass);
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].W, r.rows[i - 1].W);
  std::ostringstream csv;
  write_entropy_csv(csv, r);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "t,N,W,dWdt,D_total,D_hessian,D_ricci,D_trace,D_weighted_extra,pass");
}

TEST(Monotonicity, InsufficientSamples) {
  auto traj = run(testing::unit_line(16)->constant(1.0), 2.0, 1.0, {0.5, 1.0});
  EXPECT_THROW(monotonicity_report(traj, make_schedule(2.0, 1.0, 0.0), 0.0), InsufficientSamples);
}

}  // namespace
}  // namespace pmelab
