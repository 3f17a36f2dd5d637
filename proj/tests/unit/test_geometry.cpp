#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pmelab/error.hpp"
#include "pmelab/geometry.hpp"
#include "pmelab/operators.hpp"
#include "test_support.hpp"

namespace pmelab {
namespace {

using testing::pi;

TEST(BuildTorus, DefaultsOnTheLine) {
  auto g = testing::unit_line(256);
  EXPECT_EQ(g->dim(), 1);
  EXPECT_EQ(g->size(), 256u);
  EXPECT_DOUBLE_EQ(g->spacing(0), 1.0 / 256);
  EXPECT_DOUBLE_EQ(g->m_param(), 1.0);
  EXPECT_FALSE(g->weighted());
}

TEST(BuildTorus, SquareQuadratureWeights) {
  auto g = testing::unit_square(64);
  EXPECT_DOUBLE_EQ(g->cell_volume(), 1.0 / 4096);
  EXPECT_DOUBLE_EQ(g->cell_volume() * g->size(), 1.0);
  EXPECT_DOUBLE_EQ(integrate(g->constant(1.0)), 1.0);
}

TEST(BuildTorus, WeightSampledAtNodes) {
  auto g = testing::weighted_line(128);
  ASSERT_TRUE(g->weighted());
  EXPECT_TRUE(g->weight_varies());
  EXPECT_DOUBLE_EQ(g->m_param(), 3.0);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = i / 128.0;
    EXPECT_NEAR(g->weight_values()[i], 0.2 * std::sin(2 * pi * x), 1e-15);
    EXPECT_NEAR(g->density()[i], std::exp(-0.2 * std::sin(2 * pi * x)), 1e-15);
  }
}

TEST(BuildTorus, RejectsBadInput) {
  EXPECT_THROW(build_torus(4, {8, 8, 8, 8}, {1, 1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(build_torus(1, {4}, {1.0}), std::invalid_argument);
  EXPECT_THROW(build_torus(1, {16}, {0.0}), std::invalid_argument);
  EXPECT_THROW(build_torus(1, {16}, {-1.0}), std::invalid_argument);
  TorusSpec spec;
  spec.dim = 2;
  spec.points = {16, 16};
  spec.periods = {1.0, 1.0};
  spec.m_param = 1.5;
  EXPECT_THROW(build_torus(spec), std::invalid_argument);  // m < n
  spec.weight = SmoothFunction::sine(0.0, 0.1, {1, 0, 0});
  spec.m_param = 2.0;
  EXPECT_THROW(build_torus(spec), std::invalid_argument);  // m = n with varying f
  spec.weight = SmoothFunction::constant(0.3);
  EXPECT_NO_THROW(build_torus(spec));
}

TEST(Operators, GradientOfConstantVanishes) {
  auto g = testing::unit_square(16);
  auto grad = gradient(g->constant(3.7));
  for (int a = 0; a < 2; ++a)
    for (double x : grad.component(a)) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(laplacian(g->constant(3.7)).max_abs(), 0.0);
}

TEST(Operators, LaplacianOfSineMatchesStencilSymbol) {
  // The div(grad) stencil has symbol -sin^2(k h)/h^2 with k = 2 pi; its error
  // against -k^2 is k^4 h^2 / 3 = (16/3) pi^4 h^2 to leading order.
  const int n = 256;
  auto g = testing::unit_line(n);
  const double h = 1.0 / n;
  auto s = g->sample(SmoothFunction::sine(0.0, 1.0, {1, 0, 0}));
  auto lap = laplacian(s);
  const double symbol = std::pow(std::sin(2 * pi * h) / h, 2);
  double err = 0.0, symbol_err = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    err = std::max(err, std::abs(lap[i] + 4 * pi * pi * s[i]));
    symbol_err = std::max(symbol_err, std::abs(lap[i] + symbol * s[i]));
  }
  EXPECT_LE(symbol_err, 1e-9);
  EXPECT_LE(err, 16.0 / 3.0 * std::pow(pi, 4) * h * h * (1 + 1e-3));
  EXPECT_GE(err, 16.0 / 3.0 * std::pow(pi, 4) * h * h * (1 - 1e-3));
}

TEST(Operators, HessianTraceIsLaplacian) {
  auto g = testing::unit_square(32);
  auto f = g->sample(SmoothFunction(0.0, {{{1, 1, 0}, 1.0, 0.0}, {{1, -1, 0}, -1.0, pi / 2}}));
  auto diff = trace(hessian(f)) - laplacian(f);
  EXPECT_LE(diff.max_abs(), 1e-10);
}

TEST(Operators, SecondOrderConvergence) {
  std::vector<double> grad_err, lap_err;
  for (int n : {32, 64, 128}) {
    auto g = testing::unit_line(n);
    auto fn = SmoothFunction(0.3, {{{1, 0, 0}, 1.0, 0.4}, {{2, 0, 0}, 0.5, 1.1}});
    auto f = g->sample(fn);
    auto grad = gradient(f);
    auto lap = laplacian(f);
    double eg = 0.0, el = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const Point x = g->node(i);
      eg = std::max(eg, std::abs(grad.component(0)[i] - fn.gradient(x, g->periods_point())[0]));
      el = std::max(el, std::abs(lap[i] - fn.hessian(x, g->periods_point())[0][0]));
    }
    grad_err.push_back(eg);
    lap_err.push_back(el);
  }
  for (std::size_t k = 0; k + 1 < grad_err.size(); ++k) {
    EXPECT_GE(grad_err[k] / grad_err[k + 1], 3.7);
    EXPECT_LE(grad_err[k] / grad_err[k + 1], 4.3);
    EXPECT_GE(lap_err[k] / lap_err[k + 1], 3.7);
    EXPECT_LE(lap_err[k] / lap_err[k + 1], 4.3);
  }
}

TEST(Operators, SummationByPartsOnRandomFields) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 3;
    const int n = dim == 3 ? 8 : 16 + 8 * (trial % 2);
    auto g = build_torus(dim, std::vector<int>(dim, n), std::vector<double>(dim, rng.uniform(0.5, 2.0)));
    auto a = g->sample_fn([&](const Point&) { return rng.uniform(-1.0, 1.0); });
    auto b = g->sample_fn([&](const Point&) { return rng.uniform(-1.0, 1.0); });
    const double lhs = integrate(dot(gradient(a), gradient(b)));
    const double rhs = -integrate(a * laplacian(b));
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(lhs))) << "trial " << trial;
    // divergence is minus the adjoint of gradient
    auto grad_a = gradient(a);
    const double adj = integrate(b * divergence(grad_a));
    EXPECT_NEAR(adj, -integrate(dot(gradient(b), grad_a)), 1e-13 * std::max(1.0, std::abs(adj)));
  }
}

TEST(Operators, WeightedLaplacianReducesWithoutWeight) {
  auto g = testing::unit_line(64);
  auto s = testing::sine_data(g);
  EXPECT_EQ((weighted_laplacian(s) - laplacian(s)).max_abs(), 0.0);
  TorusSpec spec;
  spec.dim = 1;
  spec.points = {64};
  spec.periods = {1.0};
  spec.weight = SmoothFunction::constant(0.7);
  auto gc = build_torus(spec);
  auto sc = testing::sine_data(gc);
  EXPECT_EQ((weighted_laplacian(sc) - laplacian(sc)).max_abs(), 0.0);
}

TEST(Operators, WeightedLaplacianOfSine) {
  std::vector<double> errors;
  for (int n : {64, 128, 256}) {
    auto g = testing::weighted_line(n);
    auto v = g->sample(SmoothFunction::sine(0.0, 1.0, {1, 0, 0}));
    auto lap = weighted_laplacian(v);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double x = g->node(i)[0];
      const double exact = -4 * pi * pi * std::sin(2 * pi * x) -
                           0.2 * 4 * pi * pi * std::pow(std::cos(2 * pi * x), 2);
      err = std::max(err, std::abs(lap[i] - exact));
    }
    errors.push_back(err);
  }
  EXPECT_LE(errors.back(), 1e-2);
  EXPECT_GE(errors[0] / errors[1], 3.7);
  EXPECT_GE(errors[1] / errors[2], 3.7);
}

TEST(Operators, GeometryMismatchThrows) {
  auto a = testing::unit_line(16).get()->constant(1.0);
  auto b = testing::unit_line(32).get()->constant(1.0);
  EXPECT_THROW(a + b, GeometryMismatch);
  EXPECT_THROW(dot(gradient(a), gradient(b)), GeometryMismatch);
}

TEST(Integrate, ExactForTrigPolynomials) {
  for (int n : {8, 16, 64, 100}) {
    auto g = testing::unit_line(n);
    auto s = g->sample_fn([](const Point& x) { return std::pow(std::sin(2 * pi * x[0]), 2); });
    EXPECT_NEAR(integrate(s), 0.5, 1e-15);
  }
}

TEST(Integrate, WeightedMeasureOfOne) {
  auto g = testing::weighted_line(128);
  EXPECT_DOUBLE_EQ(integrate(g->constant(1.0), Measure::volume), 1.0);
  // I_0(0.2), 30-digit reference.
  EXPECT_NEAR(integrate(g->constant(1.0), Measure::weighted), 1.0100250277951458, 1e-10);
  EXPECT_EQ(natural_measure(g->constant(1.0)), Measure::weighted);
}

TEST(BakryEmery, ZeroWithoutVaryingWeight) {
  EXPECT_EQ(bakry_emery_lower_bound(*testing::unit_line(64)), 0.0);
  TorusSpec spec;
  spec.dim = 1;
  spec.points = {64};
  spec.periods = {1.0};
  spec.weight = SmoothFunction::constant(2.0);
  EXPECT_EQ(bakry_emery_lower_bound(*build_torus(spec)), 0.0);
}

TEST(BakryEmery, InvariantUnderConstantShift) {
  for (double m : {2.0, 3.0, 5.5}) {
    TorusSpec spec;
    spec.dim = 2;
    spec.points = {32, 32};
    spec.periods = {1.0, 1.5};
    auto f = SmoothFunction(0.0, {{{1, 1, 0}, 0.3, 0.2}, {{0, 2, 0}, 0.1, 0.0}});
    spec.weight = f;
    spec.m_param = m + 1.0;
    const double k0 = bakry_emery_lower_bound(*build_torus(spec));
    spec.weight = f.shifted(4.25);
    const double k1 = bakry_emery_lower_bound(*build_torus(spec));
    EXPECT_GT(k0, 0.0);
    EXPECT_NEAR(k0, k1, 1e-12 * k0);
  }
}

TEST(Geodesic, Examples) {
  auto line = testing::unit_line(16);
  EXPECT_DOUBLE_EQ(geodesic_distance({0, 0, 0}, {0.4, 0, 0}, *line), 0.4);
  EXPECT_NEAR(geodesic_distance({0, 0, 0}, {0.7, 0, 0}, *line), 0.3, 1e-15);
  auto sq = testing::unit_square(16);
  EXPECT_NEAR(geodesic_distance({0, 0, 0}, {0.5, 0.5, 0}, *sq), std::sqrt(2.0) / 2, 1e-15);
}

TEST(Geodesic, MetricAxiomsOnRandomTriples) {
  SplitMix64 rng(11);
  auto g = build_torus(3, {8, 8, 8}, {1.0, 2.0, 0.5});
  auto draw = [&] {
    return Point{rng.uniform(0, 1.0), rng.uniform(0, 2.0), rng.uniform(0, 0.5)};
  };
  for (int k = 0; k < 1000; ++k) {
    const Point x = draw(), y = draw(), z = draw();
    const double dxy = geodesic_distance(x, y, *g);
    EXPECT_EQ(dxy, geodesic_distance(y, x, *g));
    EXPECT_LE(dxy, geodesic_distance(x, z, *g) + geodesic_distance(z, y, *g) + 1e-15);
    EXPECT_LE(dxy, std::sqrt(0.25 + 1.0 + 0.0625) + 1e-15);
    EXPECT_EQ(geodesic_distance(x, x, *g), 0.0);
  }
}

TEST(Interpolate, ExactAtNodesAndLinearBetween) {
  auto g = testing::unit_line(16);
  auto f = g->sample_fn([](const Point& x) { return x[0]; });
  EXPECT_DOUBLE_EQ(interpolate(f, g->node(5)), f[5]);
  EXPECT_NEAR(interpolate(f, {5.5 / 16, 0, 0}), 5.5 / 16, 1e-15);
}

}  // namespace
}  // namespace pmelab
