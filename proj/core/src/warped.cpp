#include "pmelab/warped.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmelab/operators.hpp"

namespace pmelab {
namespace {

ScalarField weight_derivative(const Geometry& g, int axis) {
  const auto d = g.weight_gradient(axis);
  return ScalarField(g.ptr(), std::vector<double>(d.begin(), d.end()));
}

VectorField weight_gradient_field(const Geometry& g) {
  VectorField out(g.ptr());
  for (int a = 0; a < g.dim(); ++a) {
    const auto d = g.weight_gradient(a);
    std::copy(d.begin(), d.end(), out.component(a).begin());
  }
  return out;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

}  // namespace

WarpedGeometry::WarpedGeometry(GeometryPtr base) : base_(std::move(base)) {
  const double gap = base_->m_param() - base_->dim();
  if (!(gap >= 1.0) || gap != std::floor(gap))
    throw std::invalid_argument("warped product needs m - n to be an integer >= 1");
  q_ = static_cast<int>(gap);
  const ScalarField f = base_->weight();
  const double q = q_;
  warp_ = f.map([q](double x) { return std::exp(-x / q); });
  fiber_metric_ = f.map([q](double x) { return std::exp(-2.0 * x / q); });
}

double WarpedGeometry::volume() const { return integrate(pow(warp_, q_)); }

ChristoffelTable christoffel(const WarpedGeometry& warped, ChristoffelMode mode) {
  const Geometry& g = *warped.base();
  const int n = g.dim();
  const double q = warped.fiber_dim();
  const ScalarField& G = warped.fiber_metric();
  ChristoffelTable table;
  for (int k = 0; k < n; ++k) {
    if (mode == ChristoffelMode::closed_form) {
      const ScalarField fk = weight_derivative(g, k);
      table.mixed.push_back((-1.0 / q) * fk);
      table.fiber.push_back((1.0 / q) * fk * G);
    } else {
      const ScalarField dG = partial(G, k);
      table.mixed.push_back(0.5 * dG / G);
      table.fiber.push_back(-0.5 * dG);
    }
    table.base.emplace_back(static_cast<std::size_t>(n * (n + 1) / 2), g.constant(0.0));
  }
  return table;
}

WarpedHessian warped_hessian(const ScalarField& v, const ChristoffelTable& table) {
  const Geometry& g = *v.geometry();
  const int n = g.dim();
  const VectorField dv = gradient(v);
  WarpedHessian h;
  h.base_block = hessian(v);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto block = h.base_block.at(i, j);
      for (int k = 0; k < n; ++k) {
        const auto& gamma = table.base[k][SymTensorField::slot(i, j, n)];
        const auto dk = dv.component(k);
        for (std::size_t p = 0; p < g.size(); ++p) block[p] -= gamma[p] * dk[p];
      }
    }
  // d_i d_alpha v = 0, Gamma^k_{i alpha} = 0, and d_beta v = 0 leave nothing.
  for (int i = 0; i < n; ++i) h.mixed.push_back(g.constant(0.0));
  h.fiber = g.constant(0.0);
  for (int k = 0; k < n; ++k) h.fiber -= table.fiber[k] * dv.component_field(k);
  return h;
}

double ComponentResiduals::max() const { return std::max({base_block, mixed, fiber}); }

ComponentResiduals hessian_components_check(const WarpedGeometry& warped, const ScalarField& v,
                                            ChristoffelMode mode) {
  const Geometry& g = *warped.base();
  require_same_geometry(warped.base(), v.geometry());
  const WarpedHessian h = warped_hessian(v, christoffel(warped, mode));
  const SymTensorField base = hessian(v);
  ComponentResiduals r;
  for (int i = 0; i < g.dim(); ++i) {
    for (int j = i; j < g.dim(); ++j)
      for (std::size_t p = 0; p < g.size(); ++p)
        r.base_block = std::max(r.base_block, std::abs(h.base_block.at(i, j)[p] - base.at(i, j)[p]));
    r.mixed = std::max(r.mixed, h.mixed[i].max_abs());
  }
  const ScalarField expected =
      (-1.0 / warped.fiber_dim()) * warped.fiber_metric() * dot(gradient(v), weight_gradient_field(g));
  r.fiber = max_abs_diff(h.fiber, expected);
  return r;
}

double warped_laplacian_check(const WarpedGeometry& warped, const ScalarField& v,
                              ChristoffelMode mode) {
  require_same_geometry(warped.base(), v.geometry());
  const WarpedHessian h = warped_hessian(v, christoffel(warped, mode));
  // Raising the fiber indices divides by w^2; q identical fiber directions.
  const ScalarField total =
      trace(h.base_block) + static_cast<double>(warped.fiber_dim()) * h.fiber / warped.fiber_metric();
  return max_abs_diff(total, weighted_laplacian(v));
}

double hessian_norm_decomposition_check(const WarpedGeometry& warped, const ScalarField& v,
                                        double eta, double gamma, ChristoffelMode mode) {
  require_same_geometry(warped.base(), v.geometry());
  const Geometry& g = *warped.base();
  const double q = warped.fiber_dim();
  const double m = g.m_param();
  const double c = eta / (m * (gamma - 1.0));
  const WarpedHessian h = warped_hessian(v, christoffel(warped, mode));
  const ScalarField& G = warped.fiber_metric();

  ScalarField lhs = shifted_norm_squared(h.base_block, c);
  for (const auto& mixed : h.mixed) lhs += 2.0 * q * mixed * mixed / G;
  const ScalarField fiber_entry = h.fiber / G + c;
  lhs += q * fiber_entry * fiber_entry;

  const ScalarField drift = dot(gradient(v), weight_gradient_field(g)) - q * c;
  const ScalarField rhs = shifted_norm_squared(hessian(v), c) + (1.0 / q) * drift * drift;
  return ((lhs - rhs) / lhs.map([](double x) { return std::max(1.0, std::abs(x)); })).max_abs();
}

SymTensorField warped_ricci(const WarpedGeometry& warped) {
  const Geometry& g = *warped.base();
  const int n = g.dim();
  const double q = warped.fiber_dim();
  const ChristoffelTable t = christoffel(warped, ChristoffelMode::finite_difference);
  SymTensorField ric(warped.base());
  for (int i = 0; i < n; ++i) {
    // Sum over the q fiber directions of Gamma^alpha_{i alpha}.
    const ScalarField trace_i = q * t.mixed[i];
    for (int j = i; j < n; ++j) {
      ScalarField rij = -partial(trace_i, j) - q * t.mixed[i] * t.mixed[j];
      auto out = ric.at(i, j);
      std::copy(rij.values().begin(), rij.values().end(), out.begin());
    }
  }
  return ric;
}

RicciLiftReport ricci_lift_check(const WarpedGeometry& warped) {
  const Geometry& g = *warped.base();
  const int n = g.dim();
  const double q = warped.fiber_dim();
  const SymTensorField ric = warped_ricci(warped);
  const SymTensorField hess_f = hessian(g.weight());
  const SmoothFunction* exact = g.analytic_weight();
  const Point periods = g.periods_point();

  RicciLiftReport r;
  double analytic = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    Point grad{}, x{};
    Matrix3 hess{};
    if (exact) {
      x = g.node(p);
      grad = exact->gradient(x, periods);
      hess = exact->hessian(x, periods);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double value = ric.at(i, j)[p];
        const double discrete = hess_f.at(i, j)[p] -
                                g.weight_gradient(i)[p] * g.weight_gradient(j)[p] / q;
        r.discrete = std::max(r.discrete, std::abs(value - discrete));
        if (exact)
          analytic = std::max(analytic, std::abs(value - (hess[i][j] - grad[i] * grad[j] / q)));
      }
  }
  if (exact) r.analytic = analytic;
  return r;
}

ChristoffelAgreement christoffel_agreement(const WarpedGeometry& warped) {
  const Geometry& g = *warped.base();
  const int n = g.dim();
  const double q = warped.fiber_dim();
  const ChristoffelTable closed = christoffel(warped, ChristoffelMode::closed_form);
  const ChristoffelTable fd = christoffel(warped, ChristoffelMode::finite_difference);
  ChristoffelAgreement out;
  for (int k = 0; k < n; ++k) {
    out.modes = std::max({out.modes, max_abs_diff(closed.mixed[k], fd.mixed[k]),
                          max_abs_diff(closed.fiber[k], fd.fiber[k])});
    for (std::size_t s = 0; s < closed.base[k].size(); ++s)
      out.modes = std::max(out.modes, max_abs_diff(closed.base[k][s], fd.base[k][s]));
  }
  if (const SmoothFunction* exact = g.analytic_weight()) {
    const Point periods = g.periods_point();
    double err = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const Point x = g.node(p);
      const Point grad = exact->gradient(x, periods);
      const double G = std::exp(-2.0 * exact->value(x, periods) / q);
      for (int k = 0; k < n; ++k) {
        err = std::max(err, std::abs(fd.mixed[k][p] + grad[k] / q));
        err = std::max(err, std::abs(fd.fiber[k][p] - grad[k] / q * G));
      }
    }
    out.analytic = err;
  }
  return out;
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

}  // namespace pmelab
