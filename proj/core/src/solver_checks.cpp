#include "pmelab/solver_checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pmelab/error.hpp"
#include "pmelab/operators.hpp"
#include "time_stencil.hpp"

namespace pmelab {
namespace {

double max_spacing(const std::vector<SolverState>& s, std::size_t lo, std::size_t hi) {
  double d = 0.0;
  for (std::size_t i = lo; i < hi; ++i) d = std::max(d, s[i + 1].t - s[i].t);
  return d;
}

void finish(IdentityReport& r, const ToleranceModel& model, double h, double dt_s) {
  r.max_residual = r.residuals.empty() ? 0.0 : *std::max_element(r.residuals.begin(), r.residuals.end());
  r.tolerance = model(h, dt_s, r.scale);
  r.pass = r.max_residual <= r.tolerance;
}

// Shared pieces of the evolution identities at one state.
struct Pointwise {
  ScalarField v, lap_v, w, vt;
  VectorField grad_v;
  SymTensorField hess_v;
  ScalarField hess_sq_plus_ric;
};

Pointwise pointwise(const SolverState& s) {
  Pointwise p;
  p.v = s.v;
  p.grad_v = gradient(s.v);
  p.w = norm_squared(p.grad_v);
  p.lap_v = weighted_laplacian(s.v);
  p.vt = (s.gamma - 1.0) * p.v * p.lap_v + p.w;
  p.hess_v = hessian(s.v);
  p.hess_sq_plus_ric =
      shifted_norm_squared(p.hess_v, 0.0) + weight_hessian_form(*s.geometry(), p.grad_v);
  return p;
}

}  // namespace

ScalarField weight_hessian_form(const Geometry& geometry, const VectorField& x) {
  if (!geometry.weight_varies()) return geometry.constant(0.0);
  return contract(hessian(geometry.weight()), x, x);
}

ScalarField pressure_rate(const SolverState& state) {
  const ScalarField w = norm_squared(gradient(state.v));
  return (state.gamma - 1.0) * state.v * weighted_laplacian(state.v) + w;
}

std::vector<TimedField> pressure_equation_residual(const Trajectory& trajectory) {
  const auto& s = trajectory.samples;
  if (s.size() < 2) throw InsufficientSamples(2, s.size());
  std::vector<TimedField> out;
  if (s.size() == 2) {
    const double dt = s[1].t - s[0].t;
    ScalarField diff = (s[1].v - s[0].v) * (1.0 / dt);
    diff -= 0.5 * (pressure_rate(s[0]) + pressure_rate(s[1]));
    out.push_back({0.5 * (s[0].t + s[1].t), std::move(diff)});
    return out;
  }
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const auto c = detail::three_point(s[i - 1].t, s[i].t, s[i + 1].t);
    ScalarField r = c.first[0] * s[i - 1].v + c.first[1] * s[i].v + c.first[2] * s[i + 1].v;
    r -= pressure_rate(s[i]);
    out.push_back({s[i].t, std::move(r)});
  }
  return out;
}

IdentityReport pressure_equation_check(const Trajectory& trajectory, const ToleranceModel& model) {
  IdentityReport r;
  r.name = "pressure_equation";
  const auto& s = trajectory.samples;
  for (auto& tf : pressure_equation_residual(trajectory)) {
    r.times.push_back(tf.t);
    r.residuals.push_back(tf.values.max_abs());
  }
  for (const auto& st : s) r.scale = std::max(r.scale, pressure_rate(st).max_abs());
  finish(r, model, trajectory.geometry()->min_spacing(), max_spacing(s, 0, s.size() - 1));
  return r;
}

IdentityReport evolution_identity_check(const Trajectory& trajectory, EvolutionIdentity which,
                                        double parameter, const ToleranceModel& model) {
  const auto& s = trajectory.samples;
  if (s.size() < 3) throw InsufficientSamples(3, s.size());
  const double gamma = trajectory.gamma();
  const double b = parameter;

  std::vector<Pointwise> pts;
  pts.reserve(s.size());
  for (const auto& st : s) pts.push_back(pointwise(st));

  std::function<ScalarField(const Pointwise&)> quantity;
  std::function<ScalarField(const Pointwise&, const ScalarField&)> rhs;
  IdentityReport r;
  switch (which) {
    case EvolutionIdentity::v_t:
      r.name = "evolution_v_t";
      quantity = [](const Pointwise& p) { return p.vt; };
      rhs = [gamma](const Pointwise& p, const ScalarField& x) {
        return (gamma - 1.0) * x * p.lap_v + 2.0 * dot(p.grad_v, gradient(x));
      };
      break;
    case EvolutionIdentity::power_beta:
      r.name = "evolution_power_beta";
      quantity = [b](const Pointwise& p) { return pow(p.v, b); };
      rhs = [gamma, b](const Pointwise& p, const ScalarField&) {
        return b * (b + gamma - b * gamma) * pow(p.v, b - 1.0) * p.w;
      };
      break;
    case EvolutionIdentity::w:
      r.name = "evolution_w";
      quantity = [](const Pointwise& p) { return p.w; };
      rhs = [gamma](const Pointwise& p, const ScalarField& x) {
        return 2.0 * dot(p.grad_v, gradient(x)) + 2.0 * (gamma - 1.0) * x * p.lap_v -
               2.0 * (gamma - 1.0) * p.v * p.hess_sq_plus_ric;
      };
      break;
    case EvolutionIdentity::F_alpha:
      r.name = "evolution_F_alpha";
      quantity = [b](const Pointwise& p) { return (b * p.vt - p.w) / p.v; };
      rhs = [gamma, b](const Pointwise& p, const ScalarField& x) {
        const ScalarField f1 = (gamma - 1.0) * p.lap_v;
        const ScalarField ratio = p.vt / p.v;
        return 2.0 * gamma * dot(p.grad_v, gradient(x)) + 2.0 * (gamma - 1.0) * p.hess_sq_plus_ric +
               f1 * f1 + (b - 1.0) * ratio * ratio;
      };
      break;
  }

  std::vector<ScalarField> q;
  q.reserve(pts.size());
  for (const auto& p : pts) q.push_back(quantity(p));
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const auto c = detail::three_point(s[i - 1].t, s[i].t, s[i + 1].t);
    const ScalarField dt_q = c.first[0] * q[i - 1] + c.first[1] * q[i] + c.first[2] * q[i + 1];
    const ScalarField diffusion = (gamma - 1.0) * pts[i].v * weighted_laplacian(q[i]);
    const ScalarField right = rhs(pts[i], q[i]);
    r.times.push_back(s[i].t);
    r.residuals.push_back((dt_q - diffusion - right).max_abs());
    r.scale = std::max(r.scale, dt_q.max_abs() + diffusion.max_abs() + right.max_abs());
  }
  finish(r, model, trajectory.geometry()->min_spacing(), max_spacing(s, 0, s.size() - 1));
  return r;
}

IntegralIdentityReport integral_identity_check(const Trajectory& trajectory,
                                               const ToleranceModel& model) {
  const auto& s = trajectory.samples;
  if (s.size() < 3) throw InsufficientSamples(3, s.size());
  const double gamma = trajectory.gamma();
  std::vector<double> energy;
  for (const auto& st : s) energy.push_back(integrate(st.v * st.u, natural_measure(st.u)));

  IntegralIdentityReport out;
  out.first_derivative.name = "integral_first_derivative";
  out.second_derivative.name = "integral_second_derivative";
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const SolverState& st = s[i];
    const Measure mu = natural_measure(st.u);
    const Pointwise p = pointwise(st);
    const auto c = detail::three_point(s[i - 1].t, st.t, s[i + 1].t);
    const double d1 = c.first[0] * energy[i - 1] + c.first[1] * energy[i] + c.first[2] * energy[i + 1];
    const double d2 =
        c.second[0] * energy[i - 1] + c.second[1] * energy[i] + c.second[2] * energy[i + 1];
    const double r1 = -gamma * integrate(p.w * st.u, mu);
    const double r2 = 2.0 * (gamma - 1.0) *
                      integrate((p.hess_sq_plus_ric + (gamma - 1.0) * p.lap_v * p.lap_v) * p.v * st.u, mu);
    out.first_derivative.times.push_back(st.t);
    out.first_derivative.residuals.push_back(std::abs(d1 - r1));
    out.first_derivative.scale = std::max(out.first_derivative.scale, std::abs(d1) + std::abs(r1));
    out.second_derivative.times.push_back(st.t);
    out.second_derivative.residuals.push_back(std::abs(d2 - r2));
    out.second_derivative.scale = std::max(out.second_derivative.scale, std::abs(d2) + std::abs(r2));
  }
  const double h = trajectory.geometry()->min_spacing();
  const double dt_s = max_spacing(s, 0, s.size() - 1);
  finish(out.first_derivative, model, h, dt_s);
  finish(out.second_derivative, model, h, dt_s);
  return out;
}

}  // namespace pmelab
