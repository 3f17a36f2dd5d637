#include "pmelab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pmelab/csv.hpp"
#include "pmelab/error.hpp"
#include "pmelab/operators.hpp"
#include "time_stencil.hpp"

namespace pmelab {
namespace {

constexpr double kSeriesThreshold = 1e-6;

void require_positive_time(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("entropy quantities need t > 0");
}

double max_spacing(const std::vector<SolverState>& s) {
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) d = std::max(d, s[i + 1].t - s[i].t);
  return d;
}

}  // namespace

double schedule_exponent(double gamma, double dim_param) {
  const double p = dim_param * (gamma - 1.0);
  return p / (p + 2.0);
}

CoefficientSchedule make_schedule(double gamma, double dim_param, double kappa) {
  if (!(gamma > 1.0)) throw std::invalid_argument("schedule: gamma must be > 1");
  if (!(dim_param >= 1.0)) throw std::invalid_argument("schedule: dimension must be >= 1");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("schedule: kappa must be finite and >= 0");
  return {gamma, dim_param, schedule_exponent(gamma, dim_param), kappa};
}

ScheduleValues schedule_eval(const CoefficientSchedule& s, double t) {
  require_positive_time(t);
  const double a = s.a;
  const double k = s.kappa;
  const double x = k * t;
  ScheduleValues out;
  if (x < kSeriesThreshold) {
    out.sigma = std::pow(t, a) * std::pow(1.0 + x + 2.0 * x * x / 3.0, a);
    out.beta = t * (1.0 + 2.0 * x * x / 3.0);
    out.eta = a / t * (1.0 + x + x * x / 3.0);
  } else if (x < 20.0) {
    out.sigma = std::pow(std::expm1(2.0 * x) / (2.0 * k), a);
    out.beta = std::sinh(2.0 * x) / (2.0 * k);
    out.eta = 2.0 * a * k / -std::expm1(-2.0 * x);
  } else {
    // e^{2x} - 1 = e^{2x} (1 - e^{-2x}); keeps sigma finite for large kappa t.
    out.sigma = std::exp(a * (2.0 * x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0 * k)));
    out.beta = std::sinh(2.0 * x) / (2.0 * k);
    out.eta = 2.0 * a * k / -std::expm1(-2.0 * x);
  }
  out.sigma_dot = out.eta * out.sigma;
  out.beta_dot = std::cosh(2.0 * x);
  return out;
}

double curvature_level(double K, const ScalarField& u0, double gamma) {
  return K * std::pow(u0.max(), gamma - 1.0);
}

double nash_entropy(const SolverState& state, const CoefficientSchedule& schedule) {
  const auto c = schedule_eval(schedule, state.t);
  return -c.sigma * integrate(state.v * state.u, natural_measure(state.u));
}

double w_entropy(const SolverState& state, const CoefficientSchedule& schedule) {
  const auto c = schedule_eval(schedule, state.t);
  const Measure mu = natural_measure(state.u);
  const double grad_term = integrate(norm_squared(gradient(state.v)) * state.u, mu);
  const double mass_term = integrate(state.v * state.u, mu);
  return c.sigma * c.beta * state.gamma * grad_term - c.sigma * (1.0 + c.beta * c.eta) * mass_term;
}

DissipationBreakdown dissipation(const SolverState& state, const CoefficientSchedule& schedule,
                                 double K) {
  const auto c = schedule_eval(schedule, state.t);
  const Geometry& g = *state.geometry();
  const double gm1 = state.gamma - 1.0;
  const double d = g.m_param();
  const double q = d - g.dim();
  const Measure mu = natural_measure(state.u);

  const VectorField grad_v = gradient(state.v);
  const ScalarField grad_sq = norm_squared(grad_v);
  const SymTensorField hess_v = hessian(state.v);
  const ScalarField weight = 2.0 * c.sigma * c.beta * state.v * state.u;

  DissipationBreakdown out;
  out.hessian = integrate(gm1 * shifted_norm_squared(hess_v, c.eta / (d * gm1)) * weight, mu);

  ScalarField curvature = K * grad_sq;
  VectorField grad_f(state.geometry());
  if (g.weight_varies()) {
    for (int a = 0; a < g.dim(); ++a) {
      const auto src = g.weight_gradient(a);
      std::copy(src.begin(), src.end(), grad_f.component(a).begin());
    }
    const ScalarField drift = dot(grad_v, grad_f);
    curvature += contract(hessian(g.weight()), grad_v, grad_v) - (1.0 / q) * drift * drift;
  }
  out.ricci = integrate(gm1 * curvature * weight, mu);

  const ScalarField trace_term = gm1 * weighted_laplacian(state.v) + c.eta;
  out.trace = integrate(trace_term * trace_term * weight, mu);

  if (q > 0.0) {
    const ScalarField shifted = dot(grad_v, grad_f) + (-q * c.eta / (d * gm1));
    out.weighted_extra = integrate((gm1 / q) * shifted * shifted * weight, mu);
  }
  out.total = out.hessian + out.ricci + out.trace + out.weighted_extra;

  const double gk = state.gamma * schedule.kappa;
  const ScalarField gap = (gk - gm1 * K * state.v) * grad_sq * state.u;
  out.curvature_slack = c.beta * 2.0 * c.sigma * integrate(gap, mu);
  return out;
}

EntropyReport monotonicity_report(const Trajectory& trajectory, const CoefficientSchedule& schedule,
                                  double K, const ToleranceModel& model) {
  const auto& s = trajectory.samples;
  if (s.size() < 3) throw InsufficientSamples(3, s.size());
  const Geometry& g = *trajectory.geometry();
  const double gamma = trajectory.gamma();

  EntropyReport report;
  report.equality = K == 0.0 && !g.weight_varies() && g.m_param() == g.dim();

  const double u0_level = std::pow(trajectory.initial.u.max(), gamma - 1.0);
  std::vector<double> W;
  W.reserve(s.size());
  for (const auto& st : s) {
    W.push_back(w_entropy(st, schedule));
    if (std::pow(st.u.max(), gamma - 1.0) > u0_level * (1.0 + 1e-10)) report.kappa_dominates = false;
  }

  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const auto c = detail::three_point(s[i - 1].t, s[i].t, s[i + 1].t);
    EntropyRow row;
    row.t = s[i].t;
    row.N = nash_entropy(s[i], schedule);
    row.W = W[i];
    row.dWdt = c.first[0] * W[i - 1] + c.first[1] * W[i] + c.first[2] * W[i + 1];
    row.D = dissipation(s[i], schedule, K);
    report.scale = std::max(report.scale, std::abs(row.W) + row.D.total);
    report.rows.push_back(row);
  }

  report.tolerance = model(g.min_spacing(), max_spacing(s), report.scale);
  const double tol = report.tolerance;
  report.max_dWdt = -std::numeric_limits<double>::infinity();
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (auto& row : report.rows) {
    const double excess = row.dWdt + row.D.total;
    row.pass = row.dWdt <= tol && excess <= tol && (!report.equality || std::abs(excess) <= tol);
    report.max_dWdt = std::max(report.max_dWdt, row.dWdt);
    report.max_excess = std::max(report.max_excess, excess);
    report.max_equality_residual = std::max(report.max_equality_residual, std::abs(excess));
    report.max_identity_residual =
        std::max(report.max_identity_residual, std::abs(excess + row.D.curvature_slack));
    report.pass = report.pass && row.pass;
  }
  report.pass = report.pass && report.kappa_dominates;
  return report;
}

void write_entropy_csv(std::ostream& out, const EntropyReport& report) {
  CsvWriter csv(out);
  csv.header({"t", "N", "W", "dWdt", "D_total", "D_hessian", "D_ricci", "D_trace",
              "D_weighted_extra", "pass"});
  for (const auto& r : report.rows)
    csv.row({r.t, r.N, r.W, r.dWdt, r.D.total, r.D.hessian, r.D.ricci, r.D.trace,
             r.D.weighted_extra, r.pass});
}

}  // namespace pmelab
