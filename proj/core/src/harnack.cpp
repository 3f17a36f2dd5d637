#include "pmelab/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmelab/error.hpp"
#include "pmelab/operators.hpp"
#include "pmelab/solver_checks.hpp"
#include "time_stencil.hpp"

namespace pmelab {
namespace {

void require_positive_time(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("Harnack coefficients need t > 0");
}

// sinh(y) - y without cancellation for small y.
double sinh_minus_arg(double y) {
  if (std::abs(y) < 0.1) {
    const double y2 = y * y;
    return y * y2 / 6.0 * (1.0 + y2 / 20.0 * (1.0 + y2 / 42.0 * (1.0 + y2 / 72.0)));
  }
  return std::sinh(y) - y;
}

// x cosh(x) - sinh(x) without cancellation for small x.
double x_cosh_minus_sinh(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return x * x2 * (1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (1.0 / 840.0 + x2 / 45360.0)));
  }
  return x * std::cosh(x) - std::sinh(x);
}

double simpson_step(const std::function<double(double)>& fn, double a, double b, double fa,
                    double fm, double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return simpson_step(fn, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_step(fn, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double max_spacing(const std::vector<SolverState>& s) {
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) d = std::max(d, s[i + 1].t - s[i].t);
  return d;
}

double relative(double lhs, double rhs, std::initializer_list<double> terms) {
  double mag = 0.0;
  for (double x : terms) mag += std::abs(x);
  return std::abs(lhs - rhs) / std::max(1.0, mag);
}

// E = (gamma-1) eta / a = sigma'/(2 sigma) + r, in closed form where available.
double drift_rate(const SigmaFamily& f, double t) {
  const double r = f.rate();
  switch (f.kind()) {
    case SigmaKind::power2:
      return 1.0 / t + r;
    case SigmaKind::sinh2:
      return r * (1.0 / std::tanh(r * t) + 1.0);
    case SigmaKind::custom:
      break;
  }
  return f.dsigma(t) / (2.0 * f.sigma(t)) + r;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double lo, double hi,
                        double rel_tol, int max_depth) {
  if (hi == lo) return 0.0;
  if (hi < lo) return -adaptive_simpson(fn, hi, lo, rel_tol, max_depth);
  const double nudge = 1e-14 * (hi - lo);
  auto eval = [&](double x) { return fn(x == 0.0 ? nudge : x); };
  const double fa = eval(lo);
  const double fb = eval(hi);
  const double fm = eval(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  // Scale from |fn| so that an integral vanishing by symmetry does not force
  // the recursion to its depth limit.
  const double magnitude = (hi - lo) / 6.0 * (std::abs(fa) + 4.0 * std::abs(fm) + std::abs(fb));
  const double eps = rel_tol * (magnitude > 0.0 ? magnitude : 1.0);
  return simpson_step(eval, lo, hi, fa, fm, fb, whole, eps, max_depth);
}

SigmaFamily SigmaFamily::power2(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("power2: rate must be >= 0");
  SigmaFamily f;
  f.kind_ = SigmaKind::power2;
  f.rate_ = rate;
  return f;
}

SigmaFamily SigmaFamily::sinh2(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("sinh2: rate must be > 0");
  SigmaFamily f;
  f.kind_ = SigmaKind::sinh2;
  f.rate_ = rate;
  return f;
}

SigmaFamily SigmaFamily::custom(Fn sigma, Fn dsigma, double rate, double horizon) {
  if (!sigma || !dsigma) throw std::invalid_argument("custom sigma family needs sigma and sigma'");
  if (!(rate >= 0.0)) throw std::invalid_argument("custom sigma family: rate must be >= 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("custom sigma family: horizon must be > 0");
  SigmaFamily f;
  f.kind_ = SigmaKind::custom;
  f.rate_ = rate;
  f.horizon_ = horizon;
  f.sigma_ = std::move(sigma);
  f.dsigma_ = std::move(dsigma);
  f.validate();
  return f;
}

SigmaFamily SigmaFamily::tabulated(std::vector<double> knots, std::vector<double> sigma,
                                   std::vector<double> dsigma, double rate) {
  if (knots.size() < 2 || sigma.size() != knots.size() || dsigma.size() != knots.size())
    throw std::invalid_argument("tabulated sigma: need at least two knots and matching columns");
  if (knots.front() != 0.0) throw std::invalid_argument("tabulated sigma: first knot must be 0");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (!(knots[i + 1] > knots[i]))
      throw std::invalid_argument("tabulated sigma: knots must be strictly increasing");

  struct Table {
    std::vector<double> t, y, dy;
    // Interval index and local coordinate for t in [t0, tN].
    std::pair<std::size_t, double> locate(double x) const {
      if (!(x >= t.front() && x <= t.back()))
        throw std::out_of_range("tabulated sigma evaluated outside its knots");
      auto it = std::upper_bound(t.begin(), t.end(), x);
      std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
      if (i + 1 >= t.size()) i = t.size() - 2;
      return {i, (x - t[i]) / (t[i + 1] - t[i])};
    }
    double value(double x) const {
      const auto [i, s] = locate(x);
      const double h = t[i + 1] - t[i];
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * y[i] + (s3 - 2 * s2 + s) * h * dy[i] +
             (-2 * s3 + 3 * s2) * y[i + 1] + (s3 - s2) * h * dy[i + 1];
    }
    double slope(double x) const {
      const auto [i, s] = locate(x);
      const double h = t[i + 1] - t[i];
      const double s2 = s * s;
      return ((6 * s2 - 6 * s) * y[i] + (6 * s - 6 * s2) * y[i + 1]) / h +
             (3 * s2 - 4 * s + 1) * dy[i] + (3 * s2 - 2 * s) * dy[i + 1];
    }
  };
  const double horizon = knots.back();
  auto table = std::make_shared<Table>(Table{std::move(knots), std::move(sigma), std::move(dsigma)});
  return custom([table](double x) { return table->value(x); },
                [table](double x) { return table->slope(x); }, rate, horizon);
}

void SigmaFamily::validate() const {
  const int n = 64;
  for (int k = 1; k <= n; ++k) {
    const double t = horizon_ * k / n;
    const double s = sigma(t), ds = dsigma(t);
    if (!(s > 0.0) || !(ds > 0.0) || !std::isfinite(s) || !std::isfinite(ds))
      throw std::invalid_argument("sigma family: sigma and sigma' must be positive on (0, T]");
  }
  double prev_s = std::numeric_limits<double>::infinity();
  double prev_ratio = std::numeric_limits<double>::infinity();
  double first_s = 0.0, first_ratio = 0.0;
  for (int e = 4; e <= 8; ++e) {
    const double t = std::min(std::pow(10.0, -e), horizon_);
    const double s = sigma(t), ds = dsigma(t);
    if (!(s > 0.0) || !(ds > 0.0))
      throw std::invalid_argument("sigma family: sigma and sigma' must be positive near t = 0");
    const double ratio = s / ds;
    if (!(s < prev_s) || !(ratio < prev_ratio))
      throw std::invalid_argument("sigma family: sigma and sigma/sigma' must decrease to 0 as t -> 0");
    if (e == 4) {
      first_s = s;
      first_ratio = ratio;
    }
    prev_s = s;
    prev_ratio = ratio;
  }
  if (!(prev_s <= 0.1 * first_s) || !(prev_ratio <= 0.1 * first_ratio))
    throw std::invalid_argument("sigma family: sigma and sigma/sigma' must vanish as t -> 0");

  const double top = std::min(1.0, horizon_);
  auto integrand = [this](double t) {
    const double ds = dsigma(t);
    return ds * ds / sigma(t);
  };
  const double i6 = adaptive_simpson(integrand, 1e-6 * top, top);
  const double i10 = adaptive_simpson(integrand, 1e-10 * top, top);
  if (!std::isfinite(i6) || !std::isfinite(i10) ||
      std::abs(i10 - i6) > 1e-3 * std::max(1.0, std::abs(i10)))
    throw std::invalid_argument("sigma family: sigma'^2/sigma must be integrable at t = 0");
}

std::string SigmaFamily::name() const {
  switch (kind_) {
    case SigmaKind::power2:
      return "power2";
    case SigmaKind::sinh2:
      return "sinh2";
    case SigmaKind::custom:
      break;
  }
  return "custom";
}

double SigmaFamily::sigma(double t) const {
  switch (kind_) {
    case SigmaKind::power2:
      return t * t;
    case SigmaKind::sinh2: {
      const double s = std::sinh(rate_ * t);
      return s * s;
    }
    case SigmaKind::custom:
      break;
  }
  return sigma_(t);
}

double SigmaFamily::dsigma(double t) const {
  switch (kind_) {
    case SigmaKind::power2:
      return 2.0 * t;
    case SigmaKind::sinh2:
      return rate_ * std::sinh(2.0 * rate_ * t);
    case SigmaKind::custom:
      break;
  }
  return dsigma_(t);
}

AlphaPhi alpha_phi(const SigmaFamily& f, double a, double t) {
  require_positive_time(t);
  const double r = f.rate();
  switch (f.kind()) {
    case SigmaKind::power2:
      return {1.0 + 2.0 * r * t / 3.0, a / t + a * r * (1.0 + r * t / 3.0)};
    case SigmaKind::sinh2: {
      const double x = r * t;
      const double s = std::sinh(x);
      return {1.0 + 0.5 * sinh_minus_arg(2.0 * x) / (s * s), a * r * (1.0 + 1.0 / std::tanh(x))};
    }
    case SigmaKind::custom:
      break;
  }
  if (t > f.horizon()) throw std::out_of_range("sigma family evaluated beyond its horizon");
  const double s = f.sigma(t);
  const double i_sigma = adaptive_simpson([&](double x) { return f.sigma(x); }, 0.0, t);
  const double i_energy = adaptive_simpson(
      [&](double x) {
        const double ds = f.dsigma(x);
        return ds * ds / f.sigma(x);
      },
      0.0, t);
  return {1.0 + 2.0 * r * i_sigma / s, r * a + r * r * a * i_sigma / s + a * i_energy / (4.0 * s)};
}

AlphaPhi alpha_phi_derivative(const SigmaFamily& f, double a, double t) {
  require_positive_time(t);
  const double r = f.rate();
  switch (f.kind()) {
    case SigmaKind::power2:
      return {2.0 * r / 3.0, -a / (t * t) + a * r * r / 3.0};
    case SigmaKind::sinh2: {
      const double x = r * t;
      const double s = std::sinh(x);
      return {2.0 * r * x_cosh_minus_sinh(x) / (s * s * s), -a * r * r / (s * s)};
    }
    case SigmaKind::custom:
      break;
  }
  double h = 0.05 * t;
  if (std::isfinite(f.horizon())) h = std::min(h, 0.25 * (f.horizon() - t));
  if (!(h > 0.0)) throw std::out_of_range("sigma family derivative needs room around t");
  const AlphaPhi m2 = alpha_phi(f, a, t - 2 * h), m1 = alpha_phi(f, a, t - h);
  const AlphaPhi p1 = alpha_phi(f, a, t + h), p2 = alpha_phi(f, a, t + 2 * h);
  auto d = [h](double fm2, double fm1, double fp1, double fp2) {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  };
  return {d(m2.alpha, m1.alpha, p1.alpha, p2.alpha), d(m2.phi, m1.phi, p1.phi, p2.phi)};
}

HarnackCoefficients HarnackCoefficients::with_phi_scale(double factor) const {
  HarnackCoefficients out = *this;
  out.phi_scale_ *= factor;
  return out;
}

double OdeResidual::max() const {
  return std::max({sigma_equation, alpha_equation, phi_equation, integrated_alpha, integrated_phi});
}

OdeResidual ode_system_residual(const SigmaFamily& f, double a, double gamma, double t) {
  require_positive_time(t);
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must be > 1");
  const double r = f.rate();
  const AlphaPhi v = alpha_phi(f, a, t);
  const AlphaPhi dv = alpha_phi_derivative(f, a, t);
  const double s = f.sigma(t), ds = f.dsigma(t);
  const double E = drift_rate(f, t);
  const double eta = a * E / (gamma - 1.0);
  const double gap = 2.0 * r - 2.0 * E;

  OdeResidual out;
  out.sigma_equation = relative(ds / s, 2.0 * E - 2.0 * r, {ds / s, 2.0 * E, 2.0 * r});
  out.alpha_equation = relative(v.alpha * gap, dv.alpha - 2.0 * E, {v.alpha * gap, dv.alpha, 2.0 * E});
  const double lhs3 = (gamma - 1.0) * (gamma - 1.0) * eta * eta / a;
  out.phi_equation = relative(lhs3, dv.phi - gap * v.phi, {lhs3, dv.phi, gap * v.phi});
  out.integrated_alpha = relative(ds * v.alpha + s * dv.alpha, ds + 2.0 * r * s,
                                  {ds * v.alpha, s * dv.alpha, ds, 2.0 * r * s});
  const double q = ds / s + 2.0 * r;
  const double rhs5 = a * s / 4.0 * q * q;
  out.integrated_phi = relative(ds * v.phi + s * dv.phi, rhs5, {ds * v.phi, s * dv.phi, rhs5});
  return out;
}

ScalarField harnack_residual(const SolverState& state, const HarnackCoefficients& coeffs) {
  require_positive_time(state.t);
  if (!(state.v.min() > 0.0)) throw std::invalid_argument("Harnack residual needs v > 0");
  const ScalarField w = norm_squared(gradient(state.v));
  const ScalarField vt = pressure_rate(state);
  return (w - coeffs.alpha(state.t) * vt) / state.v - coeffs.phi(state.t);
}

IdentityReport harnack_estimate_check(const Trajectory& trajectory,
                                      const HarnackCoefficients& coeffs,
                                      const ToleranceModel& model) {
  IdentityReport r;
  r.name = "harnack_estimate_" + coeffs.family().name();
  for (const auto& st : trajectory.samples) {
    const double alpha = coeffs.alpha(st.t);
    const double phi = coeffs.phi(st.t);
    const ScalarField w_over_v = norm_squared(gradient(st.v)) / st.v;
    const ScalarField vt_over_v = pressure_rate(st) / st.v;
    r.times.push_back(st.t);
    r.residuals.push_back((w_over_v - alpha * vt_over_v - phi).max());
    r.scale = std::max(r.scale, (w_over_v + alpha * abs(vt_over_v)).max() + phi);
  }
  r.max_residual = *std::max_element(r.residuals.begin(), r.residuals.end());
  r.tolerance = model.spatial(trajectory.geometry()->min_spacing(), r.scale);
  r.pass = r.max_residual <= r.tolerance;
  return r;
}

namespace {

double pressure_at(const Trajectory& traj, const SpaceTimePoint& p) {
  const Geometry& g = *traj.geometry();
  for (int a = 0; a < g.dim(); ++a)
    if (!(p.x[a] >= 0.0 && p.x[a] < g.period(a)))
      throw std::out_of_range("point outside the fundamental domain");
  std::vector<const SolverState*> states{&traj.initial};
  for (const auto& s : traj.samples) states.push_back(&s);
  if (!(p.t >= states.front()->t && p.t <= states.back()->t))
    throw std::invalid_argument("time outside the sampled range");
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    const SolverState& lo = *states[i];
    const SolverState& hi = *states[i + 1];
    if (p.t == lo.t) return interpolate(lo.v, p.x);
    if (p.t <= hi.t) {
      if (p.t == hi.t) return interpolate(hi.v, p.x);
      const double th = (p.t - lo.t) / (hi.t - lo.t);
      return (1.0 - th) * interpolate(lo.v, p.x) + th * interpolate(hi.v, p.x);
    }
  }
  return interpolate(states.back()->v, p.x);
}

}  // namespace

HarnackPairReport harnack_inequality_check(const Trajectory& trajectory, const SpaceTimePoint& p1,
                                           const SpaceTimePoint& p2,
                                           const HarnackCoefficients& coeffs,
                                           const ToleranceModel& model) {
  if (p1.t > p2.t) throw std::invalid_argument("Harnack pair needs t1 <= t2");
  require_positive_time(p1.t);
  const double v1 = pressure_at(trajectory, p1);
  const double v2 = pressure_at(trajectory, p2);
  const double v_max = trajectory.sup_v();
  const Geometry& g = *trajectory.geometry();
  const double d = geodesic_distance(p1.x, p2.x, g);

  double int_ratio = 0.0, int_alpha = 0.0;
  if (p2.t > p1.t) {
    int_ratio = adaptive_simpson([&](double t) { return coeffs.phi(t) / coeffs.alpha(t); }, p1.t, p2.t);
    int_alpha = adaptive_simpson([&](double t) { return coeffs.alpha(t); }, p1.t, p2.t);
  }
  double transport = 0.0;
  if (d > 0.0) {
    const double dt = p2.t - p1.t;
    transport = dt > 0.0 ? d * d / (4.0 * dt * dt) * int_alpha
                         : std::numeric_limits<double>::infinity();
  }

  HarnackPairReport out;
  out.difference_lhs = v1 - v2;
  out.difference_rhs = v_max * int_ratio + transport;
  out.difference_margin = out.difference_rhs - out.difference_lhs;
  out.ratio_lhs = std::log(v1 / v2);
  out.ratio_rhs = int_ratio + transport / v_max;
  out.ratio_margin = out.ratio_rhs - out.ratio_lhs;
  const double h = g.min_spacing();
  out.difference_tolerance = model.spatial(h, v_max);
  out.ratio_tolerance = model.spatial(h, 1.0);
  out.pass = out.difference_margin >= -out.difference_tolerance &&
             out.ratio_margin >= -out.ratio_tolerance;
  return out;
}

LaplacianEstimateReport laplacian_estimate_check(const SolverState& state,
                                                 const HarnackCoefficients& coeffs, double v_max,
                                                 const ToleranceModel& model) {
  require_positive_time(state.t);
  LaplacianEstimateReport out;
  out.t = state.t;
  out.alpha = coeffs.alpha(state.t);
  if (!(out.alpha > 1.0))
    throw std::invalid_argument("Laplacian estimate needs alpha(t) > 1");
  const double gamma = state.gamma;
  out.beta = 1.0 + (out.alpha - 1.0) / (out.alpha * (gamma - 1.0));
  out.applicable = out.beta > 1.0 && out.beta < gamma / (gamma - 1.0);
  if (!out.applicable) return out;
  const ScalarField lap = weighted_laplacian(pow(state.v, out.beta));
  out.min_laplacian = lap.min();
  out.bound = -out.beta / (out.alpha * (gamma - 1.0)) * std::pow(v_max, out.beta - 1.0) *
              coeffs.phi(state.t);
  out.tolerance =
      model.spatial(state.geometry()->min_spacing(), lap.max_abs() + std::abs(out.bound));
  out.pass = out.min_laplacian >= out.bound - out.tolerance;
  return out;
}

IdentityReport harnack_quantity_evolution_check(const Trajectory& trajectory,
                                                const HarnackCoefficients& coeffs,
                                                const ToleranceModel& model) {
  const auto& s = trajectory.samples;
  if (s.size() < 3) throw InsufficientSamples(3, s.size());
  const double gamma = trajectory.gamma();
  const double a = coeffs.a();
  const double r = coeffs.family().rate();

  std::vector<ScalarField> F, vt_over_v;
  for (const auto& st : s) {
    const ScalarField ratio = pressure_rate(st) / st.v;
    const ScalarField w_over_v = norm_squared(gradient(st.v)) / st.v;
    F.push_back(coeffs.alpha(st.t) * ratio - w_over_v + coeffs.phi(st.t));
    vt_over_v.push_back(ratio);
  }

  IdentityReport rep;
  rep.name = "harnack_quantity_evolution_" + coeffs.family().name();
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const auto c = detail::three_point(s[i - 1].t, s[i].t, s[i + 1].t);
    const double sig = coeffs.family().sigma(s[i].t);
    const double dsig = coeffs.family().dsigma(s[i].t);
    const ScalarField dG = c.first[0] * coeffs.family().sigma(s[i - 1].t) * F[i - 1] +
                           c.first[1] * sig * F[i] +
                           c.first[2] * coeffs.family().sigma(s[i + 1].t) * F[i + 1];
    const ScalarField lhs = dG - (gamma - 1.0) * s[i].v * weighted_laplacian(sig * F[i]);
    const ScalarField square =
        (gamma - 1.0) * weighted_laplacian(s[i].v) + (a * dsig / (2.0 * sig) + a * r);
    const ScalarField rhs = 2.0 * gamma * sig * dot(gradient(s[i].v), gradient(F[i])) +
                            (sig / a) * square * square +
                            (coeffs.alpha(s[i].t) - 1.0) * sig * vt_over_v[i] * vt_over_v[i];
    rep.times.push_back(s[i].t);
    rep.residuals.push_back((rhs - lhs).max());
    rep.scale = std::max(rep.scale, lhs.max_abs() + rhs.max_abs());
  }
  rep.max_residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
  rep.tolerance = model(trajectory.geometry()->min_spacing(), max_spacing(s), rep.scale);
  rep.pass = rep.max_residual <= rep.tolerance;
  return rep;
}

}  // namespace pmelab
