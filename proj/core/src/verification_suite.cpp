#include "pmelab/verification_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "json.hpp"
#include "pmelab/csv.hpp"
#include "pmelab/entropy.hpp"
#include "pmelab/error.hpp"
#include "pmelab/harnack.hpp"
#include "pmelab/operators.hpp"
#include "pmelab/parallel.hpp"
#include "pmelab/random.hpp"
#include "pmelab/solver.hpp"
#include "pmelab/solver_checks.hpp"
#include "pmelab/warped.hpp"

namespace pmelab {
namespace {

using nlohmann::json;

std::string brief(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double rel_err(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

/// |lhs - rhs| / max(1, sum of |terms|).
double normalized(double residual, std::initializer_list<double> terms) {
  double s = 0.0;
  for (double t : terms) s += std::abs(t);
  return std::abs(residual) / std::max(1.0, s);
}

std::vector<double> geometric_times(double lo, double hi, int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  t.back() = hi;
  return t;
}

const SmoothFunction& sine_data() {
  static const SmoothFunction fn = SmoothFunction::sine(1.0, 0.5, {1, 0, 0}, 0.0);
  return fn;
}

const SmoothFunction& sine_weight() {
  static const SmoothFunction fn = SmoothFunction::sine(0.0, 0.2, {1, 0, 0}, 0.0);
  return fn;
}

GeometryPtr weighted_line(int points, double m) {
  TorusSpec spec;
  spec.dim = 1;
  spec.points = {points};
  spec.periods = {1.0};
  spec.weight = sine_weight();
  spec.m_param = m;
  return build_torus(spec);
}

Trajectory simulate_on(const GeometryPtr& g, double gamma, const std::vector<double>& times) {
  return run(g->sample(sine_data()), gamma, times.back(), times);
}

// Runs shared between criteria.
struct Runs {
  // Unweighted sine runs keyed by (gamma, points).
  std::map<std::pair<double, int>, Trajectory> entropy;
  std::optional<Trajectory> weighted;
  double weighted_K = 0.0, weighted_kappa = 0.0;
  std::optional<Trajectory> laplacian;
  std::vector<Trajectory> refinement;
};

const std::vector<double> kGammas{1.5, 2.0, 3.0};
const std::vector<int> kRefinementGrids{64, 128, 256};

struct RunJob {
  enum Kind { entropy, weighted, laplacian, refinement } kind;
  double gamma = 2.0;
  int points = 256;
};

Runs simulate_runs(bool need_entropy, bool need_weighted, bool need_laplacian, bool need_refinement) {
  std::vector<RunJob> jobs;
  if (need_entropy)
    for (double g : kGammas) {
      jobs.push_back({RunJob::entropy, g, 256});
      jobs.push_back({RunJob::entropy, g, 512});
    }
  if (need_weighted) jobs.push_back({RunJob::weighted, 2.0, 256});
  if (need_laplacian) jobs.push_back({RunJob::laplacian, 2.0, 256});
  if (need_refinement)
    for (int n : kRefinementGrids) jobs.push_back({RunJob::refinement, 2.0, n});
  // Longest runs first keeps the worker pool busy.
  std::stable_sort(jobs.begin(), jobs.end(), [](const RunJob& a, const RunJob& b) { return a.points > b.points; });

  auto trajectories = parallel_map(jobs.size(), [&](std::size_t j) {
    const RunJob& job = jobs[j];
    switch (job.kind) {
      case RunJob::entropy: {
        const int samples = job.points == 256 ? 25 : 49;
        return simulate_on(build_torus(1, {job.points}, {1.0}), job.gamma, geometric_times(0.01, 0.5, samples));
      }
      case RunJob::weighted:
        return simulate_on(weighted_line(job.points, 3.0), job.gamma, geometric_times(0.01, 0.5, 25));
      case RunJob::laplacian:
        return simulate_on(build_torus(1, {job.points}, {1.0}), job.gamma, {0.1, 0.5});
      case RunJob::refinement: {
        // Sampling interval tied to h, small enough that time differencing
        // stays below the spatial error of the fastest decaying mode.
        const double d = 1.0 / (64.0 * job.points);
        return simulate_on(build_torus(1, {job.points}, {1.0}), job.gamma, {0.02 - d, 0.02, 0.02 + d});
      }
    }
    throw std::logic_error("unknown run");
  });

  Runs runs;
  std::vector<std::pair<int, Trajectory>> refinement;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const RunJob& job = jobs[j];
    switch (job.kind) {
      case RunJob::entropy:
        runs.entropy.emplace(std::pair{job.gamma, job.points}, std::move(trajectories[j]));
        break;
      case RunJob::weighted:
        runs.weighted = std::move(trajectories[j]);
        break;
      case RunJob::laplacian:
        runs.laplacian = std::move(trajectories[j]);
        break;
      case RunJob::refinement:
        refinement.emplace_back(job.points, std::move(trajectories[j]));
        break;
    }
  }
  std::sort(refinement.begin(), refinement.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [n, t] : refinement) runs.refinement.push_back(std::move(t));
  if (runs.weighted) {
    runs.weighted_K = bakry_emery_lower_bound(*runs.weighted->geometry());
    runs.weighted_kappa = curvature_level(runs.weighted_K, runs.weighted->initial.u, 2.0);
  }
  return runs;
}

CriterionResult make_result(int id, std::string title, bool pass, std::string summary, const json& details) {
  return {id, std::move(title), pass, std::move(summary), details.dump()};
}

// 1. Closed forms of the schedules and Harnack coefficients.
CriterionResult schedule_closed_forms() {
  const double gamma = 2.0, n = 1.0;
  const double a = schedule_exponent(gamma, n);
  const std::vector<double> kappas{0.1, 0.4, 0.8, 1.2, 2.0};
  const std::vector<double> t_grid = geometric_times(0.01, 2.0, 10);
  double zero_err = 0.0, power2_err = 0.0, sinh2_err = 0.0, quad_err = 0.0, series_err = 0.0, phi_eta = 0.0;

  const CoefficientSchedule flat = make_schedule(gamma, n, 0.0);
  for (double t : geometric_times(0.01, 2.0, 50)) {
    const ScheduleValues s = schedule_eval(flat, t);
    const AlphaPhi ap = alpha_phi(SigmaFamily::power2(0.0), a, t);
    zero_err = std::max({zero_err, rel_err(s.sigma, std::pow(t, a)), rel_err(s.beta, t), rel_err(s.eta, a / t),
                         rel_err(ap.alpha, 1.0), rel_err(ap.phi, a / t)});
  }

  for (double k : kappas) {
    const SigmaFamily p2 = SigmaFamily::power2(k);
    const SigmaFamily s2 = SigmaFamily::sinh2(k);
    const SigmaFamily p2q = SigmaFamily::custom([](double t) { return t * t; }, [](double t) { return 2.0 * t; },
                                                k, 2.0);
    const SigmaFamily s2q = SigmaFamily::custom(
        [k](double t) { return std::pow(std::sinh(k * t), 2); },
        [k](double t) { return 2.0 * k * std::sinh(k * t) * std::cosh(k * t); }, k, 2.0);
    const CoefficientSchedule sched = make_schedule(gamma, n, k);
    for (double t : t_grid) {
      const double x = k * t;
      const AlphaPhi ap = alpha_phi(p2, a, t);
      power2_err = std::max({power2_err, rel_err(ap.alpha, 1.0 + 2.0 * x / 3.0),
                             rel_err(ap.phi, a / t + a * k * (1.0 + x / 3.0))});
      const AlphaPhi as = alpha_phi(s2, a, t);
      const double sh = std::sinh(x), ch = std::cosh(x);
      sinh2_err = std::max({sinh2_err, rel_err(as.alpha, 1.0 + (sh * ch - x) / (sh * sh)),
                            rel_err(as.phi, a * k * (1.0 + ch / sh))});
      const AlphaPhi apq = alpha_phi(p2q, a, t);
      const AlphaPhi asq = alpha_phi(s2q, a, t);
      quad_err = std::max({quad_err, rel_err(apq.alpha, ap.alpha), rel_err(apq.phi, ap.phi),
                           rel_err(asq.alpha, as.alpha), rel_err(asq.phi, as.phi)});
      phi_eta = std::max(phi_eta, rel_err(as.phi, schedule_eval(sched, t).eta));
    }
  }

  const double tiny = 1e-10;
  const CoefficientSchedule near = make_schedule(gamma, n, tiny);
  for (double t : t_grid) {
    const ScheduleValues s = schedule_eval(near, t), z = schedule_eval(flat, t);
    const AlphaPhi ref = alpha_phi(SigmaFamily::power2(0.0), a, t);
    const AlphaPhi p = alpha_phi(SigmaFamily::power2(tiny), a, t);
    const AlphaPhi q = alpha_phi(SigmaFamily::sinh2(tiny), a, t);
    series_err = std::max({series_err, rel_err(s.sigma, z.sigma), rel_err(s.beta, z.beta), rel_err(s.eta, z.eta),
                           rel_err(p.alpha, ref.alpha), rel_err(p.phi, ref.phi), rel_err(q.alpha, ref.alpha),
                           rel_err(q.phi, ref.phi)});
  }

  const bool pass = zero_err <= 1e-10 && power2_err <= 1e-10 && sinh2_err <= 1e-10 && quad_err <= 1e-10 &&
                    series_err <= 1e-8 && phi_eta <= 1e-12;
  json d{{"kappa_zero_rel_err", zero_err},     {"power2_rel_err", power2_err},
         {"sinh2_rel_err", sinh2_err},         {"quadrature_rel_err", quad_err},
         {"series_rel_err", series_err},       {"sinh2_phi_vs_eta_rel_err", phi_eta},
         {"closed_form_threshold", 1e-10},     {"series_threshold", 1e-8}};
  return make_result(1, "schedule and coefficient closed forms", pass,
                     "closed " + brief(std::max({zero_err, power2_err, sinh2_err})) + ", quadrature " +
                         brief(quad_err) + ", series " + brief(series_err) + ", phi=eta " + brief(phi_eta),
                     d);
}

// 2. Coefficient ODE systems at random (kappa, t).
CriterionResult ode_systems(std::uint64_t seed) {
  SplitMix64 rng(seed * 0x100000001b3ULL + 2);
  double ode = 0.0, beta_id = 0.0, first = 0.0, second = 0.0, quadratic = 0.0, sigma_forms = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double kappa = 2.0 * (1.0 - rng.uniform());
    const double t = 2.0 * (1.0 - rng.uniform());
    for (double gamma : kGammas) {
      for (int n = 1; n <= 3; ++n) {
        const double a = schedule_exponent(gamma, n);
        for (const SigmaFamily& f : {SigmaFamily::power2(gamma * kappa), SigmaFamily::sinh2(gamma * kappa)})
          ode = std::max(ode, ode_system_residual(f, a, gamma, t).max());

        const CoefficientSchedule sched = make_schedule(gamma, n, kappa);
        const ScheduleValues s = schedule_eval(sched, t);
        const double x = kappa * t;
        const double ratio = (1.0 + s.beta_dot) / s.beta;
        const double coth_term = 2.0 * kappa * std::cosh(x) / std::sinh(x);
        beta_id = std::max(beta_id, normalized(ratio - coth_term, {ratio, coth_term}));

        const double eta = s.eta, lambda = s.sigma_dot / s.sigma;
        const double dlambda = -a * kappa * kappa / std::pow(std::sinh(x), 2);
        const double c = 2.0 / (n * (gamma - 1.0));
        first = std::max(first, normalized(2 * eta - (lambda + ratio / 2 + kappa - c * eta),
                                           {2 * eta, lambda, ratio / 2, kappa, c * eta}));
        second = std::max(second, normalized(2 * eta * eta - (dlambda + lambda * lambda + ratio * lambda - c * eta * eta),
                                             {2 * eta * eta, dlambda, lambda * lambda, ratio * lambda, c * eta * eta}));
        const double rhs = (lambda * lambda + a * (dlambda - 2 * kappa * lambda)) / (a + 1);
        quadratic = std::max(quadratic, normalized((eta - lambda) * (eta - lambda) - rhs,
                                                   {lambda * lambda, a * dlambda, 2 * a * kappa * lambda}));
        const double other = std::pow(std::exp(x) * std::sinh(x) / kappa, a);
        sigma_forms = std::max(sigma_forms, rel_err(s.sigma, other));
      }
    }
  }
  const bool pass = ode <= 1e-9 && beta_id <= 1e-12 && first <= 1e-12 && second <= 1e-12 && quadratic <= 1e-12 &&
                    sigma_forms <= 1e-12;
  json d{{"ode_residual", ode},           {"beta_identity", beta_id},       {"eta_system_first", first},
         {"eta_system_second", second},   {"eta_quadratic", quadratic},     {"sigma_forms_rel_err", sigma_forms},
         {"ode_threshold", 1e-9},         {"identity_threshold", 1e-12}};
  return make_result(2, "coefficient ODE systems", pass,
                     "ode " + brief(ode) + ", beta identity " + brief(beta_id) + ", eta system " +
                         brief(std::max({first, second, quadratic})),
                     d);
}

// 3. Constant solutions on the unit 2-torus.
CriterionResult constant_solution() {
  const double c = 1.3, gamma = 2.0;
  const GeometryPtr g = build_torus(2, {16, 16}, {1.0, 1.0});
  const CoefficientSchedule sched = make_schedule(gamma, 2.0, 0.0);
  auto W = [&](double t) { return w_entropy(make_state(g->constant(c), gamma, t), sched); };
  double w_err = 0.0, d_err = 0.0, dw_err = 0.0;
  for (double t : {0.25, 1.0, 4.0}) {
    const double h = 1e-3 * t;
    const double dW = (-W(t + 2 * h) + 8 * W(t + h) - 8 * W(t - h) + W(t - 2 * h)) / (12 * h);
    const double D = dissipation(make_state(g->constant(c), gamma, t), sched, 0.0).total;
    w_err = std::max(w_err, rel_err(W(t), -3.0 * std::sqrt(t) * c * c));
    d_err = std::max(d_err, rel_err(D, 1.5 / std::sqrt(t) * c * c));
    dw_err = std::max(dw_err, rel_err(dW, -1.5 / std::sqrt(t) * c * c));
  }
  const bool pass = w_err <= 1e-10 && d_err <= 1e-10 && dw_err <= 1e-10;
  json d{{"W_rel_err", w_err}, {"D_rel_err", d_err}, {"dWdt_rel_err", dw_err}, {"threshold", 1e-10}};
  return make_result(3, "constant-solution entropy", pass,
                     "W " + brief(w_err) + ", D " + brief(d_err) + ", dW/dt " + brief(dw_err), d);
}

json entropy_json(const EntropyReport& r) {
  return {{"max_dWdt", number(r.max_dWdt)},
          {"max_excess", number(r.max_excess)},
          {"max_equality_residual", number(r.max_equality_residual)},
          {"max_identity_residual", number(r.max_identity_residual)},
          {"tolerance", number(r.tolerance)},
          {"equality", r.equality},
          {"kappa_dominates", r.kappa_dominates},
          {"pass", r.pass}};
}

// 4. Unweighted entropy monotonicity and equality under refinement.
CriterionResult entropy_monotonicity(const Runs& runs, const ToleranceModel& model) {
  bool pass = true;
  json d = json::array();
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (double gamma : kGammas) {
    const CoefficientSchedule sched = make_schedule(gamma, 1.0, 0.0);
    const EntropyReport coarse = monotonicity_report(runs.entropy.at({gamma, 256}), sched, 0.0, model);
    const EntropyReport fine = monotonicity_report(runs.entropy.at({gamma, 512}), sched, 0.0, model);
    const double ratio = coarse.max_equality_residual / fine.max_equality_residual;
    worst_ratio = std::min(worst_ratio, ratio);
    const bool ok = coarse.pass && fine.pass && ratio >= 3.0;
    pass = pass && ok;
    d.push_back({{"gamma", gamma}, {"coarse", entropy_json(coarse)}, {"fine", entropy_json(fine)},
                 {"residual_ratio", number(ratio)}, {"pass", ok}});
  }
  return make_result(4, "entropy monotonicity", pass, "worst refinement ratio " + brief(worst_ratio),
                     json{{"runs", d}, {"min_ratio", 3.0}});
}

// 5. Weighted entropy monotonicity.
CriterionResult weighted_entropy(const Runs& runs, const ToleranceModel& model) {
  const CoefficientSchedule sched = make_schedule(2.0, 3.0, runs.weighted_kappa);
  const EntropyReport r = monotonicity_report(*runs.weighted, sched, runs.weighted_K, model);
  json d = entropy_json(r);
  d["K"] = runs.weighted_K;
  d["kappa"] = runs.weighted_kappa;
  return make_result(5, "weighted entropy monotonicity", r.pass,
                     "K " + brief(runs.weighted_K) + ", max dW/dt + D " + brief(r.max_excess) + ", tol " +
                         brief(r.tolerance),
                     d);
}

json identity_json(const IdentityReport& r) {
  return {{"name", r.name},
          {"max_residual", number(r.max_residual)},
          {"tolerance", number(r.tolerance)},
          {"pass", r.pass}};
}

// 6. Differential Harnack estimate.
CriterionResult harnack_estimate(const Runs& runs, const ToleranceModel& model) {
  bool pass = true;
  json unweighted = json::array();
  for (double gamma : kGammas) {
    const HarnackCoefficients coeffs(SigmaFamily::power2(0.0), schedule_exponent(gamma, 1.0));
    for (int points : {256, 512}) {
      const IdentityReport r = harnack_estimate_check(runs.entropy.at({gamma, points}), coeffs, model);
      pass = pass && r.pass;
      json e = identity_json(r);
      e["gamma"] = gamma;
      e["points"] = points;
      unweighted.push_back(e);
    }
  }
  json weighted = json::array();
  const double a = schedule_exponent(2.0, 3.0);
  const double kappa = runs.weighted_kappa;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [label, rate] : {std::pair{"proof", 2.0 * kappa}, std::pair{"literal", kappa}}) {
    for (const SigmaFamily& f : {SigmaFamily::power2(rate), SigmaFamily::sinh2(rate)}) {
      const HarnackCoefficients coeffs(f, a);
      const IdentityReport r = harnack_estimate_check(*runs.weighted, coeffs, model);
      const IdentityReport evo = harnack_quantity_evolution_check(*runs.weighted, coeffs, model);
      pass = pass && r.pass;
      worst = std::max(worst, r.max_residual - r.tolerance);
      json e = identity_json(r);
      e["family"] = f.name();
      e["rate_convention"] = label;
      e["rate"] = rate;
      e["evolution_inequality"] = identity_json(evo);
      weighted.push_back(e);
    }
  }
  return make_result(6, "differential Harnack estimate", pass,
                     "weighted worst (residual - tol) " + brief(worst),
                     json{{"unweighted", unweighted}, {"weighted", weighted}});
}

// 7. Integrated Harnack inequalities on random pairs.
CriterionResult harnack_pairs(const Runs& runs, const ToleranceModel& model, std::uint64_t seed) {
  SplitMix64 rng(seed * 0x100000001b3ULL + 7);
  struct Case {
    std::string label;
    const Trajectory* traj;
    HarnackCoefficients coeffs;
  };
  const double kw = runs.weighted_kappa;
  std::vector<Case> cases{
      {"unweighted power2", &runs.entropy.at({2.0, 256}),
       HarnackCoefficients(SigmaFamily::power2(0.0), schedule_exponent(2.0, 1.0))},
      {"weighted power2", &*runs.weighted, HarnackCoefficients(SigmaFamily::power2(2.0 * kw), schedule_exponent(2.0, 3.0))},
      {"weighted sinh2", &*runs.weighted, HarnackCoefficients(SigmaFamily::sinh2(2.0 * kw), schedule_exponent(2.0, 3.0))},
  };
  bool pass = true;
  json d = json::array();
  double worst_diff = std::numeric_limits<double>::infinity(), worst_ratio = worst_diff;
  for (const auto& c : cases) {
    const double lo = c.traj->samples.front().t, hi = c.traj->samples.back().t;
    int passed = 0;
    double wd = std::numeric_limits<double>::infinity(), wr = wd;
    for (int k = 0; k < 100; ++k) {
      SpaceTimePoint p1, p2;
      p1.x[0] = rng.uniform();
      p2.x[0] = rng.uniform();
      double s1 = rng.uniform(lo, hi), s2 = rng.uniform(lo, hi);
      if (s1 > s2) std::swap(s1, s2);
      p1.t = s1;
      p2.t = s2;
      const HarnackPairReport r = harnack_inequality_check(*c.traj, p1, p2, c.coeffs, model);
      passed += r.pass ? 1 : 0;
      wd = std::min(wd, r.difference_margin);
      wr = std::min(wr, r.ratio_margin);
    }
    pass = pass && passed == 100;
    worst_diff = std::min(worst_diff, wd);
    worst_ratio = std::min(worst_ratio, wr);
    d.push_back({{"case", c.label}, {"passed", passed}, {"pairs", 100},
                 {"worst_difference_margin", number(wd)}, {"worst_ratio_margin", number(wr)}});
  }
  return make_result(7, "integrated Harnack inequalities", pass,
                     "worst margins: difference " + brief(worst_diff) + ", ratio " + brief(worst_ratio), d);
}

// 8. Laplacian lower bound from the Harnack estimate.
CriterionResult laplacian_bound(const Runs& runs, const ToleranceModel& model) {
  const Trajectory& traj = *runs.laplacian;
  const HarnackCoefficients coeffs(SigmaFamily::power2(1.0), schedule_exponent(2.0, 1.0));
  bool pass = true;
  json d = json::array();
  std::string summary;
  for (const auto& s : traj.samples) {
    const LaplacianEstimateReport r = laplacian_estimate_check(s, coeffs, traj.sup_v(), model);
    const bool ok = r.pass && r.applicable && r.beta > 1.0 && r.beta < 2.0;
    pass = pass && ok;
    d.push_back({{"t", r.t}, {"alpha", r.alpha}, {"beta", r.beta}, {"min_laplacian", number(r.min_laplacian)},
                 {"bound", number(r.bound)}, {"tolerance", number(r.tolerance)}, {"pass", ok}});
    summary += (summary.empty() ? "" : ", ") + std::string("t=") + brief(r.t) + ": min " + brief(r.min_laplacian) +
               " >= " + brief(r.bound);
  }
  return make_result(8, "Laplacian estimate", pass, summary, d);
}

// Max residual over the times of `coarse_times` (matched to 1e-12).
double max_at(const IdentityReport& r, const std::vector<double>& coarse_times) {
  double m = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i)
    for (double t : coarse_times)
      if (std::abs(r.times[i] - t) <= 1e-12) m = std::max(m, std::abs(r.residuals[i]));
  return m;
}

// 9. Discretization oracles under refinement.
CriterionResult refinement_oracles(const Runs& runs, const ToleranceModel& model) {
  std::vector<IdentityReport> pressure, first, second;
  bool pass = true;
  json evolution = json::array();
  std::map<std::string, double> worst_ratio;
  for (std::size_t g = 0; g < runs.refinement.size(); ++g) {
    const Trajectory& traj = runs.refinement[g];
    pressure.push_back(pressure_equation_check(traj, model));
    const IntegralIdentityReport integral = integral_identity_check(traj, model);
    first.push_back(integral.first_derivative);
    second.push_back(integral.second_derivative);
    for (const auto& [which, p, label] :
         {std::tuple{EvolutionIdentity::power_beta, 1.0, "power_beta_1"},
          std::tuple{EvolutionIdentity::power_beta, 2.0, "power_beta_2"}, std::tuple{EvolutionIdentity::w, 1.0, "w"}}) {
      const IdentityReport r = evolution_identity_check(traj, which, p, model);
      pass = pass && r.pass;
      double& ratio = worst_ratio[label];
      ratio = std::max(ratio, r.max_residual / r.tolerance);
      json e = identity_json(r);
      e["identity"] = label;
      e["points"] = kRefinementGrids[g];
      evolution.push_back(e);
    }
  }
  const std::vector<double>& coarse = pressure.front().times;
  json orders_json = json::object();
  double worst_order = std::numeric_limits<double>::infinity();
  for (const auto& [label, reports] :
       {std::pair{"pressure_equation", &pressure}, std::pair{"integral_first", &first}, std::pair{"integral_second", &second}}) {
    std::vector<double> errors;
    for (const auto& r : *reports) errors.push_back(max_at(r, coarse));
    const auto orders = convergence_orders(errors);
    for (double p : orders) worst_order = std::min(worst_order, p);
    const bool ok = std::all_of(orders.begin(), orders.end(), [](double p) { return p >= 1.8; });
    pass = pass && ok;
    json errs = json::array(), ords = json::array();
    for (double e : errors) errs.push_back(number(e));
    for (double p : orders) ords.push_back(number(p));
    orders_json[label] = {{"errors", errs}, {"orders", ords}, {"pass", ok}};
  }
  std::string summary = "worst order " + brief(worst_order) + "; residual/tol";
  for (const auto& [label, ratio] : worst_ratio) summary += " " + label + " " + brief(ratio);
  return make_result(9, "identity oracles under refinement", pass, summary,
                     json{{"grids", kRefinementGrids}, {"refinement", orders_json}, {"evolution", evolution},
                          {"min_order", 1.8}});
}

// 10. Warped-product identities.
CriterionResult warped_identities(std::uint64_t seed) {
  const SmoothFunction v_fn = SmoothFunction::sine(0.0, 1.0, {1, 0, 0}, 0.0);
  double closed = 0.0;
  std::vector<double> christoffel_err, ricci_err;
  double volume_err = 0.0;
  for (int n : kRefinementGrids) {
    const GeometryPtr g = weighted_line(n, 2.0);
    const WarpedGeometry w(g);
    const ScalarField v = g->sample(v_fn);
    closed = std::max({closed, hessian_components_check(w, v).max(), warped_laplacian_check(w, v),
                       hessian_norm_decomposition_check(w, v, 1.0, 2.0)});
    christoffel_err.push_back(christoffel_agreement(w).analytic.value());
    ricci_err.push_back(ricci_lift_check(w).analytic.value());
    volume_err = std::max(volume_err, std::abs(w.volume() - 1.0100250277951460));
  }

  // Randomized decomposition: smooth f and v on a 2-torus, random (eta, gamma, m).
  SplitMix64 rng(seed * 0x100000001b3ULL + 10);
  auto random_fn = [&rng](double scale) {
    std::vector<FourierMode> modes;
    for (int k = 0; k < 3; ++k)
      modes.push_back({{static_cast<int>(rng.next() % 3), static_cast<int>(rng.next() % 3) - 1, 0},
                       scale * rng.uniform(-1.0, 1.0), rng.uniform(0.0, 6.283185307179586)});
    return SmoothFunction(rng.uniform(-0.5, 0.5), std::move(modes));
  };
  double randomized = 0.0;
  for (int k = 0; k < 20; ++k) {
    TorusSpec spec;
    spec.dim = 2;
    spec.points = {32, 32};
    spec.periods = {1.0, 1.0};
    spec.weight = random_fn(0.3);
    spec.m_param = 2.0 + 1.0 + static_cast<double>(rng.next() % 3);
    const GeometryPtr g = build_torus(spec);
    const WarpedGeometry w(g);
    const ScalarField v = g->sample(random_fn(1.0));
    const double eta = rng.uniform(0.1, 3.0), gamma = rng.uniform(1.2, 4.0);
    randomized = std::max(randomized, hessian_norm_decomposition_check(w, v, eta, gamma));
  }

  const auto christoffel_orders = convergence_orders(christoffel_err);
  const auto ricci_orders = convergence_orders(ricci_err);
  auto min_of = [](const std::vector<double>& x) { return *std::min_element(x.begin(), x.end()); };
  const double worst_order = std::min(min_of(christoffel_orders), min_of(ricci_orders));
  const bool pass = closed <= 1e-12 && randomized <= 1e-12 && volume_err <= 1e-12 && worst_order >= 1.8;
  json d{{"closed_form_max_residual", closed},
         {"randomized_decomposition_max_residual", randomized},
         {"volume_abs_err", volume_err},
         {"christoffel_errors", christoffel_err},
         {"christoffel_orders", christoffel_orders},
         {"ricci_errors", ricci_err},
         {"ricci_orders", ricci_orders},
         {"closed_threshold", 1e-12},
         {"min_order", 1.8}};
  return make_result(10, "warped-product identities", pass,
                     "closed " + brief(std::max(closed, randomized)) + ", worst order " + brief(worst_order), d);
}

}  // namespace

std::vector<CriterionResult> run_verification_suite(const SuiteOptions& options) {
  auto wanted = [&](int id) {
    return options.criteria.empty() ||
           std::find(options.criteria.begin(), options.criteria.end(), id) != options.criteria.end();
  };
  const Runs runs = simulate_runs(wanted(4) || wanted(6) || wanted(7), wanted(5) || wanted(6) || wanted(7),
                                  wanted(8), wanted(9));
  const ToleranceModel& model = options.tolerance;
  std::vector<std::function<CriterionResult()>> tasks;
  if (wanted(1)) tasks.emplace_back([] { return schedule_closed_forms(); });
  if (wanted(2)) tasks.emplace_back([&] { return ode_systems(options.seed); });
  if (wanted(3)) tasks.emplace_back([] { return constant_solution(); });
  if (wanted(4)) tasks.emplace_back([&] { return entropy_monotonicity(runs, model); });
  if (wanted(5)) tasks.emplace_back([&] { return weighted_entropy(runs, model); });
  if (wanted(6)) tasks.emplace_back([&] { return harnack_estimate(runs, model); });
  if (wanted(7)) tasks.emplace_back([&] { return harnack_pairs(runs, model, options.seed); });
  if (wanted(8)) tasks.emplace_back([&] { return laplacian_bound(runs, model); });
  if (wanted(9)) tasks.emplace_back([&] { return refinement_oracles(runs, model); });
  if (wanted(10)) tasks.emplace_back([&] { return warped_identities(options.seed); });
  return parallel_map(tasks.size(), [&](std::size_t i) { return tasks[i](); });
}

void write_suite_reports(const std::vector<CriterionResult>& results, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  {
    std::ofstream out(fs::path(directory) / "criteria.csv", std::ios::binary);
    if (!out) throw Error("cannot write criteria.csv in " + directory);
    CsvWriter csv(out);
    csv.header({"id", "title", "pass", "summary"});
    for (const auto& r : results) csv.row({static_cast<long long>(r.id), r.title, r.pass, r.summary});
  }
  json doc;
  json list = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    list.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary},
                    {"details", json::parse(r.details_json)}});
  }
  doc["criteria"] = list;
  doc["pass"] = all;
  std::ofstream out(fs::path(directory) / "suite.json", std::ios::binary);
  if (!out) throw Error("cannot write suite.json in " + directory);
  out << doc.dump(2) << '\n';
}

}  // namespace pmelab
