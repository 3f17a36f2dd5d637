#include "pmelab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "pmelab/csv.hpp"
#include "pmelab/error.hpp"
#include "pmelab/harnack.hpp"
#include "pmelab/operators.hpp"
#include "pmelab/parallel.hpp"
#include "pmelab/random.hpp"
#include "pmelab/warped.hpp"

#ifndef PMELAB_VERSION
#define PMELAB_VERSION "0.0.0"
#endif

namespace pmelab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class OutputDir {
 public:
  explicit OutputDir(const ExperimentConfig& cfg) : root_(cfg.output.directory) {
    fs::create_directories(root_);
  }

  std::ofstream open(const std::string& name, CommandResult& result) {
    std::ofstream out(root_ / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (root_ / name).string());
    result.files.push_back(name);
    return out;
  }

  void write_json(const std::string& name, const json& doc, CommandResult& result) {
    auto out = open(name, result);
    out << doc.dump(2) << '\n';
  }

 private:
  fs::path root_;
};

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string rate_name(RateConvention r) { return r == RateConvention::proof ? "proof" : "literal"; }

void write_manifest(OutputDir& dir, const ExperimentConfig& cfg, const ExperimentRun& run,
                    const std::string& command, CommandResult& result) {
  json doc;
  doc["version"] = version();
  doc["command"] = command;
  doc["seed"] = cfg.seed;
  doc["config"] = cfg.echo.empty() ? json::object() : json::parse(cfg.echo);
  doc["derived"] = {{"K", number(run.K)},
                    {"kappa", number(run.kappa)},
                    {"a", number(run.schedule.a)},
                    {"dim_param", number(run.schedule.dim_param)},
                    {"gamma", number(run.schedule.gamma)}};
  doc["tolerance"] = {{"constant", cfg.tolerance.constant}, {"scale", cfg.tolerance.scale_factor}};
  std::vector<std::string> files = result.files;
  files.push_back("manifest.json");
  doc["files"] = files;
  dir.write_json("manifest.json", doc, result);
}

std::string pass_word(bool pass) { return pass ? "PASS" : "FAIL"; }

const SolverState& state_at(const Trajectory& traj, double t) {
  for (const auto& s : traj.samples)
    if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, t)) return s;
  throw std::invalid_argument("no sample at t = " + format_real(t));
}

}  // namespace

const char* version() { return PMELAB_VERSION; }

ExperimentRun prepare_run(const ExperimentConfig& cfg) {
  const GeometryPtr g = build_torus(cfg.geometry);
  ScalarField u0;
  if (const auto* fn = std::get_if<SmoothFunction>(&cfg.solver.initial)) {
    u0 = g->sample(*fn);
  } else {
    const auto& values = std::get<std::vector<double>>(cfg.solver.initial);
    if (values.size() != g->size())
      throw ConfigError("solver.initial", "expected " + std::to_string(g->size()) + " node values, got " +
                                              std::to_string(values.size()));
    u0 = ScalarField(g, values);
  }
  if (!(u0.min() > 0.0)) throw ConfigError("solver.initial", "initial density must be positive");

  ExperimentRun out;
  out.K = cfg.entropy.K ? *cfg.entropy.K : bakry_emery_lower_bound(*g);
  out.kappa = curvature_level(out.K, u0, cfg.solver.gamma);
  out.schedule = make_schedule(cfg.solver.gamma, g->m_param(), out.kappa);
  out.trajectory = run(u0, cfg.solver.gamma, cfg.solver.t_end, cfg.solver.output_times, cfg.solver.run);
  return out;
}

CommandResult simulate(const ExperimentConfig& cfg) {
  CommandResult result;
  const ExperimentRun run = prepare_run(cfg);
  OutputDir dir(cfg);
  const Trajectory& traj = run.trajectory;
  {
    auto out = dir.open("trajectory.csv", result);
    CsvWriter csv(out);
    csv.header({"t", "mass", "min_u", "max_u", "sup_v"});
    auto emit = [&](const SolverState& s) {
      const SampleDiagnostics d = diagnose(s);
      csv.row({s.t, d.mass, d.min_u, d.max_u, d.sup_v});
    };
    emit(traj.initial);
    for (const auto& s : traj.samples) emit(s);
  }
  if (cfg.output.snapshots) {
    auto out = dir.open("snapshots.csv", result);
    CsvWriter csv(out);
    const Geometry& g = *traj.geometry();
    static constexpr std::string_view axes[] = {"x0", "x1", "x2"};
    std::vector<std::string> names{"t", "index"};
    for (int a = 0; a < g.dim(); ++a) names.emplace_back(axes[a]);
    names.emplace_back("u");
    names.emplace_back("v");
    std::vector<CsvWriter::Cell> head(names.begin(), names.end());
    csv.row(head);
    auto emit = [&](const SolverState& s) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<CsvWriter::Cell> row{s.t, static_cast<long long>(i)};
        const Point x = g.node(i);
        for (int a = 0; a < g.dim(); ++a) row.emplace_back(x[a]);
        row.emplace_back(s.u[i]);
        row.emplace_back(s.v[i]);
        csv.row(row);
      }
    };
    emit(traj.initial);
    for (const auto& s : traj.samples) emit(s);
  }
  write_manifest(dir, cfg, run, "simulate", result);
  const auto& last = traj.diagnostics.back();
  result.lines.push_back("simulated " + std::to_string(traj.size()) + " samples to t = " +
                         format_real(traj.samples.back().t) + ", mass " + format_real(last.mass));
  return result;
}

CommandResult entropy_report(const ExperimentConfig& cfg) {
  CommandResult result;
  if (!cfg.entropy.enable) {
    result.lines.push_back("entropy checks disabled");
    return result;
  }
  const ExperimentRun run = prepare_run(cfg);
  const EntropyReport report = monotonicity_report(run.trajectory, run.schedule, run.K, cfg.tolerance);
  OutputDir dir(cfg);
  if (cfg.output.csv) {
    auto out = dir.open("entropy.csv", result);
    write_entropy_csv(out, report);
  }
  if (cfg.output.json) {
    json doc;
    doc["K"] = number(run.K);
    doc["kappa"] = number(run.kappa);
    doc["a"] = number(run.schedule.a);
    doc["dim_param"] = number(run.schedule.dim_param);
    doc["equality"] = report.equality;
    doc["scale"] = number(report.scale);
    doc["tolerance"] = number(report.tolerance);
    doc["max_dWdt"] = number(report.max_dWdt);
    doc["max_excess"] = number(report.max_excess);
    doc["max_equality_residual"] = number(report.max_equality_residual);
    doc["max_identity_residual"] = number(report.max_identity_residual);
    doc["kappa_dominates"] = report.kappa_dominates;
    doc["samples_checked"] = report.rows.size();
    doc["pass"] = report.pass;
    dir.write_json("entropy.json", doc, result);
  }
  write_manifest(dir, cfg, run, "entropy-report", result);
  result.pass = report.pass;
  result.lines.push_back(pass_word(report.pass) + " entropy monotonicity: max dW/dt " +
                         format_real(report.max_dWdt) + ", max dW/dt + D " + format_real(report.max_excess) +
                         ", tol " + format_real(report.tolerance));
  return result;
}

namespace {

struct FamilyOutcome {
  std::string family;
  RateConvention convention = RateConvention::proof;
  double rate = 0.0;
  IdentityReport estimate;
  std::optional<IdentityReport> evolution;
  std::vector<HarnackPairReport> pairs;
  bool pass = true;
};

std::vector<std::pair<SpaceTimePoint, SpaceTimePoint>> harnack_pairs(const ExperimentConfig& cfg,
                                                                     const Trajectory& traj) {
  auto pairs = cfg.harnack.pairs;
  SplitMix64 rng(cfg.seed);
  const Geometry& g = *traj.geometry();
  const double t_lo = traj.samples.front().t, t_hi = traj.samples.back().t;
  for (int k = 0; k < cfg.harnack.random_pairs; ++k) {
    SpaceTimePoint p1, p2;
    for (int a = 0; a < g.dim(); ++a) {
      p1.x[a] = rng.uniform(0.0, g.period(a));
      p2.x[a] = rng.uniform(0.0, g.period(a));
    }
    double s1 = rng.uniform(t_lo, t_hi), s2 = rng.uniform(t_lo, t_hi);
    if (s1 > s2) std::swap(s1, s2);
    p1.t = s1;
    p2.t = s2;
    if (p2.t > p1.t) pairs.emplace_back(p1, p2);
  }
  return pairs;
}

}  // namespace

CommandResult harnack_check(const ExperimentConfig& cfg) {
  CommandResult result;
  if (!cfg.harnack.enable) {
    result.lines.push_back("harnack checks disabled");
    return result;
  }
  const ExperimentRun run = prepare_run(cfg);
  const Trajectory& traj = run.trajectory;
  const double a = run.schedule.a;
  const double gamma = cfg.solver.gamma;

  struct Job {
    SigmaKind kind;
    RateConvention convention;
    double rate;
  };
  std::vector<Job> jobs;
  std::set<std::pair<int, double>> seen;
  for (SigmaKind kind : cfg.harnack.families) {
    for (RateConvention conv : cfg.harnack.rates) {
      const double r = conv == RateConvention::proof ? gamma * run.kappa : run.kappa;
      if (kind == SigmaKind::sinh2 && !(r > 0.0)) {
        result.lines.push_back("skipped sinh2 with " + rate_name(conv) + " rate: needs kappa > 0");
        continue;
      }
      if (!seen.insert({static_cast<int>(kind), r}).second) continue;
      jobs.push_back({kind, conv, r});
    }
  }

  const auto pairs = harnack_pairs(cfg, traj);
  const auto outcomes = parallel_map(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const SigmaFamily family =
        job.kind == SigmaKind::power2 ? SigmaFamily::power2(job.rate) : SigmaFamily::sinh2(job.rate);
    const HarnackCoefficients coeffs(family, a);
    FamilyOutcome out;
    out.family = family.name();
    out.convention = job.convention;
    out.rate = job.rate;
    out.estimate = harnack_estimate_check(traj, coeffs, cfg.tolerance);
    out.pass = out.estimate.pass;
    if (traj.size() >= 3) {
      out.evolution = harnack_quantity_evolution_check(traj, coeffs, cfg.tolerance);
      out.pass = out.pass && out.evolution->pass;
    }
    for (const auto& [p1, p2] : pairs) {
      out.pairs.push_back(harnack_inequality_check(traj, p1, p2, coeffs, cfg.tolerance));
      out.pass = out.pass && out.pairs.back().pass;
    }
    return out;
  });

  std::vector<LaplacianEstimateReport> laplacian;
  if (!cfg.harnack.beta_times.empty()) {
    const HarnackCoefficients coeffs(SigmaFamily::power2(cfg.harnack.beta_rate), a);
    const double v_max = traj.sup_v();
    for (double t : cfg.harnack.beta_times)
      laplacian.push_back(laplacian_estimate_check(state_at(traj, t), coeffs, v_max, cfg.tolerance));
  }

  OutputDir dir(cfg);
  if (cfg.output.csv) {
    {
      auto out = dir.open("harnack.csv", result);
      CsvWriter csv(out);
      csv.header({"family", "rate_convention", "rate", "t", "max_residual", "tolerance", "pass"});
      for (const auto& o : outcomes)
        for (std::size_t k = 0; k < o.estimate.times.size(); ++k)
          csv.row({o.family, rate_name(o.convention), o.rate, o.estimate.times[k], o.estimate.residuals[k],
                   o.estimate.tolerance, o.estimate.residuals[k] <= o.estimate.tolerance});
    }
    {
      auto out = dir.open("harnack_pairs.csv", result);
      CsvWriter csv(out);
      csv.header({"family", "rate_convention", "pair", "x1", "t1", "x2", "t2", "difference_lhs",
                  "difference_rhs", "difference_margin", "ratio_lhs", "ratio_rhs", "ratio_margin", "pass"});
      const int dim = traj.geometry()->dim();
      auto coords = [dim](const Point& x) {
        std::string s;
        for (int a = 0; a < dim; ++a) s += (a ? " " : "") + format_real(x[a]);
        return s;
      };
      for (const auto& o : outcomes)
        for (std::size_t k = 0; k < o.pairs.size(); ++k) {
          const auto& p = o.pairs[k];
          csv.row({o.family, rate_name(o.convention), static_cast<long long>(k), coords(pairs[k].first.x),
                   pairs[k].first.t, coords(pairs[k].second.x), pairs[k].second.t, p.difference_lhs,
                   p.difference_rhs, p.difference_margin, p.ratio_lhs, p.ratio_rhs, p.ratio_margin, p.pass});
        }
    }
    if (!laplacian.empty()) {
      auto out = dir.open("laplacian.csv", result);
      CsvWriter csv(out);
      csv.header({"t", "alpha", "beta", "applicable", "min_laplacian", "bound", "tolerance", "pass"});
      for (const auto& l : laplacian)
        csv.row({l.t, l.alpha, l.beta, l.applicable, l.min_laplacian, l.bound, l.tolerance, l.pass});
    }
  }

  bool pass = true;
  json families = json::array();
  for (const auto& o : outcomes) {
    pass = pass && o.pass;
    double worst_difference = std::numeric_limits<double>::infinity();
    double worst_ratio = std::numeric_limits<double>::infinity();
    std::size_t passed = 0;
    for (const auto& p : o.pairs) {
      worst_difference = std::min(worst_difference, p.difference_margin);
      worst_ratio = std::min(worst_ratio, p.ratio_margin);
      passed += p.pass ? 1 : 0;
    }
    json entry;
    entry["family"] = o.family;
    entry["rate_convention"] = rate_name(o.convention);
    entry["rate"] = number(o.rate);
    entry["estimate"] = {{"max_residual", number(o.estimate.max_residual)},
                         {"tolerance", number(o.estimate.tolerance)},
                         {"pass", o.estimate.pass}};
    if (o.evolution)
      entry["evolution"] = {{"max_violation", number(o.evolution->max_residual)},
                            {"tolerance", number(o.evolution->tolerance)},
                            {"pass", o.evolution->pass}};
    entry["pairs"] = {{"count", o.pairs.size()},
                      {"passed", passed},
                      {"worst_difference_margin", number(o.pairs.empty() ? 0.0 : worst_difference)},
                      {"worst_ratio_margin", number(o.pairs.empty() ? 0.0 : worst_ratio)}};
    entry["pass"] = o.pass;
    families.push_back(entry);
    result.lines.push_back(pass_word(o.pass) + " harnack " + o.family + " (" + rate_name(o.convention) +
                           " rate " + format_real(o.rate) + "): max residual " +
                           format_real(o.estimate.max_residual) + ", pairs " + std::to_string(passed) + "/" +
                           std::to_string(o.pairs.size()));
  }
  json lap = json::array();
  for (const auto& l : laplacian) {
    pass = pass && l.pass;
    lap.push_back({{"t", l.t}, {"alpha", l.alpha}, {"beta", l.beta}, {"applicable", l.applicable},
                   {"min_laplacian", number(l.min_laplacian)}, {"bound", number(l.bound)},
                   {"tolerance", number(l.tolerance)}, {"pass", l.pass}});
    result.lines.push_back(pass_word(l.pass) + " laplacian estimate at t = " + format_real(l.t) + ": min " +
                           format_real(l.min_laplacian) + " vs bound " + format_real(l.bound));
  }
  if (cfg.output.json) {
    json doc;
    doc["kappa"] = number(run.kappa);
    doc["K"] = number(run.K);
    doc["a"] = number(a);
    doc["families"] = families;
    doc["laplacian_estimates"] = lap;
    doc["pass"] = pass;
    dir.write_json("harnack.json", doc, result);
  }
  write_manifest(dir, cfg, run, "harnack-check", result);
  result.pass = pass;
  return result;
}

CommandResult warped_verify(const ExperimentConfig& cfg) {
  CommandResult result;
  if (!cfg.warped.enable) {
    result.lines.push_back("warped checks disabled");
    return result;
  }
  if (!cfg.geometry.weight || !std::holds_alternative<SmoothFunction>(*cfg.geometry.weight))
    throw ConfigError("geometry.weight", "warped verification needs an analytic weight");
  const double closed_threshold = 1e-12;
  const double min_order = 1.8;

  struct GridResult {
    ComponentResiduals components, fd_components;
    double laplacian = 0.0, decomposition = 0.0;
    double christoffel = 0.0, ricci = 0.0;
    double volume = 0.0, weighted_volume = 0.0;
  };
  const auto& grids = cfg.warped.grids;
  const auto per_grid = parallel_map(grids.size(), [&](std::size_t k) {
    TorusSpec spec = cfg.geometry;
    spec.points.assign(spec.dim, grids[k]);
    const GeometryPtr g = build_torus(spec);
    WarpedGeometry warped(g);
    const ScalarField v = g->sample(cfg.warped.test_function);
    GridResult r;
    r.components = hessian_components_check(warped, v);
    r.fd_components = hessian_components_check(warped, v, ChristoffelMode::finite_difference);
    r.laplacian = warped_laplacian_check(warped, v);
    r.decomposition = hessian_norm_decomposition_check(warped, v, 1.0, cfg.solver.gamma);
    r.christoffel = christoffel_agreement(warped).analytic.value_or(0.0);
    r.ricci = ricci_lift_check(warped).analytic.value_or(0.0);
    r.volume = warped.volume();
    r.weighted_volume = integrate(ScalarField(g, std::vector<double>(g->density().begin(), g->density().end())));
    return r;
  });

  std::vector<double> components, laplacian, decomposition, fd_components, christoffel_err, ricci_err, volume;
  for (const auto& r : per_grid) {
    components.push_back(r.components.max());
    laplacian.push_back(r.laplacian);
    decomposition.push_back(r.decomposition);
    fd_components.push_back(r.fd_components.max());
    christoffel_err.push_back(r.christoffel);
    ricci_err.push_back(r.ricci);
    volume.push_back(std::abs(r.volume - r.weighted_volume));
  }
  auto max_of = [](const std::vector<double>& x) { return *std::max_element(x.begin(), x.end()); };
  auto orders_ok = [&](const std::vector<double>& o) {
    return std::all_of(o.begin(), o.end(), [&](double p) { return p >= min_order; });
  };

  bool pass = true;
  json doc;
  doc["fiber_dim"] = static_cast<int>(std::lround(build_torus(cfg.geometry)->m_param())) - cfg.geometry.dim;
  doc["grids"] = grids;
  json closed = json::object();
  for (const auto& [name, values] : {std::pair{"hessian_components", components},
                                     std::pair{"laplacian", laplacian},
                                     std::pair{"norm_decomposition", decomposition},
                                     std::pair{"volume", volume}}) {
    const bool ok = max_of(values) <= closed_threshold;
    pass = pass && ok;
    json vals = json::array();
    for (double x : values) vals.push_back(number(x));
    closed[name] = {{"max_residual", vals}, {"threshold", closed_threshold}, {"pass", ok}};
    result.lines.push_back(pass_word(ok) + " warped " + name + ": max residual " + format_real(max_of(values)));
  }
  doc["closed_form"] = closed;
  json refined = json::object();
  for (const auto& [name, values] : {std::pair{"hessian_components_fd", fd_components},
                                     std::pair{"christoffel_fd", christoffel_err},
                                     std::pair{"ricci_lift", ricci_err}}) {
    const auto orders = convergence_orders(values);
    const bool ok = orders_ok(orders);
    pass = pass && ok;
    json vals = json::array(), ords = json::array();
    for (double x : values) vals.push_back(number(x));
    for (double x : orders) ords.push_back(number(x));
    refined[name] = {{"errors", vals}, {"orders", ords}, {"min_order", min_order}, {"pass", ok}};
    std::string line = pass_word(ok) + " warped " + name + " orders:";
    for (double p : orders) line += " " + format_real(p);
    result.lines.push_back(line);
  }
  doc["refinement"] = refined;
  doc["pass"] = pass;
  OutputDir dir(cfg);
  dir.write_json("warped.json", doc, result);
  result.pass = pass;
  return result;
}

std::vector<ScheduleRow> schedule_table(double gamma, double dim_param, double kappa, SigmaKind family,
                                        const std::vector<double>& times) {
  const CoefficientSchedule sched = make_schedule(gamma, dim_param, kappa);
  if (family == SigmaKind::custom) throw std::invalid_argument("schedule_table: named families only");
  const SigmaFamily fam = family == SigmaKind::power2 ? SigmaFamily::power2(kappa) : SigmaFamily::sinh2(kappa);
  std::vector<ScheduleRow> rows;
  for (double t : times) {
    const ScheduleValues s = schedule_eval(sched, t);
    const AlphaPhi ap = alpha_phi(fam, sched.a, t);
    rows.push_back({t, sched.a, s.sigma, s.beta, s.eta, ap.alpha, ap.phi});
  }
  return rows;
}

void write_schedule_csv(std::ostream& out, const std::vector<ScheduleRow>& rows) {
  CsvWriter csv(out);
  csv.header({"t", "a", "sigma", "beta", "eta", "alpha", "phi"});
  for (const auto& r : rows) csv.row({r.t, r.a, r.sigma, r.beta, r.eta, r.alpha, r.phi});
}

}  // namespace pmelab
