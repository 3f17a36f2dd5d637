#include "pmelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pmelab/csv.hpp"
#include "pmelab/error.hpp"

namespace pmelab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// A JSON value together with its dotted path, for error messages.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return value_; }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path_, message); }

  bool has(const std::string& key) const { return value_.contains(key); }
  Node at(const std::string& key) const {
    return Node(value_.at(key), path_.empty() ? key : path_ + "." + key);
  }
  Node index(std::size_t i) const {
    return Node(value_.at(i), path_ + "[" + std::to_string(i) + "]");
  }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = value_.begin(); it != value_.end(); ++it)
      if (!ok.count(it.key())) at(it.key()).fail("unknown key");
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double x = value_.get<double>();
    if (!std::isfinite(x)) fail("expected a finite number");
    return x;
  }
  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }
  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }
  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  // Accepts a scalar as a one-element list.
  std::vector<double> numbers() const {
    if (value_.is_number()) return {number()};
    if (!value_.is_array()) fail("expected a number or a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.push_back(index(i).number());
    return out;
  }
  std::vector<long long> integers() const {
    if (value_.is_number_integer()) return {integer()};
    if (!value_.is_array()) fail("expected an integer or a list of integers");
    std::vector<long long> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.push_back(index(i).integer());
    return out;
  }
  std::vector<std::string> strings() const {
    if (value_.is_string()) return {string()};
    if (!value_.is_array()) fail("expected a string or a list of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.push_back(index(i).string());
    return out;
  }

 private:
  const json& value_;
  std::string path_;
};

std::array<int, 3> wavenumber(const Node& n) {
  const auto k = n.integers();
  if (k.empty() || k.size() > 3) n.fail("expected one to three wavenumbers");
  std::array<int, 3> out{0, 0, 0};
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = static_cast<int>(k[i]);
  return out;
}

SmoothFunction analytic_field(const Node& n, const std::string& kind) {
  if (kind == "zero") {
    n.require_object({"kind"});
    return SmoothFunction::constant(0.0);
  }
  if (kind == "constant") {
    n.require_object({"kind", "value"});
    return SmoothFunction::constant(n.at("value").number());
  }
  if (kind == "sin") {
    n.require_object({"kind", "offset", "amplitude", "wavenumber", "phase"});
    const double offset = n.has("offset") ? n.at("offset").number() : 0.0;
    const double amp = n.has("amplitude") ? n.at("amplitude").number() : 1.0;
    const auto k = n.has("wavenumber") ? wavenumber(n.at("wavenumber")) : std::array<int, 3>{1, 0, 0};
    const double phase = n.has("phase") ? n.at("phase").number() : 0.0;
    return SmoothFunction::sine(offset, amp, k, phase);
  }
  if (kind == "fourier") {
    n.require_object({"kind", "offset", "modes"});
    const double offset = n.has("offset") ? n.at("offset").number() : 0.0;
    std::vector<FourierMode> modes;
    if (n.has("modes")) {
      const Node list = n.at("modes");
      if (!list.raw().is_array()) list.fail("expected a list of modes");
      for (std::size_t i = 0; i < list.raw().size(); ++i) {
        const Node m = list.index(i);
        m.require_object({"wavenumber", "amplitude", "phase"});
        modes.push_back({wavenumber(m.at("wavenumber")),
                         m.has("amplitude") ? m.at("amplitude").number() : 1.0,
                         m.has("phase") ? m.at("phase").number() : 0.0});
      }
    }
    return SmoothFunction(offset, std::move(modes));
  }
  n.at("kind").fail("unknown field kind '" + kind + "'");
}

WeightSource field_source(const Node& n, const fs::path& base_dir) {
  if (!n.raw().is_object()) n.fail("expected an object with a 'kind'");
  if (!n.has("kind")) n.fail("missing 'kind'");
  const std::string kind = n.at("kind").string();
  if (kind == "csv") {
    n.require_object({"kind", "path"});
    const Node p = n.at("path");
    fs::path file = p.string();
    if (file.is_relative()) file = base_dir / file;
    if (!fs::exists(file)) p.fail("file not found: " + file.string());
    try {
      return read_node_values(file.string());
    } catch (const std::exception& e) {
      p.fail(e.what());
    }
  }
  return analytic_field(n, kind);
}

std::vector<double> output_times(const Node& n, double t_end) {
  std::vector<double> times;
  if (n.raw().is_object()) {
    n.require_object({"start", "stop", "count", "spacing"});
    const double start = n.has("start") ? n.at("start").number() : t_end / 50.0;
    const double stop = n.has("stop") ? n.at("stop").number() : t_end;
    const long long count = n.has("count") ? n.at("count").integer() : 25;
    const std::string spacing = n.has("spacing") ? n.at("spacing").string() : "geometric";
    if (count < 1) n.at("count").fail("must be >= 1");
    if (!(start > 0.0) || !(stop >= start)) n.fail("need 0 < start <= stop");
    for (long long i = 0; i < count; ++i) {
      const double s = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      if (spacing == "geometric")
        times.push_back(start * std::pow(stop / start, s));
      else if (spacing == "uniform")
        times.push_back(start + (stop - start) * s);
      else
        n.at("spacing").fail("expected 'uniform' or 'geometric'");
    }
    times.back() = stop;
  } else {
    times = n.numbers();
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) n.fail("output times must be > 0");
    if (i > 0 && !(times[i] > times[i - 1])) n.fail("output times must be strictly increasing");
    if (times[i] > t_end) n.fail("output times must not exceed solver.t_end");
  }
  if (times.empty()) n.fail("no output times");
  return times;
}

void parse_geometry(const Node& n, TorusSpec& g, const fs::path& base_dir) {
  n.require_object({"dim", "points", "periods", "weight", "m"});
  if (n.has("dim")) g.dim = static_cast<int>(n.at("dim").integer());
  if (g.dim < 1 || g.dim > 3) n.at("dim").fail("must be 1, 2 or 3");
  g.points.clear();
  if (n.has("points")) {
    for (long long p : n.at("points").integers()) g.points.push_back(static_cast<int>(p));
  } else {
    g.points.assign(g.dim, 128);
  }
  if (g.points.size() == 1 && g.dim > 1) g.points.assign(g.dim, g.points[0]);
  if (static_cast<int>(g.points.size()) != g.dim) n.at("points").fail("need one entry per axis");
  for (int p : g.points)
    if (p < 8) n.at("points").fail("need at least 8 points per axis");
  g.periods = n.has("periods") ? n.at("periods").numbers() : std::vector<double>(g.dim, 1.0);
  if (g.periods.size() == 1 && g.dim > 1) g.periods.assign(g.dim, g.periods[0]);
  if (static_cast<int>(g.periods.size()) != g.dim) n.at("periods").fail("need one entry per axis");
  for (double p : g.periods)
    if (!(p > 0.0)) n.at("periods").fail("periods must be positive");
  if (n.has("weight")) g.weight = field_source(n.at("weight"), base_dir);
  if (n.has("m")) {
    g.m_param = n.at("m").number();
    if (*g.m_param < g.dim) n.at("m").fail("must be >= dim");
  }
}

}  // namespace

std::vector<double> read_node_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    double x;
    if (!(ss >> x)) {
      if (out.empty() && line_no == 1) continue;  // header
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number");
    }
    out.push_back(x);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir_str) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  const Node root(doc, "");
  root.require_object({"seed", "geometry", "solver", "entropy", "harnack", "warped", "output",
                       "tolerance"});
  const fs::path base_dir(base_dir_str);
  ExperimentConfig cfg;
  cfg.echo = doc.dump();

  if (root.has("seed")) {
    const long long s = root.at("seed").integer();
    if (s < 0) root.at("seed").fail("must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }

  cfg.geometry.dim = 1;
  cfg.geometry.points = {128};
  cfg.geometry.periods = {1.0};
  if (root.has("geometry")) parse_geometry(root.at("geometry"), cfg.geometry, base_dir);

  auto& s = cfg.solver;
  const json* times_json = nullptr;
  if (root.has("solver")) {
    const Node n = root.at("solver");
    n.require_object({"gamma", "initial", "scheme", "t_end", "output_times", "cfl_safety",
                      "u_floor_ratio", "solver_tol", "max_iters"});
    if (n.has("gamma")) s.gamma = n.at("gamma").number();
    if (!(s.gamma > 1.0)) n.at("gamma").fail("must be > 1");
    if (n.has("initial")) s.initial = field_source(n.at("initial"), base_dir);
    if (n.has("scheme")) {
      const std::string scheme = n.at("scheme").string();
      if (scheme == "explicit")
        s.run.scheme = Scheme::explicit_euler;
      else if (scheme == "semi_implicit")
        s.run.scheme = Scheme::semi_implicit;
      else
        n.at("scheme").fail("expected 'explicit' or 'semi_implicit'");
    }
    if (n.has("t_end")) s.t_end = n.at("t_end").number();
    if (!(s.t_end > 0.0)) n.at("t_end").fail("must be > 0");
    if (n.has("cfl_safety")) s.run.cfl_safety = n.at("cfl_safety").number();
    if (!(s.run.cfl_safety > 0.0)) n.at("cfl_safety").fail("must be > 0");
    if (n.has("u_floor_ratio")) s.run.u_floor_ratio = n.at("u_floor_ratio").number();
    if (!(s.run.u_floor_ratio >= 0.0)) n.at("u_floor_ratio").fail("must be >= 0");
    if (n.has("solver_tol")) s.run.solver_tol = n.at("solver_tol").number();
    if (!(s.run.solver_tol > 0.0)) n.at("solver_tol").fail("must be > 0");
    if (n.has("max_iters")) s.run.max_iters = static_cast<int>(n.at("max_iters").integer());
    if (s.run.max_iters < 1) n.at("max_iters").fail("must be >= 1");
    if (n.has("output_times")) times_json = &n.raw().at("output_times");
  }
  const json defaults = json::object();
  s.output_times = output_times(Node(times_json ? *times_json : defaults, "solver.output_times"), s.t_end);

  if (root.has("entropy")) {
    const Node n = root.at("entropy");
    n.require_object({"enable", "K"});
    if (n.has("enable")) cfg.entropy.enable = n.at("enable").boolean();
    if (n.has("K")) {
      cfg.entropy.K = n.at("K").number();
      if (!(*cfg.entropy.K >= 0.0)) n.at("K").fail("must be >= 0");
    }
  }

  if (root.has("harnack")) {
    const Node n = root.at("harnack");
    n.require_object({"enable", "families", "rates", "random_pairs", "pairs", "beta_times", "beta_rate"});
    auto& h = cfg.harnack;
    if (n.has("enable")) h.enable = n.at("enable").boolean();
    if (n.has("families")) {
      h.families.clear();
      for (const auto& f : n.at("families").strings()) {
        if (f == "power2")
          h.families.push_back(SigmaKind::power2);
        else if (f == "sinh2")
          h.families.push_back(SigmaKind::sinh2);
        else
          n.at("families").fail("unknown family '" + f + "'");
      }
    }
    if (n.has("rates")) {
      h.rates.clear();
      for (const auto& r : n.at("rates").strings()) {
        if (r == "proof")
          h.rates.push_back(RateConvention::proof);
        else if (r == "literal")
          h.rates.push_back(RateConvention::literal);
        else
          n.at("rates").fail("expected 'proof' or 'literal'");
      }
    }
    if (n.has("random_pairs")) h.random_pairs = static_cast<int>(n.at("random_pairs").integer());
    if (h.random_pairs < 0) n.at("random_pairs").fail("must be >= 0");
    if (n.has("pairs")) {
      const Node list = n.at("pairs");
      if (!list.raw().is_array()) list.fail("expected a list");
      for (std::size_t i = 0; i < list.raw().size(); ++i) {
        const Node p = list.index(i);
        p.require_object({"x1", "t1", "x2", "t2"});
        SpaceTimePoint a, b;
        const auto x1 = p.at("x1").numbers(), x2 = p.at("x2").numbers();
        if (static_cast<int>(x1.size()) != cfg.geometry.dim) p.at("x1").fail("need one coordinate per axis");
        if (static_cast<int>(x2.size()) != cfg.geometry.dim) p.at("x2").fail("need one coordinate per axis");
        std::copy(x1.begin(), x1.end(), a.x.begin());
        std::copy(x2.begin(), x2.end(), b.x.begin());
        a.t = p.at("t1").number();
        b.t = p.at("t2").number();
        if (!(a.t > 0.0) || a.t > b.t) p.fail("need 0 < t1 <= t2");
        h.pairs.emplace_back(a, b);
      }
    }
    if (n.has("beta_times")) h.beta_times = n.at("beta_times").numbers();
    for (double t : h.beta_times)
      if (!(t > 0.0)) n.at("beta_times").fail("times must be > 0");
    if (n.has("beta_rate")) h.beta_rate = n.at("beta_rate").number();
    if (!(h.beta_rate > 0.0)) n.at("beta_rate").fail("must be > 0");
  }

  if (root.has("warped")) {
    const Node n = root.at("warped");
    n.require_object({"enable", "test_function", "grids"});
    if (n.has("enable")) cfg.warped.enable = n.at("enable").boolean();
    if (n.has("test_function")) {
      const Node f = n.at("test_function");
      if (!f.raw().is_object() || !f.has("kind")) f.fail("expected an analytic field");
      cfg.warped.test_function = analytic_field(f, f.at("kind").string());
    }
    if (n.has("grids")) {
      cfg.warped.grids.clear();
      for (long long g : n.at("grids").integers()) {
        if (g < 8) n.at("grids").fail("grids need at least 8 points");
        cfg.warped.grids.push_back(static_cast<int>(g));
      }
    }
  }

  if (root.has("output")) {
    const Node n = root.at("output");
    n.require_object({"directory", "formats", "snapshots"});
    if (n.has("directory")) cfg.output.directory = n.at("directory").string();
    if (n.has("formats")) {
      cfg.output.csv = cfg.output.json = false;
      for (const auto& f : n.at("formats").strings()) {
        if (f == "csv")
          cfg.output.csv = true;
        else if (f == "json")
          cfg.output.json = true;
        else
          n.at("formats").fail("expected 'csv' or 'json'");
      }
    }
    if (n.has("snapshots")) cfg.output.snapshots = n.at("snapshots").boolean();
  }

  if (root.has("tolerance")) {
    const Node n = root.at("tolerance");
    n.require_object({"constant", "scale"});
    if (n.has("constant")) cfg.tolerance.constant = n.at("constant").number();
    if (!(cfg.tolerance.constant > 0.0)) n.at("constant").fail("must be > 0");
    if (n.has("scale")) cfg.tolerance.scale_factor = n.at("scale").number();
    if (!(cfg.tolerance.scale_factor > 0.0)) n.at("scale").fail("must be > 0");
  }

  // Laplacian estimates are evaluated on recorded states.
  for (double t : cfg.harnack.beta_times) {
    const auto& ot = cfg.solver.output_times;
    const bool found = std::any_of(ot.begin(), ot.end(),
                                   [t](double s) { return std::abs(s - t) <= 1e-12 * std::max(1.0, t); });
    if (!found) throw ConfigError("harnack.beta_times", "time " + format_real(t) + " is not an output time");
  }

  // Geometry-level consistency (m versus weight, sampled weight size) is
  // reported against the geometry block.
  try {
    build_torus(cfg.geometry);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("geometry", e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path dir = fs::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace pmelab
