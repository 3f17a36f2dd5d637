#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pmelab/config.hpp"
#include "pmelab/csv.hpp"
#include "pmelab/error.hpp"
#include "pmelab/experiment.hpp"
#include "pmelab/harnack.hpp"
#include "test_support.hpp"

namespace pmelab {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pmelab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_key(const std::string& json, const std::string& base = ".") {
  try {
    parse_config(json, base);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

TEST(Config, EmptyDocumentIsValid) {
  auto cfg = parse_config("{}");
  EXPECT_EQ(cfg.geometry.dim, 1);
  EXPECT_DOUBLE_EQ(cfg.solver.gamma, 2.0);
  EXPECT_FALSE(cfg.solver.output_times.empty());
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_DOUBLE_EQ(cfg.tolerance.constant, 10.0);
}

TEST(Config, GammaOneNamesTheKey) {
  EXPECT_EQ(error_key(R"({"solver": {"gamma": 1}})"), "solver.gamma");
  EXPECT_EQ(error_key(R"({"solver": {"gamma": 0.5}})"), "solver.gamma");
}

TEST(Config, ErrorsNameTheirKeys) {
  EXPECT_EQ(error_key(R"({"bogus": 1})"), "bogus");
  EXPECT_EQ(error_key(R"({"geometry": {"dim": 4}})"), "geometry.dim");
  EXPECT_EQ(error_key(R"({"geometry": {"points": 4}})"), "geometry.points");
  EXPECT_EQ(error_key(R"({"geometry": {"periods": [-1]}})"), "geometry.periods");
  EXPECT_EQ(error_key(R"({"solver": {"scheme": "rk4"}})"), "solver.scheme");
  EXPECT_EQ(error_key(R"({"solver": {"output_times": [0.2, 0.1]}})"), "solver.output_times");
  EXPECT_EQ(error_key(R"({"solver": {"t_end": 1, "output_times": [0.5, 2]}})"), "solver.output_times");
  EXPECT_EQ(error_key(R"({"entropy": {"K": -1}})"), "entropy.K");
  EXPECT_EQ(error_key(R"({"harnack": {"families": ["cubic"]}})"), "harnack.families");
  EXPECT_EQ(error_key(R"({"harnack": {"beta_times": [0.123]}})"), "harnack.beta_times");
  EXPECT_EQ(error_key(R"({"geometry": {"weight": {"kind": "csv", "path": "missing.csv"}}})"),
            "geometry.weight.path");
  EXPECT_EQ(error_key(R"({"solver": {"gamma": "two"}})"), "solver.gamma");
  EXPECT_EQ(error_key("{not json"), "<document>");
}

TEST(Config, MWithoutRoomIsAGeometryError) {
  auto key = error_key(R"({"geometry": {"weight": {"kind": "sin", "amplitude": 0.2}, "m": 1}})");
  EXPECT_EQ(key.rfind("geometry", 0), 0u) << key;
}

TEST(Config, FullDocument) {
  auto cfg = parse_config(R"({
    "seed": 42,
    "geometry": {"dim": 2, "points": 32, "periods": [1, 2],
                 "weight": {"kind": "fourier", "offset": 0.1,
                            "modes": [{"wavenumber": [1, 1], "amplitude": 0.2, "phase": 0.5}]},
                 "m": 3.5},
    "solver": {"gamma": 1.5, "initial": {"kind": "sin", "offset": 2, "amplitude": 0.3},
               "scheme": "semi_implicit", "t_end": 0.2,
               "output_times": {"start": 0.02, "count": 10, "spacing": "uniform"}},
    "entropy": {"K": 0.5},
    "harnack": {"families": "sinh2", "rates": ["proof", "literal"], "random_pairs": 3,
                "pairs": [{"x1": [0.1, 0.2], "t1": 0.02, "x2": [0.5, 1.5], "t2": 0.2}],
                "beta_times": [0.2]},
    "warped": {"enable": false},
    "output": {"directory": "o", "formats": ["csv"], "snapshots": true},
    "tolerance": {"constant": 20, "scale": 2}
  })");
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.geometry.points, (std::vector<int>{32, 32}));
  EXPECT_EQ(cfg.geometry.periods, (std::vector<double>{1.0, 2.0}));
  EXPECT_DOUBLE_EQ(*cfg.geometry.m_param, 3.5);
  EXPECT_EQ(cfg.solver.run.scheme, Scheme::semi_implicit);
  ASSERT_EQ(cfg.solver.output_times.size(), 10u);
  EXPECT_NEAR(cfg.solver.output_times.front(), 0.02, 1e-15);
  EXPECT_NEAR(cfg.solver.output_times.back(), 0.2, 1e-15);
  EXPECT_NEAR(cfg.solver.output_times[1] - cfg.solver.output_times[0], 0.02, 1e-15);
  EXPECT_DOUBLE_EQ(*cfg.entropy.K, 0.5);
  EXPECT_EQ(cfg.harnack.families, (std::vector<SigmaKind>{SigmaKind::sinh2}));
  EXPECT_EQ(cfg.harnack.rates.size(), 2u);
  ASSERT_EQ(cfg.harnack.pairs.size(), 1u);
  EXPECT_DOUBLE_EQ(cfg.harnack.pairs[0].second.x[1], 1.5);
  EXPECT_TRUE(cfg.output.csv);
  EXPECT_FALSE(cfg.output.json);
  EXPECT_TRUE(cfg.output.snapshots);
  EXPECT_DOUBLE_EQ(cfg.tolerance.constant, 20.0);
  EXPECT_DOUBLE_EQ(cfg.tolerance.scale_factor, 2.0);
}

TEST(Config, CsvSourcesResolveAgainstTheConfigFile) {
  auto dir = scratch_dir("csv");
  {
    std::ofstream w(dir / "f.csv");
    w << "f\n";
    for (int i = 0; i < 16; ++i) w << 0.1 * std::sin(2 * testing::pi * i / 16.0) << "\n\n";
  }
  {
    std::ofstream c(dir / "cfg.json");
    c << R"({"geometry": {"points": 16, "weight": {"kind": "csv", "path": "f.csv"}, "m": 2},
             "solver": {"t_end": 0.01, "output_times": [0.005, 0.01]}})";
  }
  EXPECT_EQ(read_node_values((dir / "f.csv").string()).size(), 16u);
  auto cfg = load_config((dir / "cfg.json").string());
  ASSERT_TRUE(cfg.geometry.weight.has_value());
  EXPECT_EQ(std::get<std::vector<double>>(*cfg.geometry.weight).size(), 16u);
  auto runinfo = prepare_run(cfg);
  EXPECT_GT(runinfo.K, 0.0);
}

TEST(Experiment, SimulateWritesTrajectoryCsv) {
  auto dir = scratch_dir("simulate");
  auto cfg = parse_config(R"({"geometry": {"points": 32}, "solver": {"t_end": 0.05, "output_times": [0.01, 0.05]}})");
  cfg.output.directory = (dir / "a").string();
  auto r = simulate(cfg);
  EXPECT_TRUE(r.pass);
  const std::string csv = slurp(dir / "a" / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,mass,min_u,max_u,sup_v");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);  // header, t = 0, two samples
  const std::string manifest = slurp(dir / "a" / "manifest.json");
  EXPECT_NE(manifest.find("\"kappa\""), std::string::npos);
  EXPECT_NE(manifest.find(version()), std::string::npos);
}

TEST(Experiment, SimulateIsDeterministic) {
  auto dir = scratch_dir("determinism");
  auto cfg = parse_config(R"({"geometry": {"points": 32}, "solver": {"t_end": 0.05},
                              "output": {"snapshots": true}})");
  for (const char* sub : {"a", "b"}) {
    cfg.output.directory = (dir / sub).string();
    simulate(cfg);
  }
  for (const char* file : {"trajectory.csv", "snapshots.csv", "manifest.json"})
    EXPECT_EQ(slurp(dir / "a" / file), slurp(dir / "b" / file)) << file;
}

TEST(Experiment, HarnackCheckOnConstantData) {
  auto dir = scratch_dir("harnack_const");
  auto cfg = parse_config(R"({"geometry": {"points": 16},
      "solver": {"initial": {"kind": "constant", "value": 1.5}, "t_end": 1, "output_times": [0.25, 0.5, 1]},
      "entropy": {"K": 1}, "harnack": {"random_pairs": 5}})");
  cfg.output.directory = dir.string();
  auto r = harnack_check(cfg);
  EXPECT_TRUE(r.pass);
  std::istringstream csv(slurp(dir / "harnack.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "family,rate_convention,rate,t,max_residual,tolerance,pass");
  int rows = 0;
  const double a = schedule_exponent(2.0, 1.0);
  const double kappa = std::pow(1.5, 1.0);
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 7u);
    const double rate = std::stod(cells[2]), t = std::stod(cells[3]), res = std::stod(cells[4]);
    auto fam = cells[0] == "power2" ? SigmaFamily::power2(rate) : SigmaFamily::sinh2(rate);
    EXPECT_DOUBLE_EQ(rate, 2.0 * kappa);
    EXPECT_DOUBLE_EQ(res, -alpha_phi(fam, a, t).phi);
    EXPECT_EQ(cells[6], "true");
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST(Experiment, EntropyReportMonotone) {
  auto dir = scratch_dir("entropy");
  auto cfg = parse_config(R"({"geometry": {"points": 128}, "solver": {"t_end": 0.5,
      "output_times": {"start": 0.01, "stop": 0.5, "count": 25}}, "entropy": {"K": 0}})");
  cfg.output.directory = dir.string();
  auto r = entropy_report(cfg);
  EXPECT_TRUE(r.pass);
  std::istringstream csv(slurp(dir / "entropy.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,N,W,dWdt,D_total,D_hessian,D_ricci,D_trace,D_weighted_extra,pass");
  int rows = 0;
  while (std::getline(csv, line)) {
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "true");
    ++rows;
  }
  EXPECT_EQ(rows, 23);
}

TEST(Experiment, WarpedVerifyNeedsAnalyticWeight) {
  auto dir = scratch_dir("warped");
  auto cfg = parse_config(R"({"geometry": {"points": 64, "weight": {"kind": "sin", "amplitude": 0.2}, "m": 2},
      "solver": {"t_end": 0.01, "output_times": [0.01]}, "warped": {"enable": true, "grids": [64, 128, 256]}})");
  cfg.output.directory = dir.string();
  auto r = warped_verify(cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(fs::exists(dir / "warped.json"));
}

TEST(Experiment, ScheduleTableFlatRow) {
  auto rows = schedule_table(2.0, 2.0, 0.0, SigmaKind::power2, {1.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].t, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].a, 0.5);
  EXPECT_DOUBLE_EQ(rows[0].sigma, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].beta, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].eta, 0.5);
  EXPECT_DOUBLE_EQ(rows[0].alpha, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].phi, 0.5);
  std::ostringstream out;
  write_schedule_csv(out, rows);
  EXPECT_EQ(out.str(), "t,a,sigma,beta,eta,alpha,phi\n1,0.5,1,1,0.5,1,0.5\n");
  EXPECT_THROW(schedule_table(2.0, 2.0, 0.0, SigmaKind::sinh2, {1.0}), std::invalid_argument);
}

TEST(Csv, QuotingAndPrecision) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  std::ostringstream out;
  CsvWriter w(out);
  w.header({"x", "flag", "name"});
  w.row({1.5, true, std::string("p,q")});
  EXPECT_EQ(out.str(), "x,flag,name\n1.5,true,\"p,q\"\n");
}

}  // namespace
}  // namespace pmelab
