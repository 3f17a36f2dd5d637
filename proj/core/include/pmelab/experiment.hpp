#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pmelab/config.hpp"
#include "pmelab/entropy.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

/// A simulated trajectory together with the constants derived from it.
struct ExperimentRun {
  Trajectory trajectory;
  /// Curvature bound: the configured override or bakry_emery_lower_bound.
  double K = 0.0;
  /// K * max u0^{gamma-1}.
  double kappa = 0.0;
  CoefficientSchedule schedule;
};

/// Builds the geometry and initial data and integrates. Throws ConfigError for
/// initial data that do not match the grid or are not positive.
ExperimentRun prepare_run(const ExperimentConfig& config);

/// Outcome of one command: aggregate pass flag and human-readable lines.
struct CommandResult {
  bool pass = true;
  std::vector<std::string> lines;
  /// Files written, relative to the output directory, in write order.
  std::vector<std::string> files;
};

/// trajectory.csv (t,mass,min_u,max_u,sup_v), manifest.json and, when enabled,
/// snapshots.csv. Every command below simulates inline and writes the manifest.
CommandResult simulate(const ExperimentConfig& config);

/// entropy.csv and entropy.json from monotonicity_report.
CommandResult entropy_report(const ExperimentConfig& config);

/// Harnack residuals, point-pair inequalities and Laplacian estimates for
/// every configured family and rate convention: harnack.csv, harnack_pairs.csv,
/// laplacian.csv and harnack.json.
CommandResult harnack_check(const ExperimentConfig& config);

/// Warped-product identities on every configured grid: warped.json.
/// Needs a weighted geometry with integer m - n >= 1.
CommandResult warped_verify(const ExperimentConfig& config);

struct ScheduleRow {
  double t = 0.0;
  double a = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double alpha = 1.0;
  double phi = 0.0;
};

/// Entropy weights and Harnack coefficients at the given times; the Harnack
/// family uses rate r = kappa. sinh2 needs kappa > 0.
std::vector<ScheduleRow> schedule_table(double gamma, double dim_param, double kappa,
                                        SigmaKind family, const std::vector<double>& times);

/// Columns t,a,sigma,beta,eta,alpha,phi.
void write_schedule_csv(std::ostream& out, const std::vector<ScheduleRow>& rows);

/// Library version string.
const char* version();

}  // namespace pmelab
