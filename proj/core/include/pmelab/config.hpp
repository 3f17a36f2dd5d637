#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmelab/geometry.hpp"
#include "pmelab/harnack.hpp"
#include "pmelab/report.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

/// How the Harnack rate r is derived from kappa = K * max u0^{gamma-1}.
enum class RateConvention {
  proof,    ///< r = gamma * kappa, the rate the maximum-principle argument needs
  literal,  ///< r = kappa, the rate written in the closed-form coefficients
};

/// Parsed experiment description. Every field has a default, so `{}` is a
/// valid (small, unweighted, one-dimensional) experiment.
struct ExperimentConfig {
  TorusSpec geometry;

  struct Solver {
    double gamma = 2.0;
    WeightSource initial = SmoothFunction::sine(1.0, 0.5, {1, 0, 0}, 0.0);
    RunOptions run;
    double t_end = 0.5;
    std::vector<double> output_times;
  } solver;

  struct Entropy {
    bool enable = true;
    /// Replaces the curvature bound computed from the weight.
    std::optional<double> K;
  } entropy;

  struct Harnack {
    bool enable = true;
    std::vector<SigmaKind> families{SigmaKind::power2, SigmaKind::sinh2};
    std::vector<RateConvention> rates{RateConvention::proof};
    /// Number of seeded random point pairs for the integrated inequalities.
    int random_pairs = 100;
    std::vector<std::pair<SpaceTimePoint, SpaceTimePoint>> pairs;
    std::vector<double> beta_times;
    /// Rate of the power2 family used by the Laplacian estimate.
    double beta_rate = 1.0;
  } harnack;

  struct Warped {
    bool enable = false;
    SmoothFunction test_function = SmoothFunction::sine(0.0, 1.0, {1, 0, 0}, 0.0);
    std::vector<int> grids{64, 128, 256};
  } warped;

  struct Output {
    std::string directory = "pme_lab_out";
    bool csv = true;
    bool json = true;
    bool snapshots = false;
  } output;

  std::uint64_t seed = 1;
  ToleranceModel tolerance;

  /// Canonical JSON of the input document, echoed into run manifests.
  std::string echo;
};

/// Parses and validates a JSON document. Relative CSV paths resolve against
/// `base_dir`. Throws ConfigError naming the dotted path of the offending key.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");

/// Reads and parses a file; CSV paths resolve against the file's directory.
ExperimentConfig load_config(const std::string& path);

/// Reads one value per line (blank lines and a non-numeric header line skipped).
std::vector<double> read_node_values(const std::string& path);

}  // namespace pmelab
