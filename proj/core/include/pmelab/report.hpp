#pragma once

#include <string>
#include <vector>

namespace pmelab {

/// tol = constant * scale_factor * (h^2 + dt_s^2) * scale, where h is the grid
/// spacing, dt_s the largest sample spacing involved and scale the magnitude of
/// the quantities being compared.
struct ToleranceModel {
  double constant = 10.0;
  /// Multiplier exposed on the command line as --tolerance-scale.
  double scale_factor = 1.0;

  double operator()(double h, double dt_sample, double scale) const {
    return constant * scale_factor * (h * h + dt_sample * dt_sample) * scale;
  }
  /// Spatial-only variant for pointwise checks that involve no time differencing.
  double spatial(double h, double scale) const { return constant * scale_factor * h * h * scale; }
};

/// Per-time residuals of one identity or inequality along a trajectory.
struct IdentityReport {
  std::string name;
  std::vector<double> times;
  /// Max-norm residual at each time (a signed violation for inequalities).
  std::vector<double> residuals;
  double max_residual = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

}  // namespace pmelab
