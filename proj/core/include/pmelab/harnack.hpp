#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pmelab/report.hpp"
#include "pmelab/smooth_function.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

enum class SigmaKind { power2, sinh2, custom };

/// Time weight sigma(t) together with the curvature rate r that enters the
/// Harnack coefficients
///   alpha(t) = 1 + (2r/sigma) int_0^t sigma,
///   phi(t)   = r a + (r^2 a / sigma) int_0^t sigma + (a / (4 sigma)) int_0^t sigma'^2 / sigma.
/// For a solution with Ric_f^m >= -K the admissible rate is
/// r = gamma * K * sup u^{gamma-1}.
class SigmaFamily {
 public:
  using Fn = std::function<double(double)>;

  /// sigma = t^2.
  static SigmaFamily power2(double rate);
  /// sigma = sinh^2(r t); needs r > 0.
  static SigmaFamily sinh2(double rate);
  /// User supplied sigma and sigma'. Checks positivity and monotonicity on
  /// (0, horizon], sigma -> 0 and sigma/sigma' -> 0 as t -> 0, and
  /// integrability of sigma'^2/sigma near 0; throws std::invalid_argument otherwise.
  static SigmaFamily custom(Fn sigma, Fn dsigma, double rate, double horizon);
  /// Cubic Hermite interpolation of tabulated sigma and sigma' on knots that
  /// start at t = 0; validated like custom().
  static SigmaFamily tabulated(std::vector<double> knots, std::vector<double> sigma,
                               std::vector<double> dsigma, double rate);

  SigmaKind kind() const noexcept { return kind_; }
  double rate() const noexcept { return rate_; }
  /// Largest time at which the family may be evaluated.
  double horizon() const noexcept { return horizon_; }
  std::string name() const;

  double sigma(double t) const;
  double dsigma(double t) const;

 private:
  SigmaFamily() = default;
  void validate() const;

  SigmaKind kind_ = SigmaKind::power2;
  double rate_ = 0.0;
  double horizon_ = std::numeric_limits<double>::infinity();
  Fn sigma_, dsigma_;
};

struct AlphaPhi {
  double alpha = 1.0;
  double phi = 0.0;
};

/// Closed forms for the named families, adaptive Simpson quadrature
/// (relative tolerance 1e-10, depth 40) for custom ones. Throws for t <= 0.
AlphaPhi alpha_phi(const SigmaFamily& family, double a, double t);

/// alpha'(t), phi'(t): closed forms for named families, five-point stencils otherwise.
AlphaPhi alpha_phi_derivative(const SigmaFamily& family, double a, double t);

/// The coefficient pair used by the Harnack checks.
class HarnackCoefficients {
 public:
  HarnackCoefficients(SigmaFamily family, double a) : family_(std::move(family)), a_(a) {}

  const SigmaFamily& family() const noexcept { return family_; }
  double a() const noexcept { return a_; }
  double alpha(double t) const { return alpha_phi(family_, a_, t).alpha; }
  double phi(double t) const { return phi_scale_ * alpha_phi(family_, a_, t).phi; }
  double phi_scale() const noexcept { return phi_scale_; }

  /// Copy with phi multiplied by `factor`; used to probe check sensitivity.
  HarnackCoefficients with_phi_scale(double factor) const;

 private:
  SigmaFamily family_;
  double a_;
  double phi_scale_ = 1.0;
};

/// Residuals of the coefficient system with E = (gamma-1) eta / a:
///   sigma'/sigma = 2E - 2r,  alpha (2r - 2E) = alpha' - 2E,
///   (gamma-1)^2 eta^2 / a = phi' - (2r - 2E) phi,
/// and of its integrated form (sigma alpha)' = sigma' + 2 r sigma,
/// (sigma phi)' = (a sigma / 4)(sigma'/sigma + 2r)^2. Each residual is divided
/// by max(1, sum of the magnitudes of its terms).
struct OdeResidual {
  double sigma_equation = 0.0;
  double alpha_equation = 0.0;
  double phi_equation = 0.0;
  double integrated_alpha = 0.0;
  double integrated_phi = 0.0;
  double max() const;
};

OdeResidual ode_system_residual(const SigmaFamily& family, double a, double gamma, double t);

/// R = |grad v|^2 / v - alpha(t) v_t / v - phi(t) with v_t taken from the
/// pressure equation. Throws std::invalid_argument for non-positive v or t <= 0.
ScalarField harnack_residual(const SolverState& state, const HarnackCoefficients& coeffs);

/// max R at every sample against tol = model.spatial(h, scale), scale the
/// largest of |grad v|^2/v + alpha |v_t/v| + phi over nodes and samples.
IdentityReport harnack_estimate_check(const Trajectory& trajectory,
                                      const HarnackCoefficients& coeffs,
                                      const ToleranceModel& model = {});

struct SpaceTimePoint {
  Point x{0.0, 0.0, 0.0};
  double t = 0.0;
};

/// Both integrated inequalities for one pair of space-time points:
///   v1 - v2 <= v_max int phi/alpha + d^2 / (4 (t2-t1)^2) int alpha,
///   log(v1/v2) <= int phi/alpha + d^2 / (4 v_max (t2-t1)^2) int alpha,
/// integrals over [t1, t2], v_max the largest pressure along the trajectory.
/// Margins are RHS - LHS.
struct HarnackPairReport {
  double difference_lhs = 0.0, difference_rhs = 0.0, difference_margin = 0.0;
  double ratio_lhs = 0.0, ratio_rhs = 0.0, ratio_margin = 0.0;
  double difference_tolerance = 0.0, ratio_tolerance = 0.0;
  bool pass = true;
};

/// Values between samples are interpolated linearly in time and multilinearly
/// in space. Throws std::invalid_argument when t1 > t2 or a time lies outside
/// the sampled range, std::out_of_range for points outside the fundamental domain.
HarnackPairReport harnack_inequality_check(const Trajectory& trajectory, const SpaceTimePoint& p1,
                                           const SpaceTimePoint& p2,
                                           const HarnackCoefficients& coeffs,
                                           const ToleranceModel& model = {});

/// Lower bound on Delta_f(v^b) with b from (alpha-1)/alpha = (gamma-1)(b-1).
struct LaplacianEstimateReport {
  double t = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  /// False when b falls outside (1, gamma/(gamma-1)); the check is then vacuous.
  bool applicable = true;
  double min_laplacian = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// Throws std::invalid_argument when alpha(t) <= 1, where b is undefined.
LaplacianEstimateReport laplacian_estimate_check(const SolverState& state,
                                                 const HarnackCoefficients& coeffs, double v_max,
                                                 const ToleranceModel& model = {});

/// Evolution inequality of the Harnack quantity F = alpha v_t/v - |grad v|^2/v + phi:
///   box(sigma F) >= 2 gamma sigma <grad v, grad F>
///                   + (sigma/a)((gamma-1) Delta_f v + a sigma'/(2 sigma) + a r)^2
///                   + (alpha - 1) sigma (v_t/v)^2,
/// time derivatives by three-point differences. Residuals are the largest
/// violation RHS - LHS per interior sample. Throws InsufficientSamples below three samples.
IdentityReport harnack_quantity_evolution_check(const Trajectory& trajectory,
                                                const HarnackCoefficients& coeffs,
                                                const ToleranceModel& model = {});

/// Adaptive Simpson quadrature of fn on [lo, hi] with relative tolerance `rel_tol`
/// and recursion depth limit `max_depth`. An endpoint at exactly 0 is
/// replaced by a point 1e-14 (hi - lo) inside the interval.
double adaptive_simpson(const std::function<double(double)>& fn, double lo, double hi,
                        double rel_tol = 1e-10, int max_depth = 40);

}  // namespace pmelab
