#pragma once

#include <iosfwd>
#include <vector>

#include "pmelab/report.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

/// Time weights of the entropy functionals for curvature level kappa:
///   sigma(t) = ((e^{2 kappa t} - 1) / (2 kappa))^a,
///   beta(t)  = sinh(2 kappa t) / (2 kappa),
///   eta(t)   = sigma'/sigma = 2 a kappa / (1 - e^{-2 kappa t}),
/// with a = d(gamma-1) / (d(gamma-1) + 2) and d the (effective) dimension.
/// kappa = 0 gives sigma = t^a, beta = t, eta = a/t.
struct CoefficientSchedule {
  double gamma = 2.0;
  double dim_param = 1.0;
  double a = 0.0;
  double kappa = 0.0;
};

/// a = d(gamma-1) / (d(gamma-1) + 2).
double schedule_exponent(double gamma, double dim_param);

/// Throws std::invalid_argument for gamma <= 1, dim_param < 1 or kappa < 0.
CoefficientSchedule make_schedule(double gamma, double dim_param, double kappa);

struct ScheduleValues {
  double sigma = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double sigma_dot = 0.0;
  double beta_dot = 0.0;
};

/// Closed forms, switching to Taylor series below kappa t = 1e-6.
/// Throws std::invalid_argument for t <= 0.
ScheduleValues schedule_eval(const CoefficientSchedule& schedule, double t);

/// kappa = K * max u0^{gamma-1}.
double curvature_level(double K, const ScalarField& u0, double gamma);

/// N = -sigma int v u, in the geometry's natural measure.
double nash_entropy(const SolverState& state, const CoefficientSchedule& schedule);

/// W = sigma beta int [gamma |grad v|^2 / v - (1/beta + sigma'/sigma)] v u.
double w_entropy(const SolverState& state, const CoefficientSchedule& schedule);

/// The integrands of the entropy dissipation, each multiplied by 2 sigma beta v u
/// and integrated. With d = m (n when unweighted) and eta from the schedule:
///   hessian        (gamma-1) |Hess v + eta/(d(gamma-1)) g|^2
///   ricci          (gamma-1) (Ric_f^m + K g)(grad v, grad v)
///   trace          ((gamma-1) Delta_f v + eta)^2
///   weighted_extra (gamma-1)/(m-n) (<grad v, grad f> - (m-n) eta/(m(gamma-1)))^2, only for m > n
struct DissipationBreakdown {
  double hessian = 0.0;
  double ricci = 0.0;
  double trace = 0.0;
  double weighted_extra = 0.0;
  double total = 0.0;
  /// beta * 2 sigma int (gamma kappa - (gamma-1) K v) |grad v|^2 u, the gap
  /// closed by bounding (gamma-1) K v by gamma kappa. dW/dt = -total - curvature_slack.
  double curvature_slack = 0.0;
};

/// Throws std::invalid_argument for t <= 0.
DissipationBreakdown dissipation(const SolverState& state, const CoefficientSchedule& schedule,
                                 double K);

struct EntropyRow {
  double t = 0.0;
  double N = 0.0;
  double W = 0.0;
  double dWdt = 0.0;
  DissipationBreakdown D;
  bool pass = true;
};

struct EntropyReport {
  std::vector<EntropyRow> rows;
  double scale = 0.0;
  double tolerance = 0.0;
  /// True for K = 0 on an unweighted torus, where dW/dt = -D is an equality.
  bool equality = false;
  /// Largest dW/dt and largest dW/dt + D over the rows.
  double max_dWdt = 0.0;
  double max_excess = 0.0;
  /// Largest |dW/dt + D| (the equality residual).
  double max_equality_residual = 0.0;
  /// Largest |dW/dt + D + curvature_slack|, which vanishes for exact solutions.
  double max_identity_residual = 0.0;
  /// max u^{gamma-1} stayed within 1e-10 (relative) of its initial value.
  bool kappa_dominates = true;
  bool pass = true;
};

/// Differences W in time at every interior sample and checks dW/dt <= tol and
/// dW/dt + D <= tol (|dW/dt + D| <= tol in the equality case), where
/// tol = model(h, largest sample spacing, max over samples of |W| + D).
/// Throws InsufficientSamples for fewer than three samples.
EntropyReport monotonicity_report(const Trajectory& trajectory, const CoefficientSchedule& schedule,
                                  double K, const ToleranceModel& model = {});

/// Columns t,N,W,dWdt,D_total,D_hessian,D_ricci,D_trace,D_weighted_extra,pass.
void write_entropy_csv(std::ostream& out, const EntropyReport& report);

}  // namespace pmelab
