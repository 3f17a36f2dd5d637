#pragma once

#include <vector>

#include "pmelab/report.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

// Consistency checks of a computed trajectory against the evolution equations
// satisfied by the pressure v. Here box X = X_t - (gamma-1) v Delta_f X, and on
// a weighted torus the flat Ricci term becomes Hess f (Bochner for Delta_f).

/// v_t from the pressure equation: (gamma-1) v Delta_f v + |grad v|^2.
ScalarField pressure_rate(const SolverState& state);

struct TimedField {
  double t = 0.0;
  ScalarField values;
};

/// Time-differenced v_t minus pressure_rate. Three-point differences at every
/// interior sample; with exactly two samples a single residual at the midpoint
/// compares the difference quotient with the mean of the two rates.
/// Throws InsufficientSamples for fewer than two samples.
std::vector<TimedField> pressure_equation_residual(const Trajectory& trajectory);

IdentityReport pressure_equation_check(const Trajectory& trajectory,
                                       const ToleranceModel& model = {});

enum class EvolutionIdentity {
  v_t,         ///< box v_t = (gamma-1) v_t Delta_f v + 2<grad v, grad v_t>
  power_beta,  ///< box v^b = b (b + gamma - b gamma) v^{b-1} |grad v|^2
  w,           ///< box w = 2<grad v, grad w> + 2(gamma-1) w Delta_f v - 2(gamma-1) v (|Hess v|^2 + Ric_f(grad v, grad v))
  F_alpha,     ///< box F = 2 gamma <grad v, grad F> + 2(gamma-1)(|Hess v|^2 + Ric_f) + F_1^2 + (alpha-1)(v_t/v)^2
};

/// Checks one evolution identity at every interior sample. `parameter` is the
/// exponent b for power_beta and alpha for F_alpha (F = alpha v_t/v - |grad v|^2/v).
/// Throws InsufficientSamples for fewer than three samples.
IdentityReport evolution_identity_check(const Trajectory& trajectory, EvolutionIdentity which,
                                        double parameter = 1.0,
                                        const ToleranceModel& model = {});

struct IntegralIdentityReport {
  /// d/dt int v u = -gamma int |grad v|^2 u.
  IdentityReport first_derivative;
  /// d^2/dt^2 int v u = 2(gamma-1) int (|Hess v|^2 + Ric_f(grad v, grad v) + (gamma-1)(Delta_f v)^2) v u.
  IdentityReport second_derivative;
  bool pass() const { return first_derivative.pass && second_derivative.pass; }
};

/// Compares time differences of int v u against the integral identities at
/// every interior sample. Throws InsufficientSamples for fewer than three samples.
IntegralIdentityReport integral_identity_check(const Trajectory& trajectory,
                                               const ToleranceModel& model = {});

/// Ric_f(X, X) on the flat torus: Hess f(X, X), zero without a varying weight.
ScalarField weight_hessian_form(const Geometry& geometry, const VectorField& x);

}  // namespace pmelab
