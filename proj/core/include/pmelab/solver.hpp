#pragma once

#include <vector>

#include "pmelab/field.hpp"
#include "pmelab/geometry.hpp"

namespace pmelab {

/// Density u and pressure v = gamma/(gamma-1) u^{gamma-1} at time t.
struct SolverState {
  ScalarField u;
  ScalarField v;
  double t = 0.0;
  double gamma = 2.0;

  const GeometryPtr& geometry() const noexcept { return u.geometry(); }
};

/// v = gamma/(gamma-1) u^{gamma-1}. Throws std::invalid_argument for gamma <= 1
/// or a non-positive node.
ScalarField pressure_from_density(const ScalarField& u, double gamma);
/// Inverse of pressure_from_density.
ScalarField density_from_pressure(const ScalarField& v, double gamma);

/// State at time t with the pressure derived from u.
SolverState make_state(ScalarField u, double gamma, double t = 0.0);

enum class Scheme { explicit_euler, semi_implicit };

struct StepOptions {
  Scheme scheme = Scheme::explicit_euler;
  /// Smallest admissible density after a step.
  double u_floor = 0.0;
  /// Relative residual target and iteration cap of the semi-implicit linear solve.
  double solver_tol = 1e-12;
  int max_iters = 5000;
};

/// One step of du/dt = Delta_f(u^gamma). Explicit: forward Euler. Semi-implicit:
/// backward Euler with the mobility gamma u^{gamma-1} frozen at the old state.
/// Throws StepError on positivity loss or when the linear solve stalls.
SolverState step(const SolverState& state, double dt, const StepOptions& options = {});

/// safety * h_min^2 / (2 n gamma max v).
double stable_time_step(const SolverState& state, double safety = 0.25);

struct SampleDiagnostics {
  double mass = 0.0;  ///< integral of u in the natural measure
  double min_u = 0.0;
  double max_u = 0.0;
  double sup_v = 0.0;
};

SampleDiagnostics diagnose(const SolverState& state);

struct Trajectory {
  SolverState initial;
  std::vector<SolverState> samples;
  std::vector<SampleDiagnostics> diagnostics;

  std::size_t size() const noexcept { return samples.size(); }
  const GeometryPtr& geometry() const noexcept { return initial.geometry(); }
  double gamma() const noexcept { return initial.gamma; }
  std::vector<double> times() const;
  /// Largest pressure over the initial state and all samples.
  double sup_v() const;
};

struct RunOptions {
  Scheme scheme = Scheme::explicit_euler;
  double cfl_safety = 0.25;
  /// u_floor = u_floor_ratio * mean(u0).
  double u_floor_ratio = 1e-6;
  /// Semi-implicit steps are capped at this multiple of the explicit step.
  double implicit_step_factor = 10.0;
  double solver_tol = 1e-12;
  int max_iters = 5000;
};

/// Integrates from t = 0 and records the state at every output time. Output
/// times must be strictly increasing and lie in (0, t_end]. Each interval
/// between consecutive output times is split into equal steps no longer than
/// the step size chosen at its start, so output times are hit exactly.
Trajectory run(const ScalarField& u0, double gamma, double t_end,
               const std::vector<double>& output_times, const RunOptions& options = {});

}  // namespace pmelab
