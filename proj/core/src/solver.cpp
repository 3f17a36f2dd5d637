#include "pmelab/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "pmelab/error.hpp"
#include "pmelab/operators.hpp"

namespace pmelab {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void require_gamma(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw std::invalid_argument("gamma must be a finite number > 1");
}

// u^gamma with the common exponents spelled out; pow dominates the explicit step.
void power_into(const double* u, double* out, std::size_t n, double gamma) {
  if (gamma == 2.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = u[i] * u[i];
  } else if (gamma == 3.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = u[i] * u[i] * u[i];
  } else if (gamma == 1.5) {
    for (std::size_t i = 0; i < n; ++i) out[i] = u[i] * std::sqrt(u[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(u[i], gamma);
  }
}

void check_positive(double min_u, double floor, double t) {
  if (!(min_u >= floor) || !(min_u > 0.0))
    throw StepError(StepError::Reason::positivity,
                    "density fell to " + std::to_string(min_u) + " (floor " +
                        std::to_string(floor) + ") near t = " + std::to_string(t) +
                        "; reduce the time step");
}

double max_pressure(const std::vector<double>& u, double gamma) {
  const double umax = *std::max_element(u.begin(), u.end());
  return gamma / (gamma - 1.0) * std::pow(umax, gamma - 1.0);
}

double stable_dt(const Geometry& g, double gamma, double vmax, double safety) {
  const double h = g.min_spacing();
  const double denom = 2.0 * g.dim() * gamma * vmax;
  return denom > 0.0 ? safety * h * h / denom : std::numeric_limits<double>::infinity();
}

// Explicit Euler on raw buffers; returns the minimum of the new density.
class ExplicitStepper {
 public:
  explicit ExplicitStepper(const Geometry& g) : g_(g), w_(g.size()), lap_(g.size()) {}

  double advance(std::vector<double>& u, double dt, double gamma) {
    const std::size_t n = u.size();
    power_into(u.data(), w_.data(), n, gamma);
    if (g_.weight_varies())
      kernels::weighted_wide_laplacian(g_, w_.data(), lap_.data());
    else
      kernels::wide_laplacian(g_, w_.data(), lap_.data());
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += dt * lap_[i];
      lo = std::min(lo, u[i]);
    }
    return lo;
  }

 private:
  const Geometry& g_;
  std::vector<double> w_, lap_;
};

// Backward Euler for du/dt = Delta_f(mu u) linearized as D0 . (mu D0 u) - <D0 f, mu D0 u>.
class ImplicitStepper {
 public:
  explicit ImplicitStepper(const Geometry& g) : g_(g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    identity_.resize(n, n);
    identity_.setIdentity();
    for (int a = 0; a < g.dim(); ++a) {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(2 * g.size());
      const double inv = 1.0 / (2.0 * g.spacing(a));
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto idx = g.multi_index(i);
        auto plus = idx, minus = idx;
        ++plus[a];
        --minus[a];
        trips.emplace_back(static_cast<int>(i), static_cast<int>(g.linear_index(plus)), inv);
        trips.emplace_back(static_cast<int>(i), static_cast<int>(g.linear_index(minus)), -inv);
      }
      SparseMatrix d(n, n);
      d.setFromTriplets(trips.begin(), trips.end());
      diff_.push_back(std::move(d));
    }
  }

  double advance(std::vector<double>& u, double dt, double gamma, const StepOptions& opt) {
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::Map<Eigen::VectorXd> uv(u.data(), n);
    Eigen::VectorXd mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu[i] = gamma * std::pow(uv[i], gamma - 1.0);

    SparseMatrix op = identity_;
    for (int a = 0; a < g_.dim(); ++a) {
      const SparseMatrix& d = diff_[a];
      SparseMatrix flux = mu.asDiagonal() * d;
      op += dt * SparseMatrix(SparseMatrix(d.transpose()) * flux);
      if (g_.weight_varies()) {
        const auto fa = g_.weight_gradient(a);
        Eigen::Map<const Eigen::VectorXd> fv(fa.data(), n);
        op += dt * SparseMatrix(fv.asDiagonal() * flux);
      }
    }
    const Eigen::VectorXd rhs = uv;
    Eigen::VectorXd next;
    if (g_.weight_varies()) {
      Eigen::BiCGSTAB<SparseMatrix> solver;
      solver.setTolerance(opt.solver_tol);
      solver.setMaxIterations(opt.max_iters);
      solver.compute(op);
      next = solver.solveWithGuess(rhs, rhs);
      check(solver.info(), solver.iterations(), solver.error());
    } else {
      Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> solver;
      solver.setTolerance(opt.solver_tol);
      solver.setMaxIterations(opt.max_iters);
      solver.compute(op);
      next = solver.solveWithGuess(rhs, rhs);
      check(solver.info(), solver.iterations(), solver.error());
    }
    uv = next;
    return next.minCoeff();
  }

 private:
  static void check(Eigen::ComputationInfo info, Eigen::Index iters, double err) {
    if (info != Eigen::Success)
      throw StepError(StepError::Reason::no_convergence,
                      "linear solve stopped after " + std::to_string(iters) +
                          " iterations with relative residual " + std::to_string(err));
  }

  const Geometry& g_;
  SparseMatrix identity_;
  std::vector<SparseMatrix> diff_;
};

std::vector<double> copy_values(const ScalarField& f) {
  return {f.values().begin(), f.values().end()};
}

}  // namespace

ScalarField pressure_from_density(const ScalarField& u, double gamma) {
  require_gamma(gamma);
  if (!(u.min() > 0.0)) throw std::invalid_argument("density must be positive at every node");
  const double c = gamma / (gamma - 1.0);
  return u.map([&](double x) { return c * std::pow(x, gamma - 1.0); });
}

ScalarField density_from_pressure(const ScalarField& v, double gamma) {
  require_gamma(gamma);
  if (!(v.min() > 0.0)) throw std::invalid_argument("pressure must be positive at every node");
  const double c = (gamma - 1.0) / gamma;
  return v.map([&](double x) { return std::pow(c * x, 1.0 / (gamma - 1.0)); });
}

SolverState make_state(ScalarField u, double gamma, double t) {
  SolverState s;
  s.v = pressure_from_density(u, gamma);
  s.u = std::move(u);
  s.t = t;
  s.gamma = gamma;
  return s;
}

double stable_time_step(const SolverState& state, double safety) {
  return stable_dt(*state.geometry(), state.gamma, state.v.max(), safety);
}

SolverState step(const SolverState& state, double dt, const StepOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const Geometry& g = *state.geometry();
  std::vector<double> u = copy_values(state.u);
  double lo;
  if (options.scheme == Scheme::explicit_euler) {
    ExplicitStepper stepper(g);
    lo = stepper.advance(u, dt, state.gamma);
  } else {
    ImplicitStepper stepper(g);
    lo = stepper.advance(u, dt, state.gamma, options);
  }
  check_positive(lo, options.u_floor, state.t + dt);
  return make_state(ScalarField(state.geometry(), std::move(u)), state.gamma, state.t + dt);
}

SampleDiagnostics diagnose(const SolverState& state) {
  return {integrate(state.u, natural_measure(state.u)), state.u.min(), state.u.max(),
          state.v.max()};
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.t);
  return out;
}

double Trajectory::sup_v() const {
  double m = initial.v.max();
  for (const auto& d : diagnostics) m = std::max(m, d.sup_v);
  return m;
}

Trajectory run(const ScalarField& u0, double gamma, double t_end,
               const std::vector<double>& output_times, const RunOptions& options) {
  require_gamma(gamma);
  if (output_times.empty()) throw std::invalid_argument("no output times requested");
  double prev = 0.0;
  for (double t : output_times) {
    if (!(t > prev)) throw std::invalid_argument("output times must be strictly increasing and > 0");
    prev = t;
  }
  if (output_times.back() > t_end) throw std::invalid_argument("output time beyond t_end");

  const GeometryPtr& geom = u0.geometry();
  const Geometry& g = *geom;
  Trajectory traj;
  traj.initial = make_state(u0, gamma, 0.0);
  const double mean = integrate(u0) / g.volume();
  StepOptions step_opt{options.scheme, options.u_floor_ratio * mean, options.solver_tol,
                       options.max_iters};

  std::vector<double> u = copy_values(u0);
  ExplicitStepper explicit_stepper(g);
  std::optional<ImplicitStepper> implicit_stepper;
  if (options.scheme == Scheme::semi_implicit) implicit_stepper.emplace(g);

  double t = 0.0;
  for (double target : output_times) {
    const double span = target - t;
    double dt = stable_dt(g, gamma, max_pressure(u, gamma), options.cfl_safety);
    if (options.scheme == Scheme::semi_implicit) dt = std::min(span, options.implicit_step_factor * dt);
    const auto steps = static_cast<long>(std::ceil(span / std::min(dt, span)));
    const double h = span / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) {
      const double lo = options.scheme == Scheme::explicit_euler
                            ? explicit_stepper.advance(u, h, gamma)
                            : implicit_stepper->advance(u, h, gamma, step_opt);
      check_positive(lo, step_opt.u_floor, t + (k + 1) * h);
    }
    t = target;
    traj.samples.push_back(make_state(ScalarField(geom, u), gamma, t));
    traj.diagnostics.push_back(diagnose(traj.samples.back()));
  }
  return traj;
}

}  // namespace pmelab
