#include "pmelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "grid_lines.hpp"
#include "pmelab/operators.hpp"

namespace pmelab {

double Geometry::min_spacing() const noexcept {
  double h = spacing_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
  return h;
}

double Geometry::volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= periods_[a];
  return v;
}

Point Geometry::node(std::size_t index) const {
  const auto m = multi_index(index);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = m[a] * spacing_[a];
  return x;
}

Point Geometry::periods_point() const noexcept { return periods_; }

std::array<int, 3> Geometry::multi_index(std::size_t index) const {
  std::array<int, 3> m{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    m[a] = static_cast<int>(index % points_[a]);
    index /= points_[a];
  }
  return m;
}

std::size_t Geometry::linear_index(const std::array<int, 3>& multi) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a)
    idx += detail::wrap(multi[a], points_[a]) * strides_[a];
  return idx;
}

bool Geometry::same_grid(const Geometry& other) const {
  if (this == &other) return true;
  return dim_ == other.dim_ && points_ == other.points_ && periods_ == other.periods_ &&
         weighted_ == other.weighted_ && m_param_ == other.m_param_ && weight_ == other.weight_;
}

ScalarField Geometry::weight() const { return ScalarField(ptr(), weight_); }

ScalarField Geometry::constant(double value) const { return ScalarField(ptr(), value); }

ScalarField Geometry::sample(const SmoothFunction& fn) const {
  const Point periods = periods_point();
  return sample_fn([&](const Point& x) { return fn.value(x, periods); });
}

GeometryPtr build_torus(const TorusSpec& spec) {
  if (spec.dim < 1 || spec.dim > 3) throw std::invalid_argument("torus dimension must be 1, 2 or 3");
  if (static_cast<int>(spec.points.size()) != spec.dim ||
      static_cast<int>(spec.periods.size()) != spec.dim)
    throw std::invalid_argument("points and periods need one entry per axis");

  auto g = std::shared_ptr<Geometry>(new Geometry());
  g->dim_ = spec.dim;
  g->size_ = 1;
  g->cell_volume_ = 1.0;
  for (int a = 0; a < spec.dim; ++a) {
    if (spec.points[a] < 8)
      throw std::invalid_argument("need at least 8 points on axis " + std::to_string(a));
    if (!(spec.periods[a] > 0.0) || !std::isfinite(spec.periods[a]))
      throw std::invalid_argument("period on axis " + std::to_string(a) + " must be positive");
    g->points_[a] = spec.points[a];
    g->periods_[a] = spec.periods[a];
    g->spacing_[a] = spec.periods[a] / spec.points[a];
    g->strides_[a] = g->size_;
    g->size_ *= static_cast<std::size_t>(spec.points[a]);
    g->cell_volume_ *= g->spacing_[a];
  }

  g->weight_.assign(g->size_, 0.0);
  if (spec.weight) {
    g->weighted_ = true;
    if (const auto* fn = std::get_if<SmoothFunction>(&*spec.weight)) {
      g->analytic_weight_ = *fn;
      const Point periods = g->periods_point();
      for (std::size_t i = 0; i < g->size_; ++i) g->weight_[i] = fn->value(g->node(i), periods);
    } else {
      const auto& samples = std::get<std::vector<double>>(*spec.weight);
      if (samples.size() != g->size_)
        throw std::invalid_argument("weight samples do not match the grid size");
      for (double v : samples)
        if (!std::isfinite(v)) throw std::invalid_argument("weight samples must be finite");
      g->weight_ = samples;
    }
    const auto [lo, hi] = std::minmax_element(g->weight_.begin(), g->weight_.end());
    g->weight_varies_ = *lo != *hi;
  }

  const double n = spec.dim;
  g->m_param_ = spec.m_param.value_or(n);
  if (!std::isfinite(g->m_param_) || g->m_param_ < n)
    throw std::invalid_argument("m must satisfy m >= n");
  if (!g->weighted_ && g->m_param_ != n)
    throw std::invalid_argument("an unweighted torus has m = n");
  if (g->weight_varies_ && !(g->m_param_ > n))
    throw std::invalid_argument("a non-constant weight needs m > n");

  g->density_.resize(g->size_);
  for (std::size_t i = 0; i < g->size_; ++i) g->density_[i] = std::exp(-g->weight_[i]);

  for (int a = 0; a < spec.dim; ++a) {
    auto& grad = g->weight_gradient_[a];
    grad.assign(g->size_, 0.0);
    if (!g->weight_varies_) continue;
    const double inv = 1.0 / (2.0 * g->spacing_[a]);
    detail::for_each_line(*g, a, [&](std::size_t base, std::size_t stride, std::size_t len) {
      const auto nn = static_cast<std::ptrdiff_t>(len);
      for (std::ptrdiff_t i = 0; i < nn; ++i) {
        const std::size_t ip = base + detail::wrap(i + 1, nn) * stride;
        const std::size_t im = base + detail::wrap(i - 1, nn) * stride;
        grad[base + i * stride] = (g->weight_[ip] - g->weight_[im]) * inv;
      }
    });
  }
  return g;
}

GeometryPtr build_torus(int dim, std::vector<int> points, std::vector<double> periods) {
  TorusSpec spec;
  spec.dim = dim;
  spec.points = std::move(points);
  spec.periods = std::move(periods);
  return build_torus(spec);
}

double bakry_emery_lower_bound(const Geometry& geometry) {
  if (!geometry.weight_varies()) return 0.0;
  const double gap = geometry.m_param() - geometry.dim();
  if (!(gap > 0.0)) throw std::invalid_argument("Bakry-Emery bound needs m > n for a varying weight");

  const ScalarField f = geometry.weight();
  const SymTensorField hess = hessian(f);
  const int n = geometry.dim();
  double lowest = 0.0;
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        m(a, b) = hess.at(a, b)[i] -
                  geometry.weight_gradient(a)[i] * geometry.weight_gradient(b)[i] / gap;
    double lambda;
    if (n == 1) {
      lambda = m(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.topLeftCorner(n, n),
                                                         Eigen::EigenvaluesOnly);
      lambda = eig.eigenvalues().minCoeff();
    }
    lowest = std::min(lowest, lambda);
  }
  return std::max(0.0, -lowest);
}

double geodesic_distance(const Point& x1, const Point& x2, const Geometry& geometry) {
  double sum = 0.0;
  for (int a = 0; a < geometry.dim(); ++a) {
    const double period = geometry.period(a);
    double d = std::fmod(std::abs(x1[a] - x2[a]), period);
    d = std::min(d, period - d);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double interpolate(const ScalarField& field, const Point& x) {
  const Geometry& g = *field.geometry();
  const int n = g.dim();
  std::array<int, 3> lo{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    const double s = x[a] / g.spacing(a);
    const double fl = std::floor(s);
    lo[a] = static_cast<int>(detail::wrap(static_cast<std::ptrdiff_t>(fl), g.points(a)));
    frac[a] = s - fl;
  }
  double value = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    std::array<int, 3> idx{0, 0, 0};
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const bool up = (corner >> a) & 1;
      idx[a] = lo[a] + (up ? 1 : 0);
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    value += w * field[g.linear_index(idx)];
  }
  return value;
}

}  // namespace pmelab
