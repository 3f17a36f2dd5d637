#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pmelab/field.hpp"
#include "pmelab/smooth_function.hpp"

namespace pmelab {

/// Weight f of the measure dmu = e^{-f} dV: either analytic or node samples.
using WeightSource = std::variant<SmoothFunction, std::vector<double>>;

struct TorusSpec {
  int dim = 1;
  std::vector<int> points;      ///< one entry per axis, each >= 8
  std::vector<double> periods;  ///< one entry per axis, each > 0
  std::optional<WeightSource> weight;
  std::optional<double> m_param;
};

/// Uniform periodic grid on the flat torus R^n / (L_1 Z x ... x L_n Z).
///
/// Node (i_0, i_1, i_2) sits at x_a = i_a * h_a and has linear index
/// i_0 + N_0 * (i_1 + N_1 * i_2), so axis 0 varies fastest. Instances are
/// immutable and shared between fields through GeometryPtr.
class Geometry : public std::enable_shared_from_this<Geometry> {
 public:
  int dim() const noexcept { return dim_; }
  int points(int axis) const { return points_.at(axis); }
  double period(int axis) const { return periods_.at(axis); }
  double spacing(int axis) const { return spacing_.at(axis); }
  double min_spacing() const noexcept;
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const { return strides_.at(axis); }

  /// Quadrature weight of every node for dV (product of spacings).
  double cell_volume() const noexcept { return cell_volume_; }
  /// Unweighted volume, the product of the periods.
  double volume() const noexcept;

  bool weighted() const noexcept { return weighted_; }
  double m_param() const noexcept { return m_param_; }
  /// True when a weight is present and not constant on the nodes.
  bool weight_varies() const noexcept { return weight_varies_; }
  /// f at the nodes (all zero when unweighted).
  std::span<const double> weight_values() const noexcept { return weight_; }
  /// e^{-f} at the nodes.
  std::span<const double> density() const noexcept { return density_; }
  /// Centered difference of f along an axis (all zero when unweighted).
  std::span<const double> weight_gradient(int axis) const { return weight_gradient_.at(axis); }
  /// Analytic weight when it was given by formula.
  const SmoothFunction* analytic_weight() const noexcept {
    return analytic_weight_ ? &*analytic_weight_ : nullptr;
  }

  Point node(std::size_t index) const;
  Point periods_point() const noexcept;
  std::array<int, 3> multi_index(std::size_t index) const;
  std::size_t linear_index(const std::array<int, 3>& multi) const;

  bool same_grid(const Geometry& other) const;

  GeometryPtr ptr() const { return shared_from_this(); }
  ScalarField weight() const;
  ScalarField constant(double value) const;
  ScalarField sample(const SmoothFunction& fn) const;
  template <class Fn>
  ScalarField sample_fn(Fn&& fn) const {
    std::vector<double> values(size_);
    for (std::size_t i = 0; i < size_; ++i) values[i] = fn(node(i));
    return ScalarField(ptr(), std::move(values));
  }

 private:
  friend GeometryPtr build_torus(const TorusSpec& spec);
  Geometry() = default;

  int dim_ = 1;
  std::array<int, 3> points_{1, 1, 1};
  std::array<double, 3> periods_{1.0, 1.0, 1.0};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> strides_{1, 1, 1};
  std::size_t size_ = 0;
  double cell_volume_ = 1.0;
  bool weighted_ = false;
  bool weight_varies_ = false;
  double m_param_ = 1.0;
  std::vector<double> weight_;
  std::vector<double> density_;
  std::array<std::vector<double>, 3> weight_gradient_;
  std::optional<SmoothFunction> analytic_weight_;
};

/// Builds a torus grid. Throws std::invalid_argument for a bad dimension,
/// fewer than 8 points on an axis, non-positive periods, m < n, or m <= n
/// together with a non-constant weight.
GeometryPtr build_torus(const TorusSpec& spec);

/// Convenience overload for unweighted tori.
GeometryPtr build_torus(int dim, std::vector<int> points, std::vector<double> periods);

/// K = max(0, -min_x lambda_min(Hess f - df (x) df / (m - n))) from the
/// discrete derivatives of f; zero for unweighted or constant-weight grids.
double bakry_emery_lower_bound(const Geometry& geometry);

/// Distance on the flat torus between two points of the fundamental domain.
double geodesic_distance(const Point& x1, const Point& x2, const Geometry& geometry);

/// Multilinear interpolation of a periodic field at an arbitrary point.
double interpolate(const ScalarField& field, const Point& x);

}  // namespace pmelab
