#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace pmelab {

class Geometry;
using GeometryPtr = std::shared_ptr<const Geometry>;

/// Throws GeometryMismatch unless both pointers describe the same grid.
void require_same_geometry(const GeometryPtr& a, const GeometryPtr& b);

/// Real value per grid node.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GeometryPtr geometry, double fill);
  /// Throws std::invalid_argument on a size mismatch or a non-finite entry.
  ScalarField(GeometryPtr geometry, std::vector<double> values);

  const GeometryPtr& geometry() const noexcept { return geometry_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  ScalarField map(const std::function<double(double)>& fn) const;

  ScalarField& operator+=(const ScalarField& rhs);
  ScalarField& operator-=(const ScalarField& rhs);
  ScalarField& operator*=(const ScalarField& rhs);
  ScalarField& operator/=(const ScalarField& rhs);
  ScalarField& operator+=(double rhs);
  ScalarField& operator*=(double rhs);

 private:
  GeometryPtr geometry_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField lhs, const ScalarField& rhs);
ScalarField operator-(ScalarField lhs, const ScalarField& rhs);
ScalarField operator*(ScalarField lhs, const ScalarField& rhs);
ScalarField operator/(ScalarField lhs, const ScalarField& rhs);
ScalarField operator+(ScalarField lhs, double rhs);
ScalarField operator-(ScalarField lhs, double rhs);
ScalarField operator*(ScalarField lhs, double rhs);
ScalarField operator*(double lhs, ScalarField rhs);
ScalarField operator+(double lhs, ScalarField rhs);
ScalarField operator-(double lhs, ScalarField rhs);
ScalarField operator-(ScalarField field);
ScalarField pow(const ScalarField& field, double exponent);
ScalarField abs(const ScalarField& field);

/// `dim` components per node, e.g. a gradient.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(GeometryPtr geometry);

  const GeometryPtr& geometry() const noexcept { return geometry_; }
  int dim() const noexcept { return static_cast<int>(components_.size()); }

  std::span<const double> component(int axis) const { return components_.at(axis); }
  std::span<double> component(int axis) { return components_.at(axis); }
  ScalarField component_field(int axis) const;

 private:
  GeometryPtr geometry_;
  std::vector<std::vector<double>> components_;
};

ScalarField dot(const VectorField& a, const VectorField& b);
ScalarField norm_squared(const VectorField& a);

/// Symmetric rank-2 tensor with dim*(dim+1)/2 stored components per node.
class SymTensorField {
 public:
  SymTensorField() = default;
  explicit SymTensorField(GeometryPtr geometry);

  const GeometryPtr& geometry() const noexcept { return geometry_; }
  int dim() const noexcept { return dim_; }

  std::span<const double> at(int i, int j) const { return components_.at(slot(i, j)); }
  std::span<double> at(int i, int j) { return components_.at(slot(i, j)); }

  static int slot(int i, int j, int dim);

 private:
  int slot(int i, int j) const { return slot(i, j, dim_); }

  GeometryPtr geometry_;
  int dim_ = 0;
  std::vector<std::vector<double>> components_;
};

ScalarField trace(const SymTensorField& t);
/// Nodewise sum_ij (T_ij + shift * delta_ij)^2.
ScalarField shifted_norm_squared(const SymTensorField& t, double shift);
/// Nodewise T(a, b).
ScalarField contract(const SymTensorField& t, const VectorField& a, const VectorField& b);

}  // namespace pmelab
