#include "pmelab/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "pmelab/error.hpp"
#include "pmelab/geometry.hpp"

namespace pmelab {

void require_same_geometry(const GeometryPtr& a, const GeometryPtr& b) {
  if (a == b) return;
  if (!a || !b || !a->same_grid(*b)) throw GeometryMismatch();
}

ScalarField::ScalarField(GeometryPtr geometry, double fill)
    : geometry_(std::move(geometry)), values_(geometry_->size(), fill) {
  if (!std::isfinite(fill)) throw std::invalid_argument("ScalarField: non-finite fill value");
}

ScalarField::ScalarField(GeometryPtr geometry, std::vector<double> values)
    : geometry_(std::move(geometry)), values_(std::move(values)) {
  if (values_.size() != geometry_->size())
    throw std::invalid_argument("ScalarField: value count does not match grid size");
  if (!all_finite()) throw std::invalid_argument("ScalarField: non-finite node value");
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField ScalarField::map(const std::function<double(double)>& fn) const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), fn);
  return ScalarField(geometry_, std::move(out));
}

namespace {

template <class Op>
void combine(std::span<double> lhs, std::span<const double> rhs, Op op) {
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = op(lhs[i], rhs[i]);
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& rhs) {
  require_same_geometry(geometry_, rhs.geometry_);
  combine(values_, rhs.values_, std::plus<>());
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& rhs) {
  require_same_geometry(geometry_, rhs.geometry_);
  combine(values_, rhs.values_, std::minus<>());
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& rhs) {
  require_same_geometry(geometry_, rhs.geometry_);
  combine(values_, rhs.values_, std::multiplies<>());
  return *this;
}

ScalarField& ScalarField::operator/=(const ScalarField& rhs) {
  require_same_geometry(geometry_, rhs.geometry_);
  combine(values_, rhs.values_, std::divides<>());
  return *this;
}

ScalarField operator+(ScalarField lhs, const ScalarField& rhs) { return lhs += rhs; }
ScalarField operator-(ScalarField lhs, const ScalarField& rhs) { return lhs -= rhs; }
ScalarField operator*(ScalarField lhs, const ScalarField& rhs) { return lhs *= rhs; }
ScalarField operator/(ScalarField lhs, const ScalarField& rhs) { return lhs /= rhs; }

ScalarField& ScalarField::operator+=(double rhs) {
  for (double& v : values_) v += rhs;
  return *this;
}

ScalarField& ScalarField::operator*=(double rhs) {
  for (double& v : values_) v *= rhs;
  return *this;
}

ScalarField operator+(ScalarField lhs, double rhs) { return lhs += rhs; }
ScalarField operator-(ScalarField lhs, double rhs) { return lhs += -rhs; }
ScalarField operator*(ScalarField lhs, double rhs) { return lhs *= rhs; }
ScalarField operator*(double lhs, ScalarField rhs) { return rhs *= lhs; }
ScalarField operator+(double lhs, ScalarField rhs) { return rhs += lhs; }
ScalarField operator-(double lhs, ScalarField rhs) { return (rhs *= -1.0) += lhs; }
ScalarField operator-(ScalarField field) { return field *= -1.0; }

ScalarField pow(const ScalarField& field, double exponent) {
  return field.map([exponent](double x) { return std::pow(x, exponent); });
}

ScalarField abs(const ScalarField& field) {
  return field.map([](double x) { return std::abs(x); });
}

VectorField::VectorField(GeometryPtr geometry)
    : geometry_(std::move(geometry)),
      components_(geometry_->dim(), std::vector<double>(geometry_->size(), 0.0)) {}

ScalarField VectorField::component_field(int axis) const {
  return ScalarField(geometry_, components_.at(axis));
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  require_same_geometry(a.geometry(), b.geometry());
  std::vector<double> out(a.geometry()->size(), 0.0);
  for (int k = 0; k < a.dim(); ++k) {
    const auto ak = a.component(k);
    const auto bk = b.component(k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += ak[i] * bk[i];
  }
  return ScalarField(a.geometry(), std::move(out));
}

ScalarField norm_squared(const VectorField& a) { return dot(a, a); }

SymTensorField::SymTensorField(GeometryPtr geometry)
    : geometry_(std::move(geometry)),
      dim_(geometry_->dim()),
      components_(dim_ * (dim_ + 1) / 2, std::vector<double>(geometry_->size(), 0.0)) {}

int SymTensorField::slot(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: (0,0) (0,1) .. (0,n-1) (1,1) ..
  return i * dim - i * (i - 1) / 2 + (j - i);
}

ScalarField trace(const SymTensorField& t) {
  std::vector<double> out(t.geometry()->size(), 0.0);
  for (int k = 0; k < t.dim(); ++k) {
    const auto c = t.at(k, k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i];
  }
  return ScalarField(t.geometry(), std::move(out));
}

ScalarField shifted_norm_squared(const SymTensorField& t, double shift) {
  std::vector<double> out(t.geometry()->size(), 0.0);
  for (int a = 0; a < t.dim(); ++a) {
    for (int b = 0; b < t.dim(); ++b) {
      const auto c = t.at(a, b);
      const double s = a == b ? shift : 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += (c[i] + s) * (c[i] + s);
    }
  }
  return ScalarField(t.geometry(), std::move(out));
}

ScalarField contract(const SymTensorField& t, const VectorField& x, const VectorField& y) {
  require_same_geometry(t.geometry(), x.geometry());
  require_same_geometry(t.geometry(), y.geometry());
  std::vector<double> out(t.geometry()->size(), 0.0);
  for (int a = 0; a < t.dim(); ++a) {
    for (int b = 0; b < t.dim(); ++b) {
      const auto c = t.at(a, b);
      const auto xa = x.component(a);
      const auto yb = y.component(b);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i] * xa[i] * yb[i];
    }
  }
  return ScalarField(t.geometry(), std::move(out));
}

}  // namespace pmelab
