#pragma once

#include <array>
#include <vector>

namespace pmelab {

using Point = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

/// One term `amplitude * sin(2*pi*k.x/L + phase)` of a periodic trigonometric sum.
struct FourierMode {
  std::array<int, 3> wavenumber{0, 0, 0};
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Periodic analytic function `offset + sum_j modes_j` on a box of the given periods.
///
/// Used for weights and initial data given by name in a config, and as the
/// analytic side of derivative oracles.
class SmoothFunction {
 public:
  SmoothFunction() = default;
  SmoothFunction(double offset, std::vector<FourierMode> modes);

  static SmoothFunction constant(double value);
  static SmoothFunction sine(double offset, double amplitude, std::array<int, 3> wavenumber,
                             double phase = 0.0);

  double offset() const noexcept { return offset_; }
  const std::vector<FourierMode>& modes() const noexcept { return modes_; }

  /// True when no mode has both a non-zero amplitude and a non-zero wavenumber.
  bool is_constant() const noexcept;

  SmoothFunction shifted(double delta) const;

  double value(const Point& x, const Point& periods) const;
  Point gradient(const Point& x, const Point& periods) const;
  Matrix3 hessian(const Point& x, const Point& periods) const;

 private:
  double offset_ = 0.0;
  std::vector<FourierMode> modes_;
};

}  // namespace pmelab
