#pragma once

#include <array>

namespace pmelab::detail {

// Weights of the three-point derivative stencils on nodes t0 < t1 < t2,
// evaluated at t1. Second order for the first derivative; the second
// derivative is second order only on uniform spacing.
struct ThreePoint {
  std::array<double, 3> first;
  std::array<double, 3> second;
};

inline ThreePoint three_point(double t0, double t1, double t2) {
  const double h1 = t1 - t0;
  const double h2 = t2 - t1;
  const double s = h1 + h2;
  return {{-h2 / (h1 * s), (h2 - h1) / (h1 * h2), h1 / (h2 * s)},
          {2.0 / (h1 * s), -2.0 / (h1 * h2), 2.0 / (h2 * s)}};
}

}  // namespace pmelab::detail
