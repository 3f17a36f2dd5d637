#pragma once

#include <cstddef>

#include "pmelab/geometry.hpp"

namespace pmelab::detail {

/// Calls fn(base, stride, n) once per grid line parallel to `axis`; the nodes
/// of a line are base + i * stride for i in [0, n).
template <class Fn>
void for_each_line(const Geometry& g, int axis, Fn&& fn) {
  const std::size_t stride = g.stride(axis);
  const std::size_t n = static_cast<std::size_t>(g.points(axis));
  const std::size_t block = stride * n;
  const std::size_t outer = g.size() / block;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t inner = 0; inner < stride; ++inner) fn(o * block + inner, stride, n);
}

/// Periodic index i + offset on a line of n nodes, |offset| < n.
inline std::size_t wrap(std::ptrdiff_t i, std::ptrdiff_t n) {
  i %= n;
  return static_cast<std::size_t>(i < 0 ? i + n : i);
}

}  // namespace pmelab::detail
