#include "pmelab/smooth_function.hpp"

#include <cmath>
#include <numbers>

namespace pmelab {
namespace {

struct Phase {
  double angle;
  Point k;  // 2*pi*k_a/L_a
};

Phase phase_of(const FourierMode& mode, const Point& x, const Point& periods) {
  Phase p{mode.phase, {0.0, 0.0, 0.0}};
  for (int a = 0; a < 3; ++a) {
    if (mode.wavenumber[a] == 0) continue;
    p.k[a] = 2.0 * std::numbers::pi * mode.wavenumber[a] / periods[a];
    p.angle += p.k[a] * x[a];
  }
  return p;
}

}  // namespace

SmoothFunction::SmoothFunction(double offset, std::vector<FourierMode> modes)
    : offset_(offset), modes_(std::move(modes)) {}

SmoothFunction SmoothFunction::constant(double value) { return SmoothFunction(value, {}); }

SmoothFunction SmoothFunction::sine(double offset, double amplitude,
                                    std::array<int, 3> wavenumber, double phase) {
  return SmoothFunction(offset, {FourierMode{wavenumber, amplitude, phase}});
}

bool SmoothFunction::is_constant() const noexcept {
  for (const auto& m : modes_) {
    const bool moving = m.wavenumber[0] != 0 || m.wavenumber[1] != 0 || m.wavenumber[2] != 0;
    if (moving && m.amplitude != 0.0) return false;
  }
  return true;
}

SmoothFunction SmoothFunction::shifted(double delta) const {
  return SmoothFunction(offset_ + delta, modes_);
}

double SmoothFunction::value(const Point& x, const Point& periods) const {
  double sum = offset_;
  for (const auto& m : modes_) sum += m.amplitude * std::sin(phase_of(m, x, periods).angle);
  return sum;
}

Point SmoothFunction::gradient(const Point& x, const Point& periods) const {
  Point g{0.0, 0.0, 0.0};
  for (const auto& m : modes_) {
    const Phase p = phase_of(m, x, periods);
    const double c = m.amplitude * std::cos(p.angle);
    for (int a = 0; a < 3; ++a) g[a] += c * p.k[a];
  }
  return g;
}

Matrix3 SmoothFunction::hessian(const Point& x, const Point& periods) const {
  Matrix3 h{};
  for (const auto& m : modes_) {
    const Phase p = phase_of(m, x, periods);
    const double s = -m.amplitude * std::sin(p.angle);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) h[a][b] += s * p.k[a] * p.k[b];
  }
  return h;
}

}  // namespace pmelab
