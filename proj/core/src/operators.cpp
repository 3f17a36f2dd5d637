#include "pmelab/operators.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "grid_lines.hpp"
#include "pmelab/geometry.hpp"

namespace pmelab {
namespace {

// Applies out[j] += sum_k c_k in[j + o_k] along `axis` for a symmetric stencil
// given by (offset, coefficient) pairs. Axis 0 walks contiguous lines; the
// other axes walk whole rows of the faster axes so the inner loop is unit-stride.
template <std::size_t K>
void add_stencil(const Geometry& g, int axis, const std::array<std::ptrdiff_t, K>& offs,
                 const std::array<double, K>& coef, const double* in, double* out) {
  const auto n = static_cast<std::ptrdiff_t>(g.points(axis));
  const std::size_t stride = g.stride(axis);
  const std::size_t block = stride * static_cast<std::size_t>(n);
  const std::size_t outer = g.size() / block;
  std::ptrdiff_t reach = 0;
  for (auto o : offs) reach = std::max(reach, o < 0 ? -o : o);
  for (std::size_t ob = 0; ob < outer; ++ob) {
    const double* bin = in + ob * block;
    double* bout = out + ob * block;
    if (stride == 1) {
      auto at = [&](std::ptrdiff_t i) { return bin[detail::wrap(i, n)]; };
      auto edge = [&](std::ptrdiff_t i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) acc += coef[k] * at(i + offs[k]);
        bout[i] += acc;
      };
      for (std::ptrdiff_t i = 0; i < reach; ++i) edge(i);
      for (std::ptrdiff_t i = reach; i < n - reach; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) acc += coef[k] * bin[i + offs[k]];
        bout[i] += acc;
      }
      for (std::ptrdiff_t i = n - reach; i < n; ++i) edge(i);
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::array<const double*, K> rows;
        for (std::size_t k = 0; k < K; ++k) rows[k] = bin + detail::wrap(i + offs[k], n) * stride;
        double* row_out = bout + static_cast<std::size_t>(i) * stride;
        for (std::size_t k = 0; k < K; ++k) {
          const double c = coef[k];
          const double* r = rows[k];
          for (std::size_t j = 0; j < stride; ++j) row_out[j] += c * r[j];
        }
      }
    }
  }
}

// out += scale * (in[+shift] - in[-shift]) along `axis`.
void add_centered(const Geometry& g, int axis, int shift, double scale, const double* in,
                  double* out) {
  add_stencil<2>(g, axis, {shift, -shift}, {scale, -scale}, in, out);
}

// out += scale * (in[+2] - 2 in + in[-2]) along `axis`.
void add_wide_second(const Geometry& g, int axis, double scale, const double* in, double* out) {
  add_stencil<3>(g, axis, {2, 0, -2}, {scale, -2.0 * scale, scale}, in, out);
}

}  // namespace

namespace kernels {

void wide_laplacian(const Geometry& g, const double* in, double* out) {
  std::fill(out, out + g.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    const double h = g.spacing(a);
    add_wide_second(g, a, 1.0 / (4.0 * h * h), in, out);
  }
}

void weighted_wide_laplacian(const Geometry& g, const double* in, double* out) {
  wide_laplacian(g, in, out);
  if (!g.weight_varies()) return;
  thread_local std::vector<double> du;
  du.assign(g.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    std::fill(du.begin(), du.end(), 0.0);
    add_centered(g, a, 1, 1.0 / (2.0 * g.spacing(a)), in, du.data());
    const auto fa = g.weight_gradient(a);
    for (std::size_t j = 0; j < g.size(); ++j) out[j] -= fa[j] * du[j];
  }
}

}  // namespace kernels

ScalarField partial(const ScalarField& field, int axis) {
  const Geometry& g = *field.geometry();
  if (axis < 0 || axis >= g.dim()) throw std::out_of_range("partial: axis out of range");
  std::vector<double> out(g.size(), 0.0);
  add_centered(g, axis, 1, 1.0 / (2.0 * g.spacing(axis)), field.values().data(), out.data());
  return ScalarField(field.geometry(), std::move(out));
}

VectorField gradient(const ScalarField& field) {
  const Geometry& g = *field.geometry();
  VectorField out(field.geometry());
  for (int a = 0; a < g.dim(); ++a)
    add_centered(g, a, 1, 1.0 / (2.0 * g.spacing(a)), field.values().data(),
                 out.component(a).data());
  return out;
}

ScalarField divergence(const VectorField& field) {
  const Geometry& g = *field.geometry();
  std::vector<double> out(g.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a)
    add_centered(g, a, 1, 1.0 / (2.0 * g.spacing(a)), field.component(a).data(), out.data());
  return ScalarField(field.geometry(), std::move(out));
}

ScalarField laplacian(const ScalarField& field) {
  const Geometry& g = *field.geometry();
  std::vector<double> out(g.size());
  kernels::wide_laplacian(g, field.values().data(), out.data());
  return ScalarField(field.geometry(), std::move(out));
}

SymTensorField hessian(const ScalarField& field) {
  const Geometry& g = *field.geometry();
  SymTensorField out(field.geometry());
  const VectorField grad = gradient(field);
  for (int a = 0; a < g.dim(); ++a) {
    const double h = g.spacing(a);
    add_wide_second(g, a, 1.0 / (4.0 * h * h), field.values().data(), out.at(a, a).data());
    for (int b = a + 1; b < g.dim(); ++b)
      add_centered(g, b, 1, 1.0 / (2.0 * g.spacing(b)), grad.component(a).data(),
                   out.at(a, b).data());
  }
  return out;
}

ScalarField weighted_laplacian(const ScalarField& field) {
  const Geometry& g = *field.geometry();
  std::vector<double> out(g.size());
  kernels::weighted_wide_laplacian(g, field.values().data(), out.data());
  return ScalarField(field.geometry(), std::move(out));
}

double integrate(const ScalarField& field, Measure measure) {
  const Geometry& g = *field.geometry();
  double sum = 0.0;
  if (measure == Measure::weighted) {
    const auto rho = g.density();
    for (std::size_t i = 0; i < field.size(); ++i) sum += field[i] * rho[i];
  } else {
    for (double v : field.values()) sum += v;
  }
  return sum * g.cell_volume();
}

Measure natural_measure(const ScalarField& field) {
  return field.geometry()->weighted() ? Measure::weighted : Measure::volume;
}

}  // namespace pmelab
