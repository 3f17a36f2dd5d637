#pragma once

#include "pmelab/field.hpp"

namespace pmelab {

// Second-order centered periodic differences. `divergence` is minus the
// adjoint of `gradient` for the node quadrature, and `laplacian` equals
// divergence(gradient(.)) node by node, so summation by parts is exact.

VectorField gradient(const ScalarField& field);
ScalarField divergence(const VectorField& field);
ScalarField laplacian(const ScalarField& field);
SymTensorField hessian(const ScalarField& field);

/// Delta_f u = Delta u - <grad f, grad u>, f taken from the field's geometry.
ScalarField weighted_laplacian(const ScalarField& field);

/// Centered first difference along one axis.
ScalarField partial(const ScalarField& field, int axis);

enum class Measure { volume, weighted };

/// Node quadrature: sum of values times h^n, times e^{-f} for Measure::weighted.
double integrate(const ScalarField& field, Measure measure = Measure::volume);

/// Measure::weighted when the field's geometry carries a weight.
Measure natural_measure(const ScalarField& field);

namespace kernels {

// Raw-array kernels used by the time stepper. `out` must not alias `in`.
void wide_laplacian(const Geometry& g, const double* in, double* out);
void weighted_wide_laplacian(const Geometry& g, const double* in, double* out);

}  // namespace kernels

}  // namespace pmelab
