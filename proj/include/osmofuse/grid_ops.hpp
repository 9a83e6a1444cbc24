#ifndef OSMOFUSE_GRID_OPS_HPP
#define OSMOFUSE_GRID_OPS_HPP

#include "osmofuse/field.hpp"

// Discrete differential operators on the pixel grid, h = 1.
//
// gradient() uses forward differences with a zero closure on the far
// boundary (last column of the x component and last row of the y component
// are zero), and divergence() uses the matching backward differences, so
// that <gradient(u), p> + <u, divergence(p)> = 0 holds as an operator
// identity and ||gradient||^2 <= 8. laplacian() is the literal composition
// divergence(gradient(u)).
//
// All functions are pure: they read immutable inputs and fill fresh (or
// caller-provided) outputs, so they are safe to call from any number of
// threads. The *_into variants exist so solvers can reuse buffers.

namespace osmofuse {

void gradient_into(const ScalarField& u, VectorField& out);
void divergence_into(const VectorField& p, ScalarField& out);
void laplacian_into(const ScalarField& u, ScalarField& out, VectorField& scratch);

VectorField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& p);
ScalarField laplacian(const ScalarField& u);

/// Power-iteration estimate of the squared operator norm of the forward
/// difference gradient on a height x width grid. The Rayleigh quotient of a
/// symmetric PSD operator never exceeds its top eigenvalue, so the estimate
/// is <= 8 up to rounding. Throws NumericError if the iteration does not
/// settle within the cap.
double operator_norm_sq_estimate(int height, int width);

} // namespace osmofuse

#endif
