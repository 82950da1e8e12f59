#pragma once

#include "nonlocal/mesh.hpp"

#include <functional>

// Independent numerical oracles used by the test suites. These deliberately
// avoid the closed-form primitive layer they are checking: everything here
// is plain adaptive/graded quadrature or spectral evaluation.
namespace oracles {

using Fn = std::function<double(double)>;

/// Adaptive Simpson integration.
double simpson(const Fn& f, double a, double b, double tol = 1e-12, int max_depth = 48);

/// Composite Gauss over dyadic panels graded toward `edge`; never evaluates
/// the endpoints, so algebraic endpoint singularities integrate cleanly.
double graded_1d(const Fn& f, double a, double b, double edge, int order = 12, int levels = 80);

/// iint over [ax0,ax1] x [bx0,bx1] of f(x,y), with dyadic refinement toward
/// the closest-approach corner of the two intervals (for kernel integrands
/// that are steep or singular where the intervals meet).
double pair_integral(const std::function<double(double, double)>& f, double ax0, double ax1,
                     double bx0, double bx1, int order = 12, int levels = 36);

/// Dense tensor Gauss of a pair integrand at a given order (no grading);
/// the assembly oracle for well-separated cell pairs.
double pair_gauss(const std::function<double(double, double)>& f, double ax0, double ax1,
                  double bx0, double bx1, int order);

/// (-Delta)^s f at point x via a discrete Fourier transform on a wide
/// periodic box [-L, L] with n samples; valid for rapidly decaying f.
double dft_fraclap(const Fn& f, double s, double x, double L = 16.0, int n = 4096);

/// Raw double integral iint_{R^2 \ (COmega)^2} (u(x)-u(y))^2 |x-y|^{-1-2s}
/// for a discrete field, by graded pairwise quadrature over the mesh cells,
/// ramps, and analytic-free tail handling via wide padding cells.
double energy_direct(const nonlocal::Field& u, double s, int order = 10);

}  // namespace oracles
