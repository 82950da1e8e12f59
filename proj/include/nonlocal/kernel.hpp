#pragma once

#include "nonlocal/errors.hpp"
#include "nonlocal/interval.hpp"

namespace nonlocal {

/// Fractional order s in (0,1) together with the space dimension n.
/// Assembly and sampling are implemented for n = 1; the constant c_{n,s}
/// is available for general n.
struct FracOrder {
    double s;
    int dim = 1;

    explicit FracOrder(double s_, int dim_ = 1) : s(s_), dim(dim_) {
        if (!(s > 0.0 && s < 1.0)) throw ValidationError("fractional order s must lie in (0,1)");
        if (dim < 1) throw ValidationError("dimension must be >= 1");
    }
};

/// Normalization constant of the fractional Laplacian with Fourier symbol
/// |xi|^{2s}:  c_{n,s} = 2^{2s} s Gamma(n/2+s) / (pi^{n/2} Gamma(1-s)).
/// Satisfies c_{1,s}/(1-s) -> 2 as s -> 1.
double c_norm(int n, double s);

struct KernelConstants {
    double c_ns;
    double s;
    int dim;
};

inline KernelConstants kernel_constants(int n, double s) {
    return {c_norm(n, s), s, n};
}

/// Kernel value c_{n,s} |x-y|^{-n-2s}. Throws on x == y (singular).
double kernel_eval(double x, double y, double s, int n = 1);

/// Exterior weight w_{s,Omega}(x) = c_{1,s} * integral_Omega |x-y|^{-1-2s} dy
/// in closed form, for x strictly outside [a,b]. Refuses evaluation within
/// 1e-12 of the boundary where the value overflows; boundary limits are the
/// job of boundary_kappa.
double exterior_mass(double x, const Interval& omega, double s);

/// Closed-form antiderivatives and moment integrals of the 1D kernel family
/// r^{-1-2s}, r^{-2s}, r^{1-2s}. These back every singular integral in the
/// assembly, the tail closures, and the return-law CDFs of the sampler.
class KernelPrimitives {
public:
    explicit KernelPrimitives(double s);

    double s() const { return s_; }

    /// integral_lo^hi r^alpha dr for 0 <= lo < hi, with the logarithmic
    /// branch at alpha = -1. lo = 0 requires alpha > -1.
    static double int_pow(double lo, double hi, double alpha);

    /// Antiderivative of r^{-1-2s} evaluated at r > 0.
    double primitive_kernel(double r) const;
    /// Antiderivative of r^{-2s} (logarithmic branch at s = 1/2).
    double primitive_kernel_r(double r) const;
    /// Antiderivative of r^{1-2s}.
    double primitive_kernel_r2(double r) const;

    /// integral_lo^hi r^{-1-2s} dr, 0 < lo < hi.
    double int_kernel(double lo, double hi) const { return int_pow(lo, hi, -1.0 - 2.0 * s_); }
    /// integral_lo^hi r^{-2s} dr.
    double int_kernel_r(double lo, double hi) const { return int_pow(lo, hi, -2.0 * s_); }
    /// integral_lo^hi r^{1-2s} dr.
    double int_kernel_r2(double lo, double hi) const { return int_pow(lo, hi, 1.0 - 2.0 * s_); }

    /// integral_R^infinity r^{-1-2s} dr = R^{-2s} / (2s).
    double tail(double R) const;

    /// Moment integral over adjacent touching cells of equal width h:
    ///   integral_0^h integral_0^h xi^p eta^q (xi+eta)^{-1-2s} deta dxi,
    /// for p + q >= 1. Evaluated by splitting the square along the diagonal,
    /// which makes each triangle separable.
    double adjacent_moment(int p, int q, double h) const;

    /// integral over (0,h)^2 of |x-y|^{1-2s} dx dy (same-cell energy weight).
    double same_cell_energy(double h) const;

private:
    double s_;
    double g0_, g1_, g2_;  // integral_0^1 tau^q (1+tau)^{-1-2s} dtau, q = 0,1,2
};

inline KernelPrimitives analytic_primitives(double s) { return KernelPrimitives(s); }

}  // namespace nonlocal
