#include "nonlocal/kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nonlocal {

double c_norm(int n, double s) {
    if (n < 1) throw ValidationError("c_norm: dimension must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("c_norm: s must lie in (0,1)");
    const double num = std::pow(2.0, 2.0 * s) * s * std::tgamma(0.5 * n + s);
    const double den = std::pow(M_PI, 0.5 * n) * std::tgamma(1.0 - s);
    return num / den;
}

double kernel_eval(double x, double y, double s, int n) {
    if (x == y) throw ValidationError("kernel_eval: singular at x == y");
    if (n != 1) throw ValidationError("kernel_eval: only n = 1 point kernels are implemented");
    const double r = std::abs(x - y);
    return c_norm(n, s) * std::pow(r, -1.0 - 2.0 * s);
}

double exterior_mass(double x, const Interval& omega, double s) {
    const double d = omega.dist(x);
    if (omega.contains_closed(x) || d < 1e-12) {
        throw ValidationError("exterior_mass: point must lie strictly outside the closed interval "
                              "(at least 1e-12 away from the boundary)");
    }
    const double d_near = d;
    const double d_far = d + omega.length();
    const double c = c_norm(1, s);
    return c * (std::pow(d_near, -2.0 * s) - std::pow(d_far, -2.0 * s)) / (2.0 * s);
}

double KernelPrimitives::int_pow(double lo, double hi, double alpha) {
    if (!(lo >= 0.0 && hi > lo)) throw ValidationError("int_pow: requires 0 <= lo < hi");
    const double ap1 = alpha + 1.0;
    if (std::abs(ap1) < 1e-12) {
        if (lo <= 0.0) throw ValidationError("int_pow: divergent at lo = 0 for alpha = -1");
        return std::log(hi / lo);
    }
    if (lo == 0.0) {
        if (ap1 <= 0.0) throw ValidationError("int_pow: divergent at lo = 0 for alpha <= -1");
        return std::pow(hi, ap1) / ap1;
    }
    // lo^{a+1} * expm1((a+1) log(hi/lo)) / (a+1): stable when hi/lo is close to 1.
    return std::pow(lo, ap1) * std::expm1(ap1 * std::log(hi / lo)) / ap1;
}

KernelPrimitives::KernelPrimitives(double s) : s_(s) {
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("analytic_primitives: s must lie in (0,1)");
    // G(q) = integral_0^1 tau^q (1+tau)^{-1-2s} dtau, via w = 1 + tau.
    const double j_m1m2s = int_pow(1.0, 2.0, -1.0 - 2.0 * s_);
    const double j_m2s = int_pow(1.0, 2.0, -2.0 * s_);
    const double j_1m2s = int_pow(1.0, 2.0, 1.0 - 2.0 * s_);
    g0_ = j_m1m2s;
    g1_ = j_m2s - j_m1m2s;
    g2_ = j_1m2s - 2.0 * j_m2s + j_m1m2s;
}

double KernelPrimitives::primitive_kernel(double r) const {
    return -std::pow(r, -2.0 * s_) / (2.0 * s_);
}

double KernelPrimitives::primitive_kernel_r(double r) const {
    const double e = 1.0 - 2.0 * s_;
    if (std::abs(e) < 1e-12) return std::log(r);
    return std::pow(r, e) / e;
}

double KernelPrimitives::primitive_kernel_r2(double r) const {
    const double e = 2.0 - 2.0 * s_;
    return std::pow(r, e) / e;
}

double KernelPrimitives::tail(double R) const {
    if (!(R > 0.0)) throw ValidationError("tail: radius must be positive");
    return std::pow(R, -2.0 * s_) / (2.0 * s_);
}

double KernelPrimitives::adjacent_moment(int p, int q, double h) const {
    if (p < 0 || q < 0 || p > 2 || q > 2 || p + q < 1 || p + q > 3) {
        throw ValidationError("adjacent_moment: supported moments have p,q in {0,1,2}, 1 <= p+q <= 3");
    }
    const double g[3] = {g0_, g1_, g2_};
    const double radial = int_pow(0.0, h, static_cast<double>(p + q) - 2.0 * s_);
    return radial * (g[p] + g[q]);
}

double KernelPrimitives::same_cell_energy(double h) const {
    return 2.0 * (h * int_pow(0.0, h, 1.0 - 2.0 * s_) - int_pow(0.0, h, 2.0 - 2.0 * s_));
}

}  // namespace nonlocal
