#pragma once

#include <functional>
#include <vector>

namespace nonlocal {

/// Gauss-Legendre rule on [-1, 1]. Rules are computed once per order by
/// Newton iteration on the Legendre polynomial and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_rule(int order);

/// integral_a^b f via a single Gauss rule of the given order.
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order);

/// Adaptive integration by interval bisection with an embedded
/// Gauss(order)/Gauss(2*order) error estimate.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, int order = 10, int max_depth = 40);

/// integral_a^b f where f may be steep near the endpoint `edge` (= a or b):
/// splits the interval into geometrically graded panels toward the edge and
/// applies Gauss on each. Exact-to-rounding for the algebraic endpoint
/// behavior of kernel integrands.
double graded_integrate(const std::function<double(double)>& f, double a, double b, double edge,
                        int order = 12, int levels = 60);

/// Exponent-fitted Richardson extrapolation of y(eps) -> y(0) on a
/// geometrically decreasing sequence eps_k (ratios need not be exactly 2).
/// Uses the last three points to fit the leading error exponent; falls back
/// to the last value if the sequence is too short or degenerate.
double richardson_limit(const std::vector<double>& eps, const std::vector<double>& y);

}  // namespace nonlocal
