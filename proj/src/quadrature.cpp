#include "nonlocal/quadrature.hpp"

#include "nonlocal/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace nonlocal {

namespace {

GaussRule compute_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return rule;
}

std::map<int, GaussRule> g_rules;
std::mutex g_rules_mutex;

}  // namespace

const GaussRule& gauss_rule(int order) {
    if (order < 1) throw ValidationError("gauss_rule: order must be >= 1");
    std::lock_guard<std::mutex> lock(g_rules_mutex);
    auto it = g_rules.find(order);
    if (it == g_rules.end()) it = g_rules.emplace(order, compute_rule(order)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule& rule = gauss_rule(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

namespace {

double adaptive_impl(const std::function<double(double)>& f, double a, double b, double coarse,
                     double tol, int order, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_integrate(f, a, mid, order);
    const double right = gauss_integrate(f, mid, b, order);
    const double fine = left + right;
    if (depth <= 0 || std::abs(fine - coarse) <= tol * (std::abs(fine) + 1e-300)) return fine;
    return adaptive_impl(f, a, mid, left, tol, order, depth - 1) +
           adaptive_impl(f, mid, b, right, tol, order, depth - 1);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int order, int max_depth) {
    if (a == b) return 0.0;
    const double coarse = gauss_integrate(f, a, b, order);
    return adaptive_impl(f, a, b, coarse, rel_tol, order, max_depth);
}

double graded_integrate(const std::function<double(double)>& f, double a, double b, double edge,
                        int order, int levels) {
    if (a == b) return 0.0;
    const double len = b - a;
    double sum = 0.0;
    if (edge == b) {
        // Panels [b - len 2^{-k-1}, b - len 2^{-k-2}] shrinking toward b.
        double hi = a + 0.5 * len;
        sum += gauss_integrate(f, a, hi, order);
        for (int k = 0; k < levels; ++k) {
            const double next = b - (b - hi) * 0.5;
            sum += gauss_integrate(f, hi, next, order);
            hi = next;
        }
        sum += gauss_integrate(f, hi, b, order);
    } else if (edge == a) {
        double lo = b - 0.5 * len;
        sum += gauss_integrate(f, lo, b, order);
        for (int k = 0; k < levels; ++k) {
            const double next = a + (lo - a) * 0.5;
            sum += gauss_integrate(f, next, lo, order);
            lo = next;
        }
        sum += gauss_integrate(f, a, lo, order);
    } else {
        throw ValidationError("graded_integrate: edge must coincide with an endpoint");
    }
    return sum;
}

double richardson_limit(const std::vector<double>& eps, const std::vector<double>& y) {
    if (eps.size() != y.size() || y.empty()) {
        throw ValidationError("richardson_limit: mismatched or empty sequences");
    }
    const size_t n = y.size();
    if (n < 3) return y.back();
    const double y0 = y[n - 3], y1 = y[n - 2], y2 = y[n - 1];
    const double d0 = y1 - y0, d1 = y2 - y1;
    const double ratio = eps[n - 2] / eps[n - 3];  // < 1 for decreasing eps
    if (d0 == 0.0 || d1 == 0.0 || d1 / d0 <= 0.0) return y2;
    // y(eps) = L + C eps^p  =>  d1/d0 = ratio^p.
    const double p = std::log(d1 / d0) / std::log(ratio);
    if (!(p > 0.0) || !std::isfinite(p)) return y2;
    const double r2 = eps[n - 1] / eps[n - 2];
    const double factor = std::pow(r2, p);
    return y2 + d1 * factor / (1.0 - factor);
}

}  // namespace nonlocal
