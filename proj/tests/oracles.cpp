#include "oracles.hpp"

#include "nonlocal/quadrature.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace oracles {

namespace {

double simpson_rule(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_impl(const Fn& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_rule(a, m, fa, flm, fm);
    const double right = simpson_rule(m, b, fm, frm, fb);
    if (depth <= 0 ||
        std::abs(left + right - whole) <= 15.0 * tol * (std::abs(left + right) + 1e-300)) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_impl(f, a, m, fa, flm, fm, left, tol, depth - 1) +
           simpson_impl(f, m, b, fm, frm, fb, right, tol, depth - 1);
}

}  // namespace

double simpson(const Fn& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson_rule(a, b, fa, fm, fb);
    return simpson_impl(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace {

// Dyadic panels of [x0, x1], graded toward `edge` (one of the endpoints).
std::vector<std::pair<double, double>> graded_panels(double x0, double x1, double edge,
                                                     int levels) {
    std::vector<std::pair<double, double>> panels;
    if (edge == x1) {
        double hi = x0 + 0.5 * (x1 - x0);
        panels.emplace_back(x0, hi);
        for (int k = 0; k < levels; ++k) {
            const double next = x1 - 0.5 * (x1 - hi);
            panels.emplace_back(hi, next);
            hi = next;
        }
        panels.emplace_back(hi, x1);
    } else {
        double lo = x1 - 0.5 * (x1 - x0);
        panels.emplace_back(lo, x1);
        for (int k = 0; k < levels; ++k) {
            const double next = x0 + 0.5 * (lo - x0);
            panels.emplace_back(next, lo);
            lo = next;
        }
        panels.emplace_back(x0, lo);
    }
    return panels;
}

}  // namespace

double graded_1d(const Fn& f, double a, double b, double edge, int order, int levels) {
    if (!(b > a)) return 0.0;
    const auto panels = graded_panels(a, b, edge, levels);
    const nonlocal::GaussRule& gr = nonlocal::gauss_rule(order);
    double acc = 0.0;
    for (const auto& p : panels) {
        if (!(p.second > p.first)) continue;
        const double mid = 0.5 * (p.first + p.second), half = 0.5 * (p.second - p.first);
        for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
            acc += gr.weights[q] * half * f(mid + half * gr.nodes[q]);
        }
    }
    return acc;
}

double pair_gauss(const std::function<double(double, double)>& f, double ax0, double ax1,
                  double bx0, double bx1, int order) {
    const nonlocal::GaussRule& gr = nonlocal::gauss_rule(order);
    const double ma = 0.5 * (ax0 + ax1), ha = 0.5 * (ax1 - ax0);
    const double mb = 0.5 * (bx0 + bx1), hb = 0.5 * (bx1 - bx0);
    double acc = 0.0;
    for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
        const double x = ma + ha * gr.nodes[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < gr.nodes.size(); ++j) {
            inner += gr.weights[j] * f(x, mb + hb * gr.nodes[j]);
        }
        acc += gr.weights[i] * inner;
    }
    return acc * ha * hb;
}

double pair_integral(const std::function<double(double, double)>& f, double ax0, double ax1,
                     double bx0, double bx1, int order, int levels) {
    // Grade each interval toward its endpoint closest to the other interval.
    const double edge_a = (bx0 >= ax1) ? ax1 : ax0;
    const double edge_b = (bx0 >= ax1) ? bx0 : bx1;
    const auto panels_a = graded_panels(ax0, ax1, edge_a, levels);
    const auto panels_b = graded_panels(bx0, bx1, edge_b, levels);
    double acc = 0.0;
    for (const auto& pa : panels_a) {
        for (const auto& pb : panels_b) {
            acc += pair_gauss(f, pa.first, pa.second, pb.first, pb.second, order);
        }
    }
    return acc;
}

double dft_fraclap(const Fn& f, double s, double x, double L, int n) {
    const double dx = 2.0 * L / n;
    std::vector<double> samples(n);
    for (int j = 0; j < n; ++j) samples[j] = f(-L + j * dx);

    std::complex<double> acc(0.0, 0.0);
    for (int k = -n / 2; k < n / 2; ++k) {
        const double xi = M_PI * k / L;
        std::complex<double> hat(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            const double arg = -xi * (-L + j * dx);
            hat += samples[j] * std::complex<double>(std::cos(arg), std::sin(arg));
        }
        hat *= dx;
        const double arg = xi * x;
        acc += std::pow(std::abs(xi), 2.0 * s) * hat *
               std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return acc.real() / (2.0 * L);
}

double energy_direct(const nonlocal::Field& u, double s, int order) {
    const nonlocal::Mesh& m = u.mesh();
    const double h = m.h();
    const double lo = m.node(0), hi = m.node(m.node_count() - 1);
    const double expo = -1.0 - 2.0 * s;

    struct Seg {
        double x0, x1;
        bool inside;
        double slope;
    };
    std::vector<Seg> segs;
    segs.push_back({lo - h, lo, false, (u.values[0] - u.farfield) / h});
    for (int c = 0; c < m.cell_count(); ++c) {
        segs.push_back({m.cell_left(c), m.cell_right(c), m.cell_inside(c),
                        (u.values[c + 1] - u.values[c]) / h});
    }
    segs.push_back({hi, hi + h, false, (u.farfield - u.values[m.node_count() - 1]) / h});

    auto integrand = [&](double x, double y) {
        const double d = u(x) - u(y);
        return d * d * std::pow(std::abs(x - y), expo);
    };

    double acc = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = 0; j < segs.size(); ++j) {
            if (!segs[i].inside && !segs[j].inside) continue;
            const Seg& A = segs[i];
            const Seg& B = segs[j];
            if (i == j) {
                // u is affine on one cell: the integrand reduces to
                // slope^2 |x-y|^{1-2s}, a single radial integral.
                const double len = A.x1 - A.x0;
                acc += A.slope * A.slope * 2.0 *
                       simpson([&](double r) { return (len - r) * std::pow(r, 1.0 - 2.0 * s); },
                               0.0, len, 1e-13);
                continue;
            }
            acc += pair_integral(integrand, A.x0, A.x1, B.x0, B.x1, order);
        }
    }

    // Interaction of interior cells with the two constant tails, via a
    // rational change of variables mapping the half-line onto (0,1).
    const nonlocal::GaussRule& gr = nonlocal::gauss_rule(order + 4);
    for (const Seg& A : segs) {
        if (!A.inside) continue;
        for (int side = 0; side < 2; ++side) {
            const double edge = side == 0 ? lo - h : hi + h;
            auto outer = [&](double x) {
                double inner = 0.0;
                for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
                    const double tau = 0.5 + 0.5 * gr.nodes[q];
                    const double t = tau / (1.0 - tau);
                    const double y = side == 0 ? edge - t : edge + t;
                    const double jac = 1.0 / ((1.0 - tau) * (1.0 - tau));
                    const double d = u(x) - u.farfield;
                    inner += 0.5 * gr.weights[q] * d * d * std::pow(std::abs(x - y), expo) * jac;
                }
                return inner;
            };
            // Counted twice: (x in Omega, y in tail) and the swapped order.
            acc += 2.0 * simpson(outer, A.x0, A.x1, 1e-12);
        }
    }
    return acc;
}

}  // namespace oracles
