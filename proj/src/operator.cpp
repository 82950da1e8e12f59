#include "nonlocal/operator.hpp"

#include "nonlocal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace nonlocal {

namespace {

// Assembly cell: the mesh cells, one virtual ramp cell per side carrying the
// far-field basis ramp, and two half-infinite tail regions where the field
// is identically the far-field value.
struct ACell {
    enum Kind { Regular, LeftTail, RightTail };
    Kind kind = Regular;
    double x0 = 0.0, x1 = 0.0;  // tails: only the finite edge is meaningful
    int dof_left = -1, dof_right = -1;
    bool inside = false;
};

std::vector<ACell> build_cells(const Mesh& mesh) {
    std::vector<ACell> cells;
    const int nc = mesh.cell_count();
    const int nn = mesh.node_count();
    const int ff = mesh.farfield_dof();
    const double lo = mesh.node(0);
    const double hi = mesh.node(nn - 1);
    const double h = mesh.h();
    cells.reserve(nc + 4);
    cells.push_back({ACell::LeftTail, 0.0, lo - h, ff, -1, false});
    cells.push_back({ACell::Regular, lo - h, lo, ff, 0, false});
    for (int c = 0; c < nc; ++c) {
        cells.push_back({ACell::Regular, mesh.cell_left(c), mesh.cell_right(c), c, c + 1,
                         mesh.cell_inside(c)});
    }
    cells.push_back({ACell::Regular, hi, hi + h, nn - 1, ff, false});
    cells.push_back({ACell::RightTail, hi + h, 0.0, ff, -1, false});
    return cells;
}

// Cell indices (into the build_cells vector) where a DOF has support.
std::vector<std::vector<int>> build_dof_cells(const Mesh& mesh, const std::vector<ACell>& cells) {
    std::vector<std::vector<int>> dof_cells(mesh.dof_count());
    for (int ci = 0; ci < static_cast<int>(cells.size()); ++ci) {
        if (cells[ci].dof_left >= 0) dof_cells[cells[ci].dof_left].push_back(ci);
        if (cells[ci].dof_right >= 0) dof_cells[cells[ci].dof_right].push_back(ci);
    }
    return dof_cells;
}

struct PairScratch {
    int locals[4];
    int nloc = 0;
    double e[4][4];

    void reset() {
        nloc = 0;
        for (auto& row : e)
            for (double& v : row) v = 0.0;
    }
    int add(int dof) {
        for (int k = 0; k < nloc; ++k) {
            if (locals[k] == dof) return k;
        }
        locals[nloc] = dof;
        return nloc++;
    }
};

[[noreturn]] void throw_pair_failure(const ACell& c1, const ACell& c2) {
    std::ostringstream msg;
    msg << "assemble: non-finite contribution for cell pair [" << c1.x0 << ", " << c1.x1 << "] x ["
        << c2.x0 << ", " << c2.x1 << "]";
    throw NumericalError(msg.str());
}

// iint_{c1 x c2} (phi_i(x)-phi_i(y)) (phi_j(x)-phi_j(y)) |x-y|^{-1-2s},
// raw kernel, for the local DOFs of the pair.
void pair_elemental(const ACell& c1, const ACell& c2, double s, const KernelPrimitives& prim,
                    const AssemblyOptions& opts, PairScratch& ps) {
    ps.reset();
    const double expo = -1.0 - 2.0 * s;

    const bool tail1 = c1.kind != ACell::Regular;
    const bool tail2 = c2.kind != ACell::Regular;
    if (tail1 || tail2) {
        // One factor is a tail region; the other must be an interior cell.
        const ACell& tail = tail1 ? c1 : c2;
        const ACell& cell = tail1 ? c2 : c1;
        const double edge = tail.kind == ACell::LeftTail ? tail.x1 : tail.x0;
        const int lL = ps.add(cell.dof_left);
        const int lR = ps.add(cell.dof_right);
        const int lF = ps.add(tail.dof_left);
        const double len = cell.x1 - cell.x0;
        const GaussRule& gr = gauss_rule(std::max(opts.quad_order + 2, 8));
        const double mid = 0.5 * (cell.x0 + cell.x1), half = 0.5 * len;
        for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
            const double x = mid + half * gr.nodes[q];
            const double w = gr.weights[q] * half * prim.tail(std::abs(x - edge));
            double t[3] = {0.0, 0.0, 0.0};
            t[lL] += (cell.x1 - x) / len;
            t[lR] += (x - cell.x0) / len;
            t[lF] += -1.0;  // far-field basis is 1 on the tail, 0 on Omega
            for (int i = 0; i < ps.nloc; ++i)
                for (int j = 0; j < ps.nloc; ++j) ps.e[i][j] += w * t[i] * t[j];
        }
        return;
    }

    const double len1 = c1.x1 - c1.x0;
    const double len2 = c2.x1 - c2.x0;

    if (c1.x0 == c2.x0 && c1.x1 == c2.x1) {
        // Same cell: phi_i(x)-phi_i(y) = m_i (x-y) exactly.
        const int lL = ps.add(c1.dof_left);
        const int lR = ps.add(c1.dof_right);
        const double w = prim.same_cell_energy(len1);
        double m[2] = {0.0, 0.0};
        m[lL] += -1.0 / len1;
        m[lR] += 1.0 / len1;
        for (int i = 0; i < ps.nloc; ++i)
            for (int j = 0; j < ps.nloc; ++j) ps.e[i][j] += w * m[i] * m[j];
        return;
    }

    const bool touching = (c1.x1 == c2.x0) || (c2.x1 == c1.x0);
    if (touching) {
        // Orient as left cell L ending at the shared vertex, right cell R.
        const ACell& L = (c1.x1 == c2.x0) ? c1 : c2;
        const ACell& R = (c1.x1 == c2.x0) ? c2 : c1;
        const double h = L.x1 - L.x0;
        const int lLL = ps.add(L.dof_left);
        const int lLR = ps.add(L.dof_right);
        const int lRL = ps.add(R.dof_left);
        const int lRR = ps.add(R.dof_right);
        double sL[4] = {0, 0, 0, 0}, sR[4] = {0, 0, 0, 0};
        sL[lLL] += -1.0 / h;
        sL[lLR] += 1.0 / h;
        sR[lRL] += -1.0 / h;
        sR[lRR] += 1.0 / h;
        const double i20 = prim.adjacent_moment(2, 0, h);
        const double i11 = prim.adjacent_moment(1, 1, h);
        for (int i = 0; i < ps.nloc; ++i) {
            for (int j = 0; j < ps.nloc; ++j) {
                ps.e[i][j] += sL[i] * sL[j] * i20 + (sL[i] * sR[j] + sR[i] * sL[j]) * i11 +
                              sR[i] * sR[j] * i20;
            }
        }
        return;
    }

    // Separated pair: tensor Gauss, boosted order when the gap is small.
    const double gap = (c2.x0 > c1.x1) ? c2.x0 - c1.x1 : c1.x0 - c2.x1;
    const double href = std::min(len1, len2);
    const int q = (gap < opts.near_window * href) ? opts.near_quad_order : opts.quad_order;
    const GaussRule& gr = gauss_rule(q);
    const int l1L = ps.add(c1.dof_left);
    const int l1R = ps.add(c1.dof_right);
    const int l2L = ps.add(c2.dof_left);
    const int l2R = ps.add(c2.dof_right);
    const double mid1 = 0.5 * (c1.x0 + c1.x1), half1 = 0.5 * len1;
    const double mid2 = 0.5 * (c2.x0 + c2.x1), half2 = 0.5 * len2;
    for (std::size_t qa = 0; qa < gr.nodes.size(); ++qa) {
        const double x = mid1 + half1 * gr.nodes[qa];
        const double p1L = (c1.x1 - x) / len1;
        const double p1R = (x - c1.x0) / len1;
        for (std::size_t qb = 0; qb < gr.nodes.size(); ++qb) {
            const double y = mid2 + half2 * gr.nodes[qb];
            const double w =
                gr.weights[qa] * gr.weights[qb] * half1 * half2 * std::pow(std::abs(x - y), expo);
            double g[4] = {0, 0, 0, 0};
            g[l1L] += p1L;
            g[l1R] += p1R;
            g[l2L] -= (c2.x1 - y) / len2;
            g[l2R] -= (y - c2.x0) / len2;
            for (int i = 0; i < ps.nloc; ++i)
                for (int j = 0; j < ps.nloc; ++j) ps.e[i][j] += w * g[i] * g[j];
        }
    }
}

Eigen::MatrixXd assemble_form(const Mesh& mesh, double s, const AssemblyOptions& opts,
                              bool regional) {
    if (opts.quad_order < 2) throw ValidationError("assemble: quadrature order must be >= 2");
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("assemble: s must lie in (0,1)");

    const KernelPrimitives prim(s);
    const std::vector<ACell> cells = build_cells(mesh);
    const std::vector<std::vector<int>> dof_cells = build_dof_cells(mesh, cells);
    const int ncells = static_cast<int>(cells.size());
    const int dim = mesh.dof_count();
    const double scale = regional ? 1.0 : 0.5 * c_norm(1, s);

    auto admissible = [&](const ACell& a, const ACell& b) {
        return regional ? (a.inside && b.inside) : (a.inside || b.inside);
    };

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);

    auto process_row = [&](int r, PairScratch& ps) {
        auto touches_r = [&](int ci) {
            return cells[ci].dof_left == r || cells[ci].dof_right == r;
        };
        auto accumulate = [&](int i1, int i2) {
            const ACell& c1 = cells[i1];
            const ACell& c2 = cells[i2];
            if (!admissible(c1, c2)) return;
            pair_elemental(c1, c2, s, prim, opts, ps);
            int lr = -1;
            for (int k = 0; k < ps.nloc; ++k) {
                if (ps.locals[k] == r) lr = k;
            }
            if (lr < 0) return;
            for (int k = 0; k < ps.nloc; ++k) {
                const int col = ps.locals[k];
                if (col < r) continue;
                const double v = scale * ps.e[lr][k];
                if (!std::isfinite(v)) throw_pair_failure(c1, c2);
                B(r, col) += v;
            }
        };
        for (int c1 : dof_cells[r]) {
            for (int c2 = 0; c2 < ncells; ++c2) accumulate(c1, c2);
        }
        for (int c2 : dof_cells[r]) {
            for (int c1 = 0; c1 < ncells; ++c1) {
                if (touches_r(c1)) continue;  // already handled above
                accumulate(c1, c2);
            }
        }
    };

    const int threads = std::max(1, opts.threads);
    if (threads == 1) {
        PairScratch ps;
        for (int r = 0; r < dim; ++r) process_row(r, ps);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                try {
                    PairScratch ps;
                    for (int r = t; r < dim; r += threads) process_row(r, ps);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    // Mirror the upper triangle; each entry was accumulated exactly once.
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) B(j, i) = B(i, j);
    }
    return B;
}

}  // namespace

DiscreteOperator DiscreteOperator::assemble(const Mesh& mesh, double s,
                                            const AssemblyOptions& opts) {
    DiscreteOperator op;
    op.mesh_ = mesh;
    op.s_ = s;
    op.c_ = c_norm(1, s);
    op.quad_order_ = opts.quad_order;
    op.B_ = assemble_form(mesh, s, opts, /*regional=*/false);

    const int dim = mesh.dof_count();
    op.M_ = Eigen::MatrixXd::Zero(dim, dim);
    const double h = mesh.h();
    for (int c = 0; c < mesh.cell_count(); ++c) {
        if (!mesh.cell_inside(c)) continue;
        const int i = c, j = c + 1;
        op.M_(i, i) += h / 3.0;
        op.M_(j, j) += h / 3.0;
        op.M_(i, j) += h / 6.0;
        op.M_(j, i) += h / 6.0;
    }
    return op;
}

Eigen::MatrixXd assemble_regional(const Mesh& mesh, double s, const AssemblyOptions& opts) {
    return assemble_form(mesh, s, opts, /*regional=*/true);
}

namespace {

struct CellMoments {
    double m0 = 0.0;  // int |x-y|^{-1-2s} dy over the cell
    double m1 = 0.0;  // int (y-y0) |x-y|^{-1-2s} dy
};

CellMoments point_cell_moments(double x, double y0, double y1, const KernelPrimitives& prim) {
    CellMoments cm;
    if (x >= y1) {
        const double t0 = x - y1, t1 = x - y0;
        cm.m0 = prim.int_kernel(t0, t1);
        cm.m1 = (x - y0) * cm.m0 - prim.int_kernel_r(t0, t1);
    } else if (x <= y0) {
        const double t0 = y0 - x, t1 = y1 - x;
        cm.m0 = prim.int_kernel(t0, t1);
        cm.m1 = prim.int_kernel_r(t0, t1) - (y0 - x) * cm.m0;
    } else {
        throw ValidationError("point_cell_moments: point inside the cell");
    }
    return cm;
}

// W = int_Omega |x-y|^{-1-2s} dy and S = int_Omega u_h(y) |x-y|^{-1-2s} dy
// (raw kernel) for a discrete field, cell by cell in closed form.
void interior_sums(const Field& u, double x, const KernelPrimitives& prim, double& W, double& S) {
    const Mesh& m = u.mesh();
    const double h = m.h();
    W = 0.0;
    S = 0.0;
    for (int c = 0; c < m.cell_count(); ++c) {
        if (!m.cell_inside(c)) continue;
        const CellMoments cm = point_cell_moments(x, m.cell_left(c), m.cell_right(c), prim);
        const double jr = cm.m1 / h;
        const double jl = cm.m0 - jr;
        W += cm.m0;
        S += u.values[c] * jl + u.values[c + 1] * jr;
    }
}

}  // namespace

double eval_fraclap(const Field& u, double s, double x) {
    const Mesh& m = u.mesh();
    const Interval& omega = m.omega();
    const double h = m.h();
    if (!(x - omega.a >= 2.0 * h - 1e-12 && omega.b - x >= 2.0 * h - 1e-12)) {
        throw ValidationError("eval_fraclap: x must lie in Omega at least 2h from the boundary");
    }
    const int i0 = static_cast<int>(std::round((x - m.node(0)) / h));
    if (std::abs(m.node(i0) - x) > 1e-9 * h) {
        throw ValidationError("eval_fraclap: x must coincide with a grid vertex");
    }
    const KernelPrimitives prim(s);
    const double ux = u.values[i0];

    // Symmetric pairing: (-Delta)^s u(x) = c int_0^inf D(r) r^{-1-2s} dr with
    // D(r) = 2u(x) - u(x+r) - u(x-r). D is sampled exactly on the lattice jh
    // (x is a vertex, so x +- jh hit vertices, ramp edges, or the constant
    // tails). D vanishes to second order at r = 0; the first panel uses the
    // quadratic model D1 (r/h)^2, later panels a three-point quadratic
    // reconstruction, and beyond the tail edges D is a constant.
    const double r_far =
        std::max(x - m.left_tail_edge(), m.right_tail_edge() - x);
    const int J = static_cast<int>(std::ceil(r_far / h - 1e-12)) + 1;
    std::vector<double> D(J + 2);
    D[0] = 0.0;
    for (int j = 1; j <= J + 1; ++j) {
        D[j] = 2.0 * ux - u(x + j * h) - u(x - j * h);
    }

    double total = D[1] * std::pow(h, -2.0 * s) / (2.0 - 2.0 * s);
    for (int j = 1; j <= J; ++j) {
        const double r0 = (j - 1) * h, r1 = j * h, r2 = (j + 1) * h;
        // Newton form on (r0, r1, r2), integrated over [r1, r2].
        const double a1 = (D[j] - D[j - 1]) / h;
        const double a2 = (D[j + 1] - 2.0 * D[j] + D[j - 1]) / (2.0 * h * h);
        const double p0 = prim.int_kernel(r1, r2);
        const double q1 = prim.int_kernel_r(r1, r2);
        const double q2 = prim.int_kernel_r2(r1, r2);
        const double e1 = q1 - r0 * p0;                                // int (r-r0) K
        const double e2 = q2 - (r0 + r1) * q1 + r0 * r1 * p0;          // int (r-r0)(r-r1) K
        total += D[j - 1] * p0 + a1 * e1 + a2 * e2;
    }
    total += D[J + 1] * prim.tail((J + 1) * h);

    return c_norm(1, s) * total;
}

NeumannTrace neumann_trace(const Field& u, const std::vector<double>& points, double s) {
    const Interval& omega = u.mesh().omega();
    const KernelPrimitives prim(s);
    const double c = c_norm(1, s);
    NeumannTrace out;
    out.points = points;
    out.ns.reserve(points.size());
    out.ns_tilde.reserve(points.size());
    out.weight.reserve(points.size());
    for (double x : points) {
        if (omega.contains_closed(x)) {
            throw ValidationError("neumann_trace: points must lie outside [a,b]");
        }
        double W = 0.0, S = 0.0;
        interior_sums(u, x, prim, W, S);
        const double ux = u(x);
        out.ns.push_back(c * (ux * W - S));
        out.ns_tilde.push_back((ux * W - S) / W);
        out.weight.push_back(c * W);
    }
    return out;
}

std::vector<double> extend(const Field& interior_data, const std::vector<double>& points,
                           double s) {
    const Interval& omega = interior_data.mesh().omega();
    const KernelPrimitives prim(s);
    std::vector<double> out;
    out.reserve(points.size());
    for (double x : points) {
        if (omega.contains_closed(x)) {
            throw ValidationError("extend: points must lie outside [a,b]");
        }
        double W = 0.0, S = 0.0;
        interior_sums(interior_data, x, prim, W, S);
        out.push_back(S / W);
    }
    return out;
}

double neumann_trace_fn(const std::function<double(double)>& u, const Interval& omega, double x,
                        double s, int order) {
    if (omega.contains_closed(x)) {
        throw ValidationError("neumann_trace_fn: point must lie outside [a,b]");
    }
    const double c = c_norm(1, s);
    const double d = omega.dist(x);
    const double W = (std::pow(d, -2.0 * s) - std::pow(d + omega.length(), -2.0 * s)) / (2.0 * s);
    const double edge = (x > omega.b) ? omega.b : omega.a;
    const double expo = -1.0 - 2.0 * s;
    auto integrand = [&](double y) { return u(y) * std::pow(std::abs(x - y), expo); };
    const double S = graded_integrate(integrand, omega.a, omega.b, edge, order);
    return c * (u(x) * W - S);
}

double renormalized_trace_fn(const std::function<double(double)>& u, const Interval& omega,
                             double x, double s, int order) {
    const double w = exterior_mass(x, omega, s);
    return neumann_trace_fn(u, omega, x, s, order) / w;
}

double HsNormParts::value() const { return std::sqrt(l2_sq + weighted_sq + semi_sq); }

HsNormParts hs_norm(const DiscreteOperator& op, const Field& u,
                    const std::function<double(double)>& g) {
    const Mesh& m = op.mesh();
    const Eigen::VectorXd d = u.dofs();
    HsNormParts parts;
    parts.l2_sq = d.dot(op.mass() * d);
    parts.semi_sq = std::max(0.0, (2.0 / op.c()) * d.dot(op.bilinear() * d));
    double wsum = 0.0;
    for (int c = 0; c < m.cell_count(); ++c) {
        if (m.cell_inside(c)) continue;
        wsum += gauss_integrate(
            [&](double x) {
                const double ux = u(x);
                return std::abs(g(x)) * ux * ux;
            },
            m.cell_left(c), m.cell_right(c), 8);
    }
    parts.weighted_sq = wsum;
    return parts;
}

double fractional_perimeter(const Interval& omega, double s) {
    if (!(s > 0.0 && s < 0.5)) {
        throw ValidationError(
            "fractional_perimeter: requires s in (0, 1/2); the double integral diverges at s = 1/2");
    }
    const double L = omega.length();
    return c_norm(1, s) * std::pow(L, 1.0 - 2.0 * s) / (s * (1.0 - 2.0 * s));
}

double fractional_perimeter_quadrature(const Interval& omega, double s) {
    if (!(s > 0.0 && s < 0.5)) {
        throw ValidationError("fractional_perimeter_quadrature: requires s in (0, 1/2)");
    }
    const double L = omega.length();
    const double T = 10.0 * L;
    const double c = c_norm(1, s);
    // One side by deeply graded quadrature in the distance variable up to T,
    // then the analytic tail; the two sides are mirror images. Working in the
    // distance avoids cancellation against the absolute coordinate near the
    // boundary, where the weight is integrable for s < 1/2.
    auto w_dist = [&](double d) {
        return c * (std::pow(d, -2.0 * s) - std::pow(d + L, -2.0 * s)) / (2.0 * s);
    };
    const double finite = graded_integrate(w_dist, 0.0, T, 0.0, 14, 170);
    const double tail =
        c / (2.0 * s) * (std::pow(T + L, 1.0 - 2.0 * s) - std::pow(T, 1.0 - 2.0 * s)) /
        (1.0 - 2.0 * s);
    return 2.0 * (finite + tail);
}

IbpResiduals ibp_residuals(const DiscreteOperator& op, const Field& u, const Field& v) {
    const Mesh& m = op.mesh();
    const Eigen::VectorXd du = u.dofs();
    const Eigen::VectorXd dv = v.dofs();
    const Eigen::VectorXd Bu = op.bilinear() * du;

    double int_fraclap = 0.0, int_trace = 0.0;      // test function = 1
    double v_int_fraclap = 0.0, v_int_trace = 0.0;  // test function = v
    for (int i = 0; i < m.node_count(); ++i) {
        if (m.node_interior(i)) {
            int_fraclap += Bu[i];
            v_int_fraclap += dv[i] * Bu[i];
        } else {
            int_trace += Bu[i];
            v_int_trace += dv[i] * Bu[i];
        }
    }
    int_trace += Bu[m.farfield_dof()];
    v_int_trace += dv[m.farfield_dof()] * Bu[m.farfield_dof()];

    const double form = dv.dot(Bu);
    IbpResiduals res;
    res.divergence = std::abs(int_fraclap + int_trace);
    res.parts = std::abs(form - v_int_fraclap - v_int_trace);
    res.scale = std::max(Bu.lpNorm<1>() * std::max(1.0, dv.lpNorm<Eigen::Infinity>()), 1e-300);
    return res;
}

namespace {

// Singular corner contribution to int_ext int_Omega v(x)(u(x)-u(y)) K for the
// exterior/interior cell pair touching at a boundary vertex p.
double flux_corner(const KernelPrimitives& prim, double h, double sigma_a, double sigma_b,
                   double vp, double va, double ma, double mb) {
    const double i10 = prim.adjacent_moment(1, 0, h);
    const double i01 = prim.adjacent_moment(0, 1, h);
    const double i20 = prim.adjacent_moment(2, 0, h);
    const double i11 = prim.adjacent_moment(1, 1, h);
    return vp * sigma_a * ma * i10 - vp * sigma_b * mb * i01 + va * ma * i20 -
           sigma_a * sigma_b * va * mb * i11;
}

}  // namespace

std::vector<SLimitRow> s_limit_suite(const std::function<double(double)>& u,
                                     const std::function<double(double)>& v,
                                     const std::vector<double>& s_list, const SLimitOptions& opt) {
    const Interval& omega = opt.omega;
    const double L = omega.length();
    const double R = opt.R_factor * L;
    if (opt.R_factor < 2) throw ValidationError("s_limit_suite: R_factor must be >= 2");

    // Compact support inside the truncated box is required: the far field and
    // the ramps then carry exactly zero data.
    double interior_scale = std::max(std::abs(u(omega.midpoint())), std::abs(v(omega.midpoint())));
    for (double x : {omega.a - R, omega.a - 0.98 * R, omega.b + 0.98 * R, omega.b + R,
                     omega.a - 2.0 * R, omega.b + 2.0 * R}) {
        if (std::abs(u(x)) > 1e-10 * (1.0 + interior_scale) ||
            std::abs(v(x)) > 1e-10 * (1.0 + interior_scale)) {
            throw ValidationError("s_limit_suite: test functions must vanish near and beyond the "
                                  "edges of the truncated box");
        }
    }

    auto default_h = [&](double s) {
        const double t = std::clamp((1.0 - s) / 0.4, 0.125, 1.0);
        return 0.02 * L * t;
    };

    std::vector<SLimitRow> rows;
    rows.reserve(s_list.size());
    for (double s : s_list) {
        if (!(s > 0.0 && s < 1.0)) throw ValidationError("s_limit_suite: s values must lie in (0,1)");
        const double h_target = opt.h_for_s ? opt.h_for_s(s) : default_h(s);
        const int n = std::max(4, static_cast<int>(std::round(L / h_target)));
        const double h = L / n;
        const Mesh mesh = Mesh::build(omega, h, R);
        const Field uh = Field::interpolate(mesh, u, 0.0);
        const Field vh = Field::interpolate(mesh, v, 0.0);

        DiscreteOperator op = DiscreteOperator::assemble(mesh, s, opt.assembly);
        const Eigen::VectorXd ud = uh.dofs();
        const double scaled_energy = (1.0 - s) * (2.0 / op.c()) * ud.dot(op.bilinear() * ud);

        // flux = c * sum over exterior x interior cell pairs of
        //        iint v(x) (u(x)-u(y)) |x-y|^{-1-2s}
        const KernelPrimitives prim(s);
        const double expo = -1.0 - 2.0 * s;
        double flux_raw = 0.0;
        auto slope = [&](const Field& f, int cell) {
            return (f.values[cell + 1] - f.values[cell]) / h;
        };
        for (int ca = 0; ca < mesh.cell_count(); ++ca) {
            if (mesh.cell_inside(ca)) continue;
            for (int cb = 0; cb < mesh.cell_count(); ++cb) {
                if (!mesh.cell_inside(cb)) continue;
                const double a0 = mesh.cell_left(ca), a1 = mesh.cell_right(ca);
                const double b0 = mesh.cell_left(cb), b1 = mesh.cell_right(cb);
                if (a1 == b0) {
                    // exterior cell left of p = a
                    const int p = ca + 1;  // node at the shared vertex
                    flux_raw += flux_corner(prim, h, -1.0, 1.0, vh.values[p], slope(vh, ca),
                                            slope(uh, ca), slope(uh, cb));
                } else if (b1 == a0) {
                    // exterior cell right of p = b
                    const int p = ca;
                    flux_raw += flux_corner(prim, h, 1.0, -1.0, vh.values[p], slope(vh, ca),
                                            slope(uh, ca), slope(uh, cb));
                } else {
                    const double gap = (b0 > a1) ? b0 - a1 : a0 - b1;
                    const int q = (gap < opt.assembly.near_window * h) ? opt.assembly.near_quad_order
                                                                       : opt.assembly.quad_order;
                    const GaussRule& gr = gauss_rule(q);
                    const double mida = 0.5 * (a0 + a1), midb = 0.5 * (b0 + b1);
                    const double half = 0.5 * h;
                    double acc = 0.0;
                    for (std::size_t qa = 0; qa < gr.nodes.size(); ++qa) {
                        const double x = mida + half * gr.nodes[qa];
                        const double tx = (x - a0) / h;
                        const double vx = (1.0 - tx) * vh.values[ca] + tx * vh.values[ca + 1];
                        const double ux = (1.0 - tx) * uh.values[ca] + tx * uh.values[ca + 1];
                        if (vx == 0.0 && ux == 0.0) continue;
                        double inner = 0.0;
                        for (std::size_t qb = 0; qb < gr.nodes.size(); ++qb) {
                            const double y = midb + half * gr.nodes[qb];
                            const double ty = (y - b0) / h;
                            const double uy = (1.0 - ty) * uh.values[cb] + ty * uh.values[cb + 1];
                            inner += gr.weights[qb] * (ux - uy) * std::pow(std::abs(x - y), expo);
                        }
                        acc += gr.weights[qa] * vx * inner;
                    }
                    flux_raw += acc * half * half;
                }
            }
        }
        rows.push_back({s, op.c() * flux_raw, scaled_energy});
    }
    return rows;
}

KappaEstimate boundary_kappa(const std::function<double(double)>& u, const Interval& omega,
                             double s, BoundarySide side, const std::vector<double>& eps_list) {
    if (!(s > 0.5)) {
        throw ValidationError("boundary_kappa: the boundary rate is finite only for s > 1/2");
    }
    if (eps_list.empty()) throw ValidationError("boundary_kappa: empty eps list");
    for (std::size_t k = 0; k + 1 < eps_list.size(); ++k) {
        if (!(eps_list[k] > eps_list[k + 1] && eps_list[k + 1] > 0.0)) {
            throw ValidationError("boundary_kappa: eps_list must be positive and decreasing");
        }
    }
    KappaEstimate est;
    est.eps = eps_list;
    est.ratios.reserve(eps_list.size());
    for (double eps : eps_list) {
        const double x = (side == BoundarySide::Right) ? omega.b + eps : omega.a - eps;
        est.ratios.push_back(renormalized_trace_fn(u, omega, x, s, 12) / eps);
    }
    est.limit = richardson_limit(est.eps, est.ratios);
    return est;
}

}  // namespace nonlocal
