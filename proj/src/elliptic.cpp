#include "nonlocal/elliptic.hpp"

#include "nonlocal/quadrature.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace nonlocal {

namespace {

// Per-cell Gauss pairing of a coefficient function against the two hats.
void add_cell_load(Eigen::VectorXd& r, const Mesh& mesh, int cell, const ScalarFn& f,
                   int quad_order) {
    const double x0 = mesh.cell_left(cell), x1 = mesh.cell_right(cell);
    const double h = x1 - x0;
    const GaussRule& gr = gauss_rule(quad_order);
    const double mid = 0.5 * (x0 + x1), half = 0.5 * h;
    double acc0 = 0.0, acc1 = 0.0;
    for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
        const double x = mid + half * gr.nodes[q];
        const double w = gr.weights[q] * half * f(x);
        acc0 += w * (x1 - x) / h;
        acc1 += w * (x - x0) / h;
    }
    r[cell] += acc0;
    r[cell + 1] += acc1;
}

double l1_norm_fn(const Mesh& mesh, const ScalarFn& f, bool interior, int quad_order) {
    double acc = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) {
        if (mesh.cell_inside(c) != interior) continue;
        acc += gauss_integrate([&](double x) { return std::abs(f(x)); }, mesh.cell_left(c),
                               mesh.cell_right(c), quad_order);
    }
    return acc;
}

}  // namespace

Eigen::VectorXd load_vector(const Mesh& mesh, const ScalarFn& f, const ScalarFn& g,
                            int quad_order) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.dof_count());
    for (int c = 0; c < mesh.cell_count(); ++c) {
        if (mesh.cell_inside(c)) {
            if (f) add_cell_load(r, mesh, c, f, quad_order);
        } else {
            if (g) add_cell_load(r, mesh, c, g, quad_order);
        }
    }
    return r;
}

double check_compatibility(const Mesh& mesh, const ScalarFn& f, const ScalarFn& g,
                           int quad_order) {
    return load_vector(mesh, f, g, quad_order).sum();
}

namespace {

EllipticSolution deflated_solve(const DiscreteOperator& op, const Eigen::VectorXd& load,
                                double compat_scale, const SolveOptions& opts) {
    const Eigen::MatrixXd& B = op.bilinear();
    const int dim = static_cast<int>(B.rows());
    const double compat = load.sum();
    const double gate = opts.tol_compat_scale * std::max(compat_scale, 1e-30);
    if (std::abs(compat) > gate) {
        std::ostringstream msg;
        msg << "compatibility violated: int_Omega f + int_COmega g = " << compat
            << " exceeds the gate " << gate;
        throw NumericalError(msg.str());
    }

    // Project the load onto the orthogonal complement of the kernel (constants),
    // then solve the rank-one-shifted SPD system; the shift pins the mean.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim);
    const Eigen::VectorXd r = load.array() - compat / dim;
    Eigen::VectorXd pin;
    if (opts.pin == DeflationPin::OmegaMean) {
        pin = op.mass() * ones;  // pin^T u = int_Omega u
    } else {
        pin = ones;
    }
    const double beta = (B.trace() / dim) / pin.squaredNorm();
    Eigen::MatrixXd A = B + beta * pin * pin.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError("solve_neumann: factorization of the deflated system failed");
    }
    const Eigen::VectorXd u = ldlt.solve(r);

    EllipticSolution sol{Field::from_dofs(op.mesh(), u)};
    sol.load_norm = r.norm();
    sol.residual_norm = (B * u - r).norm();
    sol.compat_residual = compat;
    sol.mean_pinned = true;
    if (sol.residual_norm > opts.tol * std::max(sol.load_norm, 1e-30) &&
        sol.residual_norm > 1e-13 * B.norm()) {
        std::ostringstream msg;
        msg << "solve_neumann: singular-system failure, residual " << sol.residual_norm
            << " for load norm " << sol.load_norm << " (kernel is the constant field)";
        throw NumericalError(msg.str());
    }
    return sol;
}

}  // namespace

EllipticSolution solve_neumann(const DiscreteOperator& op, const Eigen::VectorXd& load,
                               double compat_scale, const SolveOptions& opts) {
    return deflated_solve(op, load, compat_scale, opts);
}

EllipticSolution solve_neumann(const DiscreteOperator& op, const ScalarFn& f, const ScalarFn& g,
                               const SolveOptions& opts) {
    const Mesh& mesh = op.mesh();
    const Eigen::VectorXd r = load_vector(mesh, f, g, opts.load_quad_order);
    const double scale = l1_norm_fn(mesh, f, true, opts.load_quad_order) +
                         l1_norm_fn(mesh, g, false, opts.load_quad_order);
    return deflated_solve(op, r, scale, opts);
}

EllipticSolution solve_mixed(const DiscreteOperator& op, const ScalarFn& f, const ScalarFn& phi,
                             const ScalarFn& g, const ExteriorPartition& partition,
                             double farfield_value, const SolveOptions& opts) {
    const Mesh& mesh = op.mesh();
    partition.validate(mesh.omega());
    if (!partition.has_dirichlet()) {
        throw ValidationError("solve_mixed: empty Dirichlet region; use solve_neumann");
    }

    const int dim = mesh.dof_count();
    std::vector<int> free_dofs, dir_dofs;
    Eigen::VectorXd values = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (mesh.node_interior(i)) {
            free_dofs.push_back(i);
            continue;
        }
        if (partition.classify(mesh.node(i), mesh.omega()) == ExtClass::Dirichlet) {
            dir_dofs.push_back(i);
            values[i] = phi ? phi(mesh.node(i)) : 0.0;
        } else {
            free_dofs.push_back(i);
        }
    }
    const int ff = mesh.farfield_dof();
    if (partition.beyond == ExtClass::Dirichlet) {
        dir_dofs.push_back(ff);
        values[ff] = farfield_value;
    } else {
        free_dofs.push_back(ff);
    }
    if (dir_dofs.empty()) {
        throw ValidationError("solve_mixed: the partition eliminates no degrees of freedom");
    }

    // Load: f against interior cells, g against exterior Neumann cells.
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const double xm = 0.5 * (mesh.cell_left(c) + mesh.cell_right(c));
        if (mesh.cell_inside(c)) {
            if (f) add_cell_load(r, mesh, c, f, opts.load_quad_order);
        } else if (g && partition.classify(xm, mesh.omega()) == ExtClass::Neumann) {
            add_cell_load(r, mesh, c, g, opts.load_quad_order);
        }
    }

    const Eigen::MatrixXd& B = op.bilinear();
    const int nf = static_cast<int>(free_dofs.size());
    Eigen::MatrixXd Bff(nf, nf);
    Eigen::VectorXd rhs(nf);
    for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nf; ++j) Bff(i, j) = B(free_dofs[i], free_dofs[j]);
        double lift = 0.0;
        for (int d : dir_dofs) lift += B(free_dofs[i], d) * values[d];
        rhs[i] = r[free_dofs[i]] - lift;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Bff);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError("solve_mixed: factorization failed");
    }
    const Eigen::VectorXd uf = ldlt.solve(rhs);
    for (int i = 0; i < nf; ++i) values[free_dofs[i]] = uf[i];

    EllipticSolution sol{Field::from_dofs(op.mesh(), values)};
    sol.load_norm = rhs.norm();
    sol.residual_norm = (Bff * uf - rhs).norm();
    sol.mean_pinned = false;
    if (sol.residual_norm > opts.tol * std::max(sol.load_norm, 1e-30) &&
        sol.residual_norm > 1e-13 * B.norm() * values.lpNorm<Eigen::Infinity>()) {
        throw NumericalError("solve_mixed: residual exceeds tolerance");
    }
    return sol;
}

EllipticSolution solve_robin(const DiscreteOperator& op, const ScalarFn& alpha,
                             const ScalarFn& beta, const ScalarFn& gamma, const ScalarFn& f,
                             const SolveOptions& opts) {
    const Mesh& mesh = op.mesh();
    // Probe the coefficients on the truncated exterior.
    double max_alpha = 0.0, max_beta = 0.0, min_alpha = 1e300;
    for (int c = 0; c < mesh.cell_count(); ++c) {
        if (mesh.cell_inside(c)) continue;
        for (double t : {0.25, 0.5, 0.75}) {
            const double x = mesh.cell_left(c) + t * mesh.h();
            const double av = std::abs(alpha ? alpha(x) : 0.0);
            const double bv = std::abs(beta ? beta(x) : 0.0);
            max_alpha = std::max(max_alpha, av);
            max_beta = std::max(max_beta, bv);
            min_alpha = std::min(min_alpha, av);
        }
    }
    if (max_alpha == 0.0 && max_beta == 0.0) {
        throw ValidationError("solve_robin: alpha and beta both vanish identically");
    }
    if (max_alpha == 0.0) {
        // beta u = gamma: Dirichlet everywhere outside.
        ExteriorPartition all;
        all.horizon = mesh.R();
        all.beyond = ExtClass::Dirichlet;
        all.segments = {{mesh.omega().a - mesh.R(), mesh.omega().a, ExtClass::Dirichlet},
                        {mesh.omega().b, mesh.omega().b + mesh.R(), ExtClass::Dirichlet}};
        auto phi = [&](double x) { return gamma(x) / beta(x); };
        const double x_ff = mesh.right_tail_edge();
        return solve_mixed(op, f, phi, nullptr, all, gamma(x_ff) / beta(x_ff), opts);
    }
    if (max_beta == 0.0) {
        // alpha N_s u = gamma: pure Neumann with g = gamma / alpha.
        return solve_neumann(op, f, [&](double x) { return gamma(x) / alpha(x); }, opts);
    }
    if (min_alpha == 0.0) {
        throw ValidationError(
            "solve_robin: alpha vanishes on part of the exterior; split the problem with "
            "solve_mixed instead");
    }

    // Variational Robin: (B + Q) u = r with Q_ij = int_ext (beta/alpha) phi_i phi_j
    // and r_i += int_ext (gamma/alpha) phi_i, both over the truncated exterior.
    const int dim = mesh.dof_count();
    Eigen::MatrixXd A = op.bilinear();
    Eigen::VectorXd r = load_vector(mesh, f, nullptr, opts.load_quad_order);
    const GaussRule& gr = gauss_rule(opts.load_quad_order);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        if (mesh.cell_inside(c)) continue;
        const double x0 = mesh.cell_left(c), x1 = mesh.cell_right(c);
        const double h = x1 - x0, mid = 0.5 * (x0 + x1), half = 0.5 * h;
        for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
            const double x = mid + half * gr.nodes[q];
            const double w = gr.weights[q] * half;
            const double pl = (x1 - x) / h, pr = (x - x0) / h;
            const double ba = beta(x) / alpha(x);
            const double ga = gamma(x) / alpha(x);
            A(c, c) += w * ba * pl * pl;
            A(c, c + 1) += w * ba * pl * pr;
            A(c + 1, c) += w * ba * pr * pl;
            A(c + 1, c + 1) += w * ba * pr * pr;
            r[c] += w * ga * pl;
            r[c + 1] += w * ga * pr;
        }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError("solve_robin: factorization failed");
    }
    const Eigen::VectorXd u = ldlt.solve(r);
    EllipticSolution sol{Field::from_dofs(op.mesh(), u)};
    sol.load_norm = r.norm();
    sol.residual_norm = (A * u - r).norm();
    sol.mean_pinned = false;
    if (sol.residual_norm > opts.tol * std::max(sol.load_norm, 1e-30) &&
        sol.residual_norm > 1e-13 * A.norm() * std::max(1.0, u.lpNorm<Eigen::Infinity>())) {
        throw NumericalError("solve_robin: residual exceeds tolerance");
    }
    (void)dim;
    return sol;
}

EnergyGradient energy_and_gradient(const DiscreteOperator& op, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& load) {
    EnergyGradient eg;
    const Eigen::VectorXd Bu = op.bilinear() * u;
    eg.energy = 0.5 * u.dot(Bu) - load.dot(u);
    eg.gradient = Bu - load;
    return eg;
}

}  // namespace nonlocal
