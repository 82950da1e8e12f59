#pragma once

#include "nonlocal/operator.hpp"
#include "nonlocal/partition.hpp"

#include <functional>
#include <optional>

namespace nonlocal {

using ScalarFn = std::function<double(double)>;

/// Which rank-one shift pins the additive constant of the singular Neumann
/// system. Solutions under different pins differ by a constant field.
enum class DeflationPin { OmegaMean, AllDofMean };

struct SolveOptions {
    double tol = 1e-10;               // relative residual of the linear solve
    double tol_compat_scale = 1e-8;   // compatibility gate, scaled by ||f||_1 + ||g||_1
    DeflationPin pin = DeflationPin::OmegaMean;
    int load_quad_order = 8;
};

struct EllipticSolution {
    Field field;
    double residual_norm = 0.0;
    double load_norm = 0.0;
    double compat_residual = 0.0;
    bool mean_pinned = false;
};

/// Load vector r_i = int_Omega f phi_i + int_COmega g phi_i over the mesh;
/// g is ingested on the truncated exterior only and must vanish beyond.
Eigen::VectorXd load_vector(const Mesh& mesh, const ScalarFn& f, const ScalarFn& g,
                            int quad_order = 8);

/// int_Omega f + int_COmega g by the same quadrature as the load vector
/// (equals the all-ones pairing with the load).
double check_compatibility(const Mesh& mesh, const ScalarFn& f, const ScalarFn& g,
                           int quad_order = 8);

/// Pure Neumann solve B u = r on the deflated subspace. Gated on the
/// compatibility residual; throws NumericalError("compatibility violated ...")
/// when the gate fails. The returned field has zero Omega-mean (OmegaMean pin).
EllipticSolution solve_neumann(const DiscreteOperator& op, const Eigen::VectorXd& load,
                               double compat_scale, const SolveOptions& opts = {});
EllipticSolution solve_neumann(const DiscreteOperator& op, const ScalarFn& f, const ScalarFn& g,
                               const SolveOptions& opts = {});

/// Mixed problem: DOFs in the Dirichlet region are eliminated at value phi;
/// the rest solves the reduced (nonsingular) system. farfield_value pins the
/// far-field DOF when the beyond-horizon rule assigns it to Dirichlet.
EllipticSolution solve_mixed(const DiscreteOperator& op, const ScalarFn& f, const ScalarFn& phi,
                             const ScalarFn& g, const ExteriorPartition& partition,
                             double farfield_value = 0.0, const SolveOptions& opts = {});

/// Robin condition alpha N_s u + beta u = gamma on the truncated exterior,
/// in variational form. Degenerate coefficient fields reduce to the pure
/// Neumann (beta = 0) or pure Dirichlet (alpha = 0) solvers.
EllipticSolution solve_robin(const DiscreteOperator& op, const ScalarFn& alpha,
                             const ScalarFn& beta, const ScalarFn& gamma, const ScalarFn& f,
                             const SolveOptions& opts = {});

struct EnergyGradient {
    double energy = 0.0;
    Eigen::VectorXd gradient;
};

/// I[u] = (1/2) u^T B u - r^T u and its gradient B u - r.
EnergyGradient energy_and_gradient(const DiscreteOperator& op, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& load);

}  // namespace nonlocal
