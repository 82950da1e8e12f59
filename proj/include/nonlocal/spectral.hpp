#pragma once

#include "nonlocal/operator.hpp"

#include <vector>

namespace nonlocal {

/// Generalized Neumann eigenpairs B u = lambda M u. The mass matrix is
/// singular on exterior DOFs; those are slaved through the exterior rows of
/// B (the discrete homogeneous Neumann relation) and eliminated by a Schur
/// complement before the dense symmetric solve.
struct SpectralResult {
    std::vector<double> lambdas;   // ascending, lambda_1 ~ 0
    std::vector<double> mus;       // 1/lambda_i for i >= 2; mus[0] = +inf
    Eigen::MatrixXd fields;        // dof_count x k, M-orthonormal interior parts
    Eigen::MatrixXd gram;          // k x k interior L2(Omega) Gram matrix
    std::vector<double> residuals; // ||B u_i - lambda_i M u_i||_2

    Field eigenfield(const Mesh& mesh, int i) const {
        return Field::from_dofs(mesh, fields.col(i));
    }
};

SpectralResult eigs(const DiscreteOperator& op, int k);

/// Discrete Poincare constant: C = 1/nu_2 with nu_2 the smallest nonzero
/// eigenvalue of the regional (Omega x Omega) form against the interior mass,
/// so that int_Omega |u - avg u|^2 <= C * iint_{Omega^2} |u(x)-u(y)|^2 K holds
/// for every discrete field.
double poincare_constant(const Mesh& mesh, double s, const AssemblyOptions& opts = {});

}  // namespace nonlocal
