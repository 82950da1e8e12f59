#include "nonlocal/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace nonlocal {

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& A, const std::vector<int>& rows,
                       const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = A(rows[i], cols[j]);
    }
    return out;
}

}  // namespace

SpectralResult eigs(const DiscreteOperator& op, int k) {
    const Mesh& mesh = op.mesh();
    const std::vector<int>& interior = mesh.interior_nodes();
    std::vector<int> exterior = mesh.exterior_nodes();
    exterior.push_back(mesh.farfield_dof());

    const int ni = static_cast<int>(interior.size());
    if (k < 1 || k > ni) {
        throw ValidationError("eigs: k must lie between 1 and the interior DOF count");
    }

    const Eigen::MatrixXd& B = op.bilinear();
    const Eigen::MatrixXd Bii = gather(B, interior, interior);
    const Eigen::MatrixXd Bix = gather(B, interior, exterior);
    const Eigen::MatrixXd Bxx = gather(B, exterior, exterior);
    const Eigen::MatrixXd Mii = gather(op.mass(), interior, interior);

    // Slave the exterior through its B rows: u_X = -Bxx^{-1} Bxi u_I.
    Eigen::LLT<Eigen::MatrixXd> llt(Bxx);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("eigs: exterior block is not positive definite");
    }
    const Eigen::MatrixXd Y = llt.solve(Bix.transpose());  // = Bxx^{-1} Bxi
    Eigen::MatrixXd S = Bii - Bix * Y;
    S = 0.5 * (S + S.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(S, Mii);
    if (ges.info() != Eigen::Success) {
        throw NumericalError("eigs: generalized eigensolver failed");
    }

    SpectralResult res;
    res.lambdas.resize(k);
    res.mus.resize(k);
    res.fields.resize(mesh.dof_count(), k);
    res.residuals.resize(k);

    const double lam_scale = std::max(std::abs(ges.eigenvalues()[ni - 1]), 1.0);
    Eigen::MatrixXd Ui(ni, k);
    for (int j = 0; j < k; ++j) {
        double lam = ges.eigenvalues()[j];
        if (lam < 0.0 && lam > -1e-10 * lam_scale) lam = 0.0;  // rounding around the kernel
        res.lambdas[j] = lam;
        res.mus[j] = (j == 0) ? std::numeric_limits<double>::infinity() : 1.0 / lam;
        Ui.col(j) = ges.eigenvectors().col(j);
    }

    // Deterministic sign: first interior component of visible size is positive.
    for (int j = 0; j < k; ++j) {
        const double scale = Ui.col(j).lpNorm<Eigen::Infinity>();
        for (int i = 0; i < ni; ++i) {
            if (std::abs(Ui(i, j)) > 1e-12 * scale) {
                if (Ui(i, j) < 0.0) Ui.col(j) = -Ui.col(j);
                break;
            }
        }
    }

    const Eigen::MatrixXd Ux = -(Y * Ui);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.dof_count());
        for (int i = 0; i < ni; ++i) full[interior[i]] = Ui(i, j);
        for (std::size_t i = 0; i < exterior.size(); ++i) full[exterior[i]] = Ux(i, j);
        res.fields.col(j) = full;
        res.residuals[j] = (B * full - res.lambdas[j] * (op.mass() * full)).norm();
    }
    res.gram = Ui.transpose() * Mii * Ui;
    return res;
}

double poincare_constant(const Mesh& mesh, double s, const AssemblyOptions& opts) {
    const Eigen::MatrixXd R = assemble_regional(mesh, s, opts);
    const std::vector<int>& interior = mesh.interior_nodes();
    Eigen::MatrixXd Rii = gather(R, interior, interior);
    Rii = 0.5 * (Rii + Rii.transpose()).eval();

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(mesh.dof_count(), mesh.dof_count());
    const double h = mesh.h();
    for (int c = 0; c < mesh.cell_count(); ++c) {
        if (!mesh.cell_inside(c)) continue;
        M(c, c) += h / 3.0;
        M(c + 1, c + 1) += h / 3.0;
        M(c, c + 1) += h / 6.0;
        M(c + 1, c) += h / 6.0;
    }
    const Eigen::MatrixXd Mii = gather(M, interior, interior);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Rii, Mii);
    if (ges.info() != Eigen::Success) {
        throw NumericalError("poincare_constant: generalized eigensolver failed");
    }
    const double nu2 = ges.eigenvalues()[1];
    if (!(nu2 > 0.0)) throw NumericalError("poincare_constant: nonpositive second eigenvalue");
    return 1.0 / nu2;
}

}  // namespace nonlocal
