#pragma once

#include "nonlocal/kernel.hpp"
#include "nonlocal/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace nonlocal {

struct AssemblyOptions {
    /// Tensor Gauss order for well-separated cell pairs (the kernel is smooth there).
    int quad_order = 4;
    /// Boosted order for nearly-touching pairs (gap below near_window cells).
    int near_quad_order = 12;
    int near_window = 6;
    /// Worker threads for row-block assembly. The result is bit-identical for
    /// any thread count: each row accumulates its pairs in a fixed order.
    int threads = 1;
};

/// Galerkin matrices of the nonlocal Neumann problem on a Mesh:
///   B(i,j) = (c_{1,s}/2) * iint_{R^2 \ (COmega)^2} (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-2s}
///   M(i,j) = int_Omega phi_i phi_j
/// Exterior-exterior pairs are excluded from B, matching the integration
/// region; the region beyond [a-R-h, b+R+h] interacts through the far-field
/// basis function analytically. B is symmetric bit-exactly and positive
/// semidefinite with kernel spanned by the constant DOF vector.
class DiscreteOperator {
public:
    static DiscreteOperator assemble(const Mesh& mesh, double s, const AssemblyOptions& opts = {});

    const Eigen::MatrixXd& bilinear() const { return B_; }
    const Eigen::MatrixXd& mass() const { return M_; }
    const Mesh& mesh() const { return mesh_; }
    double s() const { return s_; }
    double c() const { return c_; }
    int quad_order() const { return quad_order_; }

    /// u^T B u (half the c-scaled double integral; see energy diagnostics).
    double energy(const Eigen::VectorXd& dofs) const { return dofs.dot(B_ * dofs); }

private:
    Mesh mesh_;
    double s_ = 0.5;
    double c_ = 0.0;
    int quad_order_ = 4;
    Eigen::MatrixXd B_;
    Eigen::MatrixXd M_;
};

/// Regional (Omega x Omega only) form matrix with the raw kernel
/// |x-y|^{-1-2s} and both integration orders counted; used by the discrete
/// Poincare constant.
Eigen::MatrixXd assemble_regional(const Mesh& mesh, double s, const AssemblyOptions& opts = {});

/// Collocation value of (-Delta)^s u at a grid vertex x strictly inside
/// Omega (at least 2h from the boundary). The principal value is handled by
/// symmetric pairing of the two cells around x with a second-difference
/// quadratic model; everything else is integrated in closed form cell by
/// cell, with analytic tails.
double eval_fraclap(const Field& u, double s, double x);

struct NeumannTrace {
    std::vector<double> points;
    std::vector<double> ns;        // N_s u
    std::vector<double> ns_tilde;  // N_s u / w_{s,Omega}
    std::vector<double> weight;    // w_{s,Omega}
};

/// Pointwise nonlocal normal derivative of a discrete field at exterior
/// points, via cell-wise closed forms against the piecewise-linear interior.
NeumannTrace neumann_trace(const Field& u, const std::vector<double>& points, double s);

/// Kernel-weighted interior average at exterior points: the unique extension
/// with vanishing nonlocal normal derivative.
std::vector<double> extend(const Field& interior_data, const std::vector<double>& points, double s);

/// N_s u and its renormalization for a callable u, by graded quadrature over
/// Omega (robust arbitrarily close to the boundary).
double neumann_trace_fn(const std::function<double(double)>& u, const Interval& omega, double x,
                        double s, int order = 12);
double renormalized_trace_fn(const std::function<double(double)>& u, const Interval& omega,
                             double x, double s, int order = 12);

struct HsNormParts {
    double l2_sq = 0.0;        // ||u||^2_{L^2(Omega)}
    double weighted_sq = 0.0;  // || |g|^{1/2} u ||^2_{L^2(COmega)}, truncated exterior
    double semi_sq = 0.0;      // raw Gagliardo-type double integral over R^2 \ (COmega)^2
    double value() const;
};

HsNormParts hs_norm(const DiscreteOperator& op, const Field& u,
                    const std::function<double(double)>& g);

/// Per_s(Omega) = c_{1,s} L^{1-2s} / (s (1-2s)), finite for s in (0, 1/2).
double fractional_perimeter(const Interval& omega, double s);
/// Independent cross-check: integral of w_{s,Omega} over the exterior by
/// graded quadrature plus an analytic far tail.
double fractional_perimeter_quadrature(const Interval& omega, double s);

struct IbpResiduals {
    double divergence = 0.0;  // | int_Omega (-Delta)^s u + int_COmega N_s u |
    double parts = 0.0;       // | form(u,v) - int_Omega v (-Delta)^s u - int_COmega v N_s u |
    double scale = 1.0;       // magnitude of the ingredients, for relative checks
};

/// Discrete divergence theorem and integration-by-parts residuals, with all
/// three ingredients read off the same matrix B.
IbpResiduals ibp_residuals(const DiscreteOperator& op, const Field& u, const Field& v);

struct SLimitOptions {
    Interval omega{0.0, 1.0};
    int R_factor = 2;  // truncation radius R = R_factor * (b - a)
    /// Target spacing per s; refined as s -> 1 where the kernel concentrates.
    std::function<double(double)> h_for_s;
    AssemblyOptions assembly{};
};

struct SLimitRow {
    double s;
    double flux;           // int_COmega N_s u * v
    double scaled_energy;  // (1-s) * raw double integral of |u(x)-u(y)|^2
};

/// Flux and scaled-energy table over s_list for smooth compactly supported
/// test functions, each evaluated on a refined mesh per s.
std::vector<SLimitRow> s_limit_suite(const std::function<double(double)>& u,
                                     const std::function<double(double)>& v,
                                     const std::vector<double>& s_list, const SLimitOptions& opt);

enum class BoundarySide { Left, Right };

struct KappaEstimate {
    std::vector<double> eps;
    std::vector<double> ratios;  // N~_s u(x + eps nu) / eps
    double limit = 0.0;          // Richardson-extrapolated; equals kappa * d_nu u
};

/// Boundary growth rate of the renormalized trace for a C^1 function,
/// finite only for s > 1/2.
KappaEstimate boundary_kappa(const std::function<double(double)>& u, const Interval& omega,
                             double s, BoundarySide side, const std::vector<double>& eps_list);

}  // namespace nonlocal
