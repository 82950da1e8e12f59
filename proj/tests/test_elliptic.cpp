#include "nonlocal/elliptic.hpp"

#include "nonlocal/kernel.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/rng.hpp"
#include "nonlocal/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace nonlocal;

namespace {

struct Setup {
    Mesh mesh;
    DiscreteOperator op;
    explicit Setup(double h = 0.05, double s = 0.5)
        : mesh(Mesh::build(Interval(0.0, 1.0), h, 2.0)),
          op(DiscreteOperator::assemble(mesh, s)) {}
};

// smooth random interior source with a handful of Fourier modes
ScalarFn random_source(std::uint64_t seed) {
    Rng rng(seed);
    const double a1 = 2.0 * rng.uniform() - 1.0;
    const double a2 = 2.0 * rng.uniform() - 1.0;
    const double a3 = 2.0 * rng.uniform() - 1.0;
    return [=](double x) {
        return a1 * std::sin(2.0 * M_PI * x) + a2 * std::cos(3.0 * x) + a3 * x * x;
    };
}

}  // namespace

TEST_CASE("compatibility residual") {
    const Setup st;
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };

    CHECK(check_compatibility(st.mesh, one, zero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(check_compatibility(
              st.mesh, [](double x) { return std::sin(2.0 * M_PI * x); }, zero)) < 1e-10);

    // g = -w_{s,Omega} / ||w||_{L1} balances f = 1, with the L1 norm taken
    // over the truncated exterior the loads integrate over
    const double s = st.op.s();
    auto w = [&](double x) { return exterior_mass(x, st.mesh.omega(), s); };
    double wnorm = 0.0;
    for (int c = 0; c < st.mesh.cell_count(); ++c) {
        if (st.mesh.cell_inside(c)) continue;
        wnorm += gauss_integrate(w, st.mesh.cell_left(c), st.mesh.cell_right(c), 8);
    }
    auto g = [&](double x) { return -w(x) / wnorm; };
    CHECK(std::abs(check_compatibility(st.mesh, one, g)) < 1e-10);
}

TEST_CASE("pure Neumann solve") {
    const Setup st;
    auto zero = [](double) { return 0.0; };

    SUBCASE("zero data gives the zero (mean-pinned) field") {
        const EllipticSolution sol = solve_neumann(st.op, zero, zero);
        CHECK(sol.field.dofs().lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(sol.mean_pinned);
    }

    SUBCASE("discrete eigen-identity: load M u2 solves to u2 / lambda2") {
        const SpectralResult sp = eigs(st.op, 3);
        const Eigen::VectorXd u2 = sp.fields.col(1);
        const double lambda2 = sp.lambdas[1];
        const Eigen::VectorXd load = st.op.mass() * u2;
        const EllipticSolution sol = solve_neumann(st.op, load, 1.0);
        const Eigen::VectorXd expect = u2 / lambda2;
        CHECK((sol.field.dofs() - expect).norm() <= 1e-8 * expect.norm());
    }

    SUBCASE("incompatible data is refused with the residual attached") {
        auto one = [](double) { return 1.0; };
        CHECK_THROWS_WITH_AS(solve_neumann(st.op, one, zero),
                             doctest::Contains("compatibility violated"), NumericalError);
    }

    SUBCASE("solvability iff compatibility over random data") {
        int compatible_count = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const ScalarFn f = random_source(seed);
            const ScalarFn g0 = random_source(seed + 1000);
            const bool make_compatible = (seed % 2 == 0);
            ScalarFn g;
            if (make_compatible) {
                const double defect = check_compatibility(st.mesh, f, g0);
                const double measure = 2.0 * st.mesh.R();
                g = [=](double x) { return g0(x) - defect / measure; };
            } else {
                g = [=](double x) { return g0(x) + 1.0; };  // off by about 2R
            }
            if (make_compatible) {
                const EllipticSolution sol = solve_neumann(st.op, f, g);
                CHECK(sol.residual_norm <= 1e-10 * std::max(sol.load_norm, 1e-12));
                ++compatible_count;
            } else {
                CHECK_THROWS_AS(solve_neumann(st.op, f, g), NumericalError);
            }
        }
        CHECK(compatible_count == 25);
    }

    SUBCASE("solutions under different pins differ by a constant") {
        const ScalarFn f = random_source(7);
        const double defect = check_compatibility(st.mesh, f, nullptr);
        auto g = [=](double) { return -defect / 4.0; };
        SolveOptions omega_pin;
        omega_pin.pin = DeflationPin::OmegaMean;
        SolveOptions alldof_pin;
        alldof_pin.pin = DeflationPin::AllDofMean;
        const Eigen::VectorXd ua = solve_neumann(st.op, f, g, omega_pin).field.dofs();
        const Eigen::VectorXd ub = solve_neumann(st.op, f, g, alldof_pin).field.dofs();
        const Eigen::VectorXd diff = ua - ub;
        const double mean = diff.mean();
        CHECK((diff.array() - mean).abs().maxCoeff() <= 1e-10 * std::max(1.0, ua.norm()));
    }

    SUBCASE("the solution operator is self-adjoint on mean-zero data") {
        Rng rng(99);
        const Eigen::MatrixXd& M = st.op.mass();
        const int n = st.mesh.dof_count();
        auto random_mean_zero = [&]() {
            Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
            for (int i : st.mesh.interior_nodes()) f[i] = 2.0 * rng.uniform() - 1.0;
            const double mean = (M * f).sum() / st.mesh.omega().length();
            for (int i : st.mesh.interior_nodes()) f[i] -= mean;
            return f;
        };
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::VectorXd f1 = random_mean_zero();
            const Eigen::VectorXd f2 = random_mean_zero();
            const Eigen::VectorXd t1 = solve_neumann(st.op, M * f1, 1.0).field.dofs();
            const Eigen::VectorXd t2 = solve_neumann(st.op, M * f2, 1.0).field.dofs();
            const double lhs = f1.dot(M * t2);
            const double rhs = f2.dot(M * t1);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("mixed Dirichlet/Neumann solve") {
    const Setup st(0.05, 0.5);
    const double R = st.mesh.R();
    ExteriorPartition part;
    part.horizon = R;
    part.beyond = ExtClass::Dirichlet;
    part.segments = {{-R, 0.0, ExtClass::Neumann}, {1.0, 1.0 + R, ExtClass::Dirichlet}};

    SUBCASE("constant Dirichlet datum is reproduced everywhere") {
        auto one = [](double) { return 1.0; };
        const EllipticSolution sol = solve_mixed(st.op, nullptr, one, nullptr, part, 1.0);
        CHECK((sol.field.dofs().array() - 1.0).abs().maxCoeff() < 1e-10);
    }

    SUBCASE("bounded data yields bounded solutions") {
        const Setup fine(0.02, 0.5);
        auto phi = [](double x) { return 0.5 * (1.0 + std::cos(3.0 * x)); };
        const EllipticSolution sol =
            solve_mixed(fine.op, nullptr, phi, nullptr, part, phi(fine.mesh.right_tail_edge()));
        for (int i : fine.mesh.interior_nodes()) {
            CHECK(sol.field.values[i] >= -1e-6);
            CHECK(sol.field.values[i] <= 1.0 + 1e-6);
        }
    }

    SUBCASE("empty Dirichlet region is redirected to solve_neumann") {
        ExteriorPartition all_neumann;
        all_neumann.horizon = R;
        all_neumann.beyond = ExtClass::Neumann;
        all_neumann.segments = {{-R, 0.0, ExtClass::Neumann}, {1.0, 1.0 + R, ExtClass::Neumann}};
        CHECK_THROWS_WITH_AS(solve_mixed(st.op, nullptr, nullptr, nullptr, all_neumann, 0.0),
                             doctest::Contains("solve_neumann"), ValidationError);
    }
}

TEST_CASE("Robin solve and its reductions") {
    const Setup st(0.05, 0.6);
    const double R = st.mesh.R();
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };
    auto phi = [](double x) { return std::cos(0.7 * x); };

    SUBCASE("alpha = 0 reduces to the all-Dirichlet mixed problem") {
        const EllipticSolution robin = solve_robin(st.op, zero, one, phi, zero);
        ExteriorPartition all;
        all.horizon = R;
        all.beyond = ExtClass::Dirichlet;
        all.segments = {{-R, 0.0, ExtClass::Dirichlet}, {1.0, 1.0 + R, ExtClass::Dirichlet}};
        const EllipticSolution mixed =
            solve_mixed(st.op, zero, phi, nullptr, all, phi(st.mesh.right_tail_edge()));
        CHECK((robin.field.dofs() - mixed.field.dofs()).lpNorm<Eigen::Infinity>() <= 1e-10);
    }

    SUBCASE("beta = 0 reduces to the pure Neumann problem") {
        // compatible flux: odd over the exterior
        auto g = [&](double x) { return std::sin(M_PI * (x - 0.5) / R); };
        const EllipticSolution robin = solve_robin(st.op, one, zero, g, zero);
        const EllipticSolution neu = solve_neumann(st.op, zero, g);
        CHECK((robin.field.dofs() - neu.field.dofs()).lpNorm<Eigen::Infinity>() <= 1e-10);
    }

    SUBCASE("alpha = beta = gamma = 1 has the constant solution") {
        const EllipticSolution sol = solve_robin(st.op, one, one, one, zero);
        CHECK((sol.field.dofs().array() - 1.0).abs().maxCoeff() < 1e-9);
        CHECK(sol.residual_norm <= 1e-10 * std::max(sol.load_norm, 1e-12));
    }

    SUBCASE("alpha = beta = 0 is rejected") {
        CHECK_THROWS_AS(solve_robin(st.op, zero, zero, one, zero), ValidationError);
    }
}

TEST_CASE("energy functional and gradient") {
    const Setup st;
    const int n = st.mesh.dof_count();

    SUBCASE("constants with zero data sit at zero energy and gradient") {
        const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 2.0);
        const Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        const EnergyGradient eg = energy_and_gradient(st.op, u, r);
        CHECK(std::abs(eg.energy) < 1e-12);
        CHECK(eg.gradient.lpNorm<Eigen::Infinity>() < 1e-12);
    }

    SUBCASE("the solver output is a critical point") {
        const ScalarFn f = random_source(21);
        const double defect = check_compatibility(st.mesh, f, nullptr);
        auto g = [=](double) { return -defect / 4.0; };
        const Eigen::VectorXd r = load_vector(st.mesh, f, g);
        const EllipticSolution sol = solve_neumann(st.op, f, g);
        const EnergyGradient eg = energy_and_gradient(st.op, sol.field.dofs(), r);
        CHECK(eg.gradient.norm() <= 1e-8 * r.norm());
    }

    SUBCASE("central differences match the gradient") {
        Rng rng(4);
        Eigen::VectorXd u(n), v(n), r(n);
        for (int i = 0; i < n; ++i) {
            u[i] = 2.0 * rng.uniform() - 1.0;
            v[i] = 2.0 * rng.uniform() - 1.0;
            r[i] = 0.1 * (2.0 * rng.uniform() - 1.0);
        }
        const double eps = 1e-5;
        const double ip = energy_and_gradient(st.op, u + eps * v, r).energy;
        const double im = energy_and_gradient(st.op, u - eps * v, r).energy;
        const double fd = (ip - im) / (2.0 * eps);
        const double gd = energy_and_gradient(st.op, u, r).gradient.dot(v);
        CHECK(fd == doctest::Approx(gd).epsilon(1e-6));
    }

    SUBCASE("the quadratic energy is minimal at the solution") {
        const ScalarFn f = random_source(33);
        const double defect = check_compatibility(st.mesh, f, nullptr);
        auto g = [=](double) { return -defect / 4.0; };
        const Eigen::VectorXd r = load_vector(st.mesh, f, g);
        const EllipticSolution sol = solve_neumann(st.op, f, g);
        const double istar = energy_and_gradient(st.op, sol.field.dofs(), r).energy;
        Rng rng(8);
        for (int trial = 0; trial < 4; ++trial) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = 2.0 * rng.uniform() - 1.0;
            for (double t : {-0.1, -0.01, 0.01, 0.1}) {
                const double it = energy_and_gradient(st.op, sol.field.dofs() + t * v, r).energy;
                CHECK(istar <= it + 1e-12);
            }
        }
    }
}
