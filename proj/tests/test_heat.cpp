#include "nonlocal/heat.hpp"

#include "nonlocal/rng.hpp"
#include "nonlocal/spectral.hpp"

#include "oracles.hpp"

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

}  // namespace

TEST_CASE("equilibrium: constant initial data stays put") {
    const Setup st;
    Field u0(st.mesh);
    u0.values.setConstant(0.7);
    u0.farfield = 0.7;
    HeatRun run{u0, 1e-2, 0.2, Scheme::ImplicitEuler, nullptr, nullptr, 1};
    const Trajectory traj = evolve(st.op, run);
    for (const Field& f : traj.samples) {
        CHECK((f.dofs().array() - 0.7).abs().maxCoeff() <= 1e-12);
    }
    const DecayFit fit = fit_decay(traj);
    CHECK(fit.degenerate);
    CHECK(std::isinf(fit.rate));
}

TEST_CASE("mass conservation and convergence to the mean") {
    const Setup st;
    Field u0 = Field::interpolate(st.mesh, [](double x) { return x; }, 0.0);

    for (Scheme scheme : {Scheme::ImplicitEuler, Scheme::CrankNicolson}) {
        HeatRun run{u0, 1e-2, 2.0, scheme, nullptr, nullptr, 20};
        const Trajectory traj = evolve(st.op, run);
        CHECK(traj.mean == doctest::Approx(0.5).epsilon(1e-12));
        for (double m : traj.mass) {
            CHECK(std::abs(m - traj.mass.front()) <= 1e-12 * std::abs(traj.mass.front()) + 1e-14);
        }
        // exponentially fast approach to the constant mean
        CHECK(traj.deviation.back() <= 1e-4 * traj.deviation.front());
    }
}

TEST_CASE("energy and deviation decrease monotonically (implicit Euler)") {
    const Setup st;
    Field u0 = Field::interpolate(
        st.mesh, [](double x) { return std::cos(2.0 * M_PI * x) + 0.3 * x; }, 0.0);
    HeatRun run{u0, 5e-3, 0.5, Scheme::ImplicitEuler, nullptr, nullptr, 10};
    const Trajectory traj = evolve(st.op, run);
    for (std::size_t k = 0; k + 1 < traj.energy.size(); ++k) {
        CHECK(traj.energy[k + 1] <= traj.energy[k] + 1e-12);
        CHECK(traj.deviation[k + 1] <= traj.deviation[k] + 1e-12);
    }
    for (double a : traj.deviation) CHECK(a >= 0.0);
}

TEST_CASE("the exterior relations are enforced from the first step") {
    const Setup st;
    Rng rng(3);
    Field u0 = Field::interpolate(st.mesh, [](double x) { return x * x; }, 0.0);
    for (int i : st.mesh.exterior_nodes()) u0.values[i] = rng.uniform();  // junk exterior
    HeatRun run{u0, 1e-2, 0.05, Scheme::ImplicitEuler, nullptr, nullptr, 1};
    const Trajectory traj = evolve(st.op, run);
    const Eigen::VectorXd bu = st.op.bilinear() * traj.samples[1].dofs();
    double ext_residual = std::abs(bu[st.mesh.farfield_dof()]);
    for (int i : st.mesh.exterior_nodes()) ext_residual = std::max(ext_residual, std::abs(bu[i]));
    CHECK(ext_residual <= 1e-10 * bu.lpNorm<Eigen::Infinity>() + 1e-12);
}

TEST_CASE("diagnostics: matrix energy against direct double quadrature") {
    const Mesh coarse = Mesh::build(Interval(0.0, 1.0), 0.25, 2.0);
    const double s = 0.5;
    const DiscreteOperator op = DiscreteOperator::assemble(coarse, s);
    Rng rng(9);
    Field u(coarse);
    for (int i = 0; i < coarse.node_count(); ++i) u.values[i] = 2.0 * rng.uniform() - 1.0;
    u.farfield = 0.3;
    const HeatDiagnostics d = diagnostics(op, u, 0.0);
    const double direct = oracles::energy_direct(u, s);
    CHECK(d.energy == doctest::Approx(direct).epsilon(1e-6));
    // constant field: E and A vanish
    Field c(coarse);
    c.values.setConstant(1.0);
    c.farfield = 1.0;
    const HeatDiagnostics dc = diagnostics(op, c, 1.0);
    CHECK(dc.energy <= 1e-12);
    CHECK(dc.deviation <= 1e-14);
}

TEST_CASE("decay-rate fit against the spectral gap") {
    const Setup st(0.05, 0.5);
    const SpectralResult sp = eigs(st.op, 3);
    const double lambda2 = sp.lambdas[1];
    const double lambda3 = sp.lambdas[2];

    SUBCASE("pure second eigenmode decays at exactly 2 lambda_2") {
        HeatRun run{sp.eigenfield(st.mesh, 1), 1e-3, 1.0, Scheme::ImplicitEuler, nullptr, nullptr,
                    10};
        const Trajectory traj = evolve(st.op, run);
        const DecayFit fit = fit_decay(traj);
        CHECK(fit.rate == doctest::Approx(2.0 * lambda2).epsilon(0.02));
        CHECK(fit.max_upward_violation <= 1e-14);
    }

    SUBCASE("a 2-3 mode mix lands between the gaps and tail-fits to 2 lambda_2") {
        Field mix(st.mesh);
        mix = Field::from_dofs(st.mesh, (sp.fields.col(1) + sp.fields.col(2)).eval());
        HeatRun run{mix, 1e-3, 2.0, Scheme::ImplicitEuler, nullptr, nullptr, 10};
        const Trajectory traj = evolve(st.op, run);
        const DecayFit full = fit_decay(traj);
        CHECK(full.rate >= 2.0 * lambda2 * 0.99);
        CHECK(full.rate <= 2.0 * lambda3 * 1.01);
        const DecayFit tail = fit_decay(traj, 0.3);
        CHECK(tail.rate == doctest::Approx(2.0 * lambda2).epsilon(0.05));
    }
}

TEST_CASE("nonhomogeneous flux: discrete mass balance") {
    const Setup st;
    Field u0 = Field::interpolate(st.mesh, [](double x) { return 0.2 * x; }, 0.0);
    auto g = [](double x, double t) { return std::cos(t) * std::exp(-x * x); };
    const double dt = 1e-2;
    HeatRun run{u0, dt, 0.5, Scheme::ImplicitEuler, nullptr, g, 1};
    const Trajectory traj = evolve(st.op, run);

    // int_COmega g over the truncated exterior at fixed t factorizes
    double xi = 0.0;
    for (int c = 0; c < st.mesh.cell_count(); ++c) {
        if (st.mesh.cell_inside(c)) continue;
        xi += oracles::simpson([&](double x) { return std::exp(-x * x); }, st.mesh.cell_left(c),
                               st.mesh.cell_right(c), 1e-12);
    }
    for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
        const double t0 = traj.times[k], t1 = traj.times[k + 1];
        const double gained = traj.mass[k + 1] - traj.mass[k];
        const double expected = (std::sin(t1) - std::sin(t0)) * xi;
        CHECK(std::abs(gained - expected) <= 1.0 * xi * dt * dt);
    }
}

TEST_CASE("scheme guards and failure modes") {
    const Setup st;
    Field u0(st.mesh);

    HeatRun bad_dt{u0, 0.0, 1.0, Scheme::ImplicitEuler, nullptr, nullptr, 1};
    CHECK_THROWS_AS(evolve(st.op, bad_dt), ValidationError);

    HeatRun bad_T{u0, 1e-2, 1e-3, Scheme::ImplicitEuler, nullptr, nullptr, 1};
    CHECK_THROWS_AS(evolve(st.op, bad_T), ValidationError);

    // crank-nicolson warns when dt exceeds h
    HeatRun cn{u0, 0.5, 1.0, Scheme::CrankNicolson, nullptr, nullptr, 1};
    const Trajectory traj = evolve(st.op, cn);
    CHECK(traj.warnings.size() == 1);

    // a blowing-up source aborts with the step index
    auto bomb = [](double, double t) { return t > 0.0 ? 1e308 * 1e10 : 0.0; };
    HeatRun exploding{u0, 1e-2, 1.0, Scheme::ImplicitEuler, bomb, nullptr, 1};
    CHECK_THROWS_WITH_AS(evolve(st.op, exploding), doctest::Contains("step"), NumericalError);
}
