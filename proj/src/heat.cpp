#include "nonlocal/heat.hpp"

#include "nonlocal/quadrature.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <sstream>

namespace nonlocal {

namespace {

Eigen::VectorXd timed_load(const Mesh& mesh, const SpaceTimeFn& f, const SpaceTimeFn& g, double t,
                           int quad_order) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.dof_count());
    if (!f && !g) return r;
    const GaussRule& gr = gauss_rule(quad_order);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const bool inside = mesh.cell_inside(c);
        if (inside && !f) continue;
        if (!inside && !g) continue;
        const double x0 = mesh.cell_left(c), x1 = mesh.cell_right(c);
        const double h = x1 - x0, mid = 0.5 * (x0 + x1), half = 0.5 * h;
        for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
            const double x = mid + half * gr.nodes[q];
            const double w = gr.weights[q] * half * (inside ? f(x, t) : g(x, t));
            r[c] += w * (x1 - x) / h;
            r[c + 1] += w * (x - x0) / h;
        }
    }
    return r;
}

}  // namespace

HeatDiagnostics diagnostics(const DiscreteOperator& op, const Field& u, double mean) {
    const Eigen::VectorXd d = u.dofs();
    HeatDiagnostics out;
    const Eigen::VectorXd Md = op.mass() * d;
    out.mass = Md.sum();
    out.energy = std::max(0.0, (2.0 / op.c()) * d.dot(op.bilinear() * d));
    const Eigen::VectorXd dev = d.array() - mean;
    out.deviation = dev.dot(op.mass() * dev);
    return out;
}

Trajectory evolve(const DiscreteOperator& op, const HeatRun& run) {
    if (!(run.dt > 0.0)) throw ValidationError("evolve: dt must be positive");
    if (!(run.t_final >= run.dt)) throw ValidationError("evolve: t_final must be at least dt");
    if (run.sample_every < 1) throw ValidationError("evolve: sample_every must be >= 1");
    const Mesh& mesh = op.mesh();
    if (run.u0.values.size() != mesh.node_count()) {
        throw ValidationError("evolve: initial field does not match the operator mesh");
    }

    Trajectory traj;
    const double theta = (run.scheme == Scheme::ImplicitEuler) ? 1.0 : 0.5;
    if (run.scheme == Scheme::CrankNicolson && run.dt > mesh.h()) {
        traj.warnings.push_back(
            "crank-nicolson with dt > h: energy monotonicity is only asymptotic at this step size");
    }

    const Eigen::MatrixXd& B = op.bilinear();
    const Eigen::MatrixXd& M = op.mass();
    Eigen::MatrixXd A = M + (theta * run.dt) * B;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("evolve: factorization of (M + theta dt B) failed");
    }

    const int n_steps = std::max(1, static_cast<int>(std::llround(run.t_final / run.dt)));
    Eigen::VectorXd u = run.u0.dofs();

    const double omega_measure = mesh.omega().length();
    traj.mean = (M * u).sum() / omega_measure;

    auto record = [&](int step, double t) {
        const Field f = Field::from_dofs(mesh, u);
        const HeatDiagnostics d = diagnostics(op, f, traj.mean);
        traj.times.push_back(t);
        traj.mass.push_back(d.mass);
        traj.energy.push_back(d.energy);
        traj.deviation.push_back(d.deviation);
        if (step % run.sample_every == 0 || step == n_steps) {
            traj.sample_times.push_back(t);
            traj.samples.push_back(f);
        }
    };
    record(0, 0.0);

    for (int step = 1; step <= n_steps; ++step) {
        const double t_prev = (step - 1) * run.dt;
        const double t_theta = t_prev + theta * run.dt;
        Eigen::VectorXd rhs = M * u;
        if (theta < 1.0) rhs.noalias() -= ((1.0 - theta) * run.dt) * (B * u);
        if (run.source || run.flux) {
            rhs.noalias() += run.dt * timed_load(mesh, run.source, run.flux, t_theta,
                                                 run.load_quad_order);
        }
        u = llt.solve(rhs);
        if (!u.allFinite()) {
            std::ostringstream msg;
            msg << "evolve: non-finite state at step " << step;
            throw NumericalError(msg.str());
        }
        record(step, step * run.dt);
    }
    return traj;
}

DecayFit fit_decay(const Trajectory& traj, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ValidationError("fit_decay: tail_fraction must lie in (0, 1]");
    }
    DecayFit fit;
    for (std::size_t k = 0; k + 1 < traj.deviation.size(); ++k) {
        fit.max_upward_violation =
            std::max(fit.max_upward_violation, traj.deviation[k + 1] - traj.deviation[k]);
    }
    std::vector<double> ts, logs;
    bool hit_zero = false;
    for (std::size_t k = 0; k < traj.deviation.size(); ++k) {
        if (traj.deviation[k] > 0.0) {
            ts.push_back(traj.times[k]);
            logs.push_back(std::log(traj.deviation[k]));
        } else {
            hit_zero = true;
        }
    }
    if (hit_zero) {
        fit.degenerate = true;
        fit.rate = std::numeric_limits<double>::infinity();
        return fit;
    }
    if (ts.size() < 5) {
        throw ValidationError("fit_decay: needs at least 5 samples with positive deviation");
    }
    const std::size_t first = static_cast<std::size_t>((1.0 - tail_fraction) * ts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t k = first; k < ts.size(); ++k) {
        sx += ts[k];
        sy += logs[k];
        sxx += ts[k] * ts[k];
        sxy += ts[k] * logs[k];
        ++n;
    }
    if (n < 2) throw ValidationError("fit_decay: tail window holds fewer than 2 samples");
    const double denom = n * sxx - sx * sx;
    fit.rate = -(n * sxy - sx * sy) / denom;
    fit.samples_used = static_cast<int>(n);
    return fit;
}

}  // namespace nonlocal
