#pragma once

#include "nonlocal/operator.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nonlocal {

enum class Scheme { ImplicitEuler, CrankNicolson };

using SpaceTimeFn = std::function<double(double, double)>;  // (x, t)

struct HeatRun {
    Field u0;
    double dt = 1e-3;
    double t_final = 1.0;
    Scheme scheme = Scheme::ImplicitEuler;
    SpaceTimeFn source;  // f(x,t) on Omega, optional
    SpaceTimeFn flux;    // g(x,t) on the truncated exterior, optional
    int sample_every = 1;
    int load_quad_order = 8;
};

/// Time series of the differential-algebraic evolution M du/dt = -B u + load:
/// diagnostics at every step, fields at the sampling stride.
struct Trajectory {
    std::vector<double> times;      // every step, including t = 0
    std::vector<double> mass;       // int_Omega u
    std::vector<double> energy;     // raw double integral E(t)
    std::vector<double> deviation;  // A(t) = int_Omega |u - m|^2
    double mean = 0.0;              // m = mass(0) / |Omega|
    std::vector<double> sample_times;
    std::vector<Field> samples;
    std::vector<std::string> warnings;
};

/// Steps the DAE with the chosen theta-scheme; the singular mass matrix
/// enforces the exterior Neumann relations algebraically at every step.
/// The factorization of (M + theta dt B) is reused across steps.
Trajectory evolve(const DiscreteOperator& op, const HeatRun& run);

struct HeatDiagnostics {
    double mass = 0.0;
    double energy = 0.0;
    double deviation = 0.0;
};

/// mass = 1^T M u, E = (2/c) u^T B u, A = (u - m)^T M (u - m).
HeatDiagnostics diagnostics(const DiscreteOperator& op, const Field& u, double mean);

struct DecayFit {
    double rate = 0.0;                   // fitted c in A(t) ~ e^{-ct}
    bool degenerate = false;             // A hit zero exactly; rate is +inf
    double max_upward_violation = 0.0;   // worst positive step of A(t)
    int samples_used = 0;
};

/// Least-squares slope of log A(t) over the trailing window of the
/// trajectory (tail_fraction of the positive samples).
DecayFit fit_decay(const Trajectory& traj, double tail_fraction = 1.0);

}  // namespace nonlocal
