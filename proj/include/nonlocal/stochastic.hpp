#pragma once

#include "nonlocal/interval.hpp"
#include "nonlocal/partition.hpp"
#include "nonlocal/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nonlocal {

/// Reflected Levy-flight walker configuration (compound-Poisson
/// approximation of the jump process with small jumps below eps removed).
struct WalkConfig {
    double s = 0.5;
    Interval omega{0.0, 1.0};
    double eps = 1e-3;  // small-jump cutoff
    ExteriorPartition partition;
    std::function<double(double)> phi;  // final payoff on the Dirichlet region
    std::function<double(double)> psi;  // bonus per Neumann landing (optional)
    std::int64_t max_jumps = 100000;
    std::int64_t walkers = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t walkers = 0;
    std::int64_t absorbed = 0;
    std::int64_t capped = 0;
    bool bias_warning = false;  // capped fraction exceeded 1%
};

/// |Z| for the cutoff jump law P(|Z| > z) = (eps/z)^{2s}, z >= eps,
/// from a uniform draw U in (0, 1].
double jump_magnitude(double s, double eps, double U);

/// Signed jump displacement: magnitude as above, fair sign.
double sample_jump(double s, double eps, Rng& rng);

/// Exact inverse-CDF return point in (a,b) for a walker stranded at the
/// exterior point x, with density proportional to |x-y|^{-1-2s}. U = 0 maps
/// to the far endpoint, U = 1 to the near one. Valid at any distance.
double return_point(double x, const Interval& omega, double s, double U);
double sample_return(double x, const Interval& omega, double s, Rng& rng);

/// Expected-payoff estimates, one per start point. Walkers jump until they
/// land in the Dirichlet region (collect phi, stop) or the Neumann region
/// (collect psi, return, continue). Capped walkers are excluded from the
/// estimate and flagged when they exceed 1%.
std::vector<McResult> run_payoff(const WalkConfig& config, const std::vector<double>& starts);

struct OccupationResult {
    std::vector<double> bin_edges;      // bins + 1 edges over [a, b]
    std::vector<std::int64_t> counts;   // post-burn-in interior positions
    std::vector<double> frequency;      // counts / total
    std::int64_t total = 0;
};

/// Stationary occupation of the embedded chain in pure reflection mode
/// (Dirichlet region must be empty).
OccupationResult occupation_histogram(const WalkConfig& config, std::int64_t total_jumps,
                                      int bins, double burn_in_fraction, double start);

}  // namespace nonlocal
