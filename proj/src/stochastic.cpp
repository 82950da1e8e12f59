#include "nonlocal/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nonlocal {

double jump_magnitude(double s, double eps, double U) {
    if (!(eps > 0.0)) throw ValidationError("jump_magnitude: eps must be positive");
    if (!(U > 0.0 && U <= 1.0)) throw ValidationError("jump_magnitude: U must lie in (0,1]");
    return eps * std::pow(U, -1.0 / (2.0 * s));
}

double sample_jump(double s, double eps, Rng& rng) {
    const double mag = jump_magnitude(s, eps, rng.uniform_oc());
    return rng.coin() ? mag : -mag;
}

double return_point(double x, const Interval& omega, double s, double U) {
    if (omega.contains_closed(x)) {
        throw ValidationError("return_point: walker must be outside [a,b]");
    }
    const double p = -2.0 * s;
    if (x > omega.b) {
        const double mix = U * std::pow(x - omega.b, p) + (1.0 - U) * std::pow(x - omega.a, p);
        return x - std::pow(mix, -1.0 / (2.0 * s));
    }
    const double mix = U * std::pow(omega.a - x, p) + (1.0 - U) * std::pow(omega.b - x, p);
    return x + std::pow(mix, -1.0 / (2.0 * s));
}

double sample_return(double x, const Interval& omega, double s, Rng& rng) {
    double y = return_point(x, omega, s, rng.uniform());
    // Guard against landing exactly on an endpoint after rounding.
    if (y <= omega.a) y = std::nextafter(omega.a, omega.b);
    if (y >= omega.b) y = std::nextafter(omega.b, omega.a);
    return y;
}

namespace {

struct WalkOutcome {
    double payoff = 0.0;
    bool absorbed = false;
};

WalkOutcome walk_once(const WalkConfig& cfg, double start, Rng rng) {
    WalkOutcome out;
    double x = start;
    for (std::int64_t j = 0; j < cfg.max_jumps; ++j) {
        const double z = sample_jump(cfg.s, cfg.eps, rng);
        const double landed = x + z;
        if (cfg.omega.contains(landed)) {
            x = landed;
            continue;
        }
        if (cfg.partition.classify(landed, cfg.omega) == ExtClass::Dirichlet) {
            out.payoff += cfg.phi ? cfg.phi(landed) : 0.0;
            out.absorbed = true;
            return out;
        }
        if (cfg.psi) out.payoff += cfg.psi(landed);
        x = sample_return(landed, cfg.omega, cfg.s, rng);
    }
    return out;  // capped
}

}  // namespace

std::vector<McResult> run_payoff(const WalkConfig& config, const std::vector<double>& starts) {
    if (!config.partition.has_dirichlet()) {
        throw ValidationError("run_payoff: empty Dirichlet region, the walk never terminates; "
                              "use occupation_histogram for pure reflection");
    }
    config.partition.validate(config.omega);
    if (config.max_jumps < 1) throw ValidationError("run_payoff: max_jumps must be >= 1");
    if (config.walkers < 1) throw ValidationError("run_payoff: walkers must be >= 1");
    for (double x0 : starts) {
        if (!config.omega.contains(x0)) {
            throw ValidationError("run_payoff: start points must lie inside Omega");
        }
    }

    std::vector<McResult> results;
    results.reserve(starts.size());
    for (std::size_t si = 0; si < starts.size(); ++si) {
        const double x0 = starts[si];
        std::vector<WalkOutcome> outcomes(config.walkers);
        auto worker = [&](std::int64_t w0, std::int64_t w1) {
            for (std::int64_t w = w0; w < w1; ++w) {
                const std::uint64_t stream_id =
                    static_cast<std::uint64_t>(si) * static_cast<std::uint64_t>(config.walkers) +
                    static_cast<std::uint64_t>(w);
                outcomes[w] = walk_once(config, x0, Rng::stream(config.seed, stream_id));
            }
        };
        const int threads = std::max(1, config.threads);
        if (threads == 1) {
            worker(0, config.walkers);
        } else {
            std::vector<std::thread> pool;
            const std::int64_t chunk = (config.walkers + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                const std::int64_t w0 = t * chunk;
                const std::int64_t w1 = std::min<std::int64_t>(config.walkers, w0 + chunk);
                if (w0 < w1) pool.emplace_back(worker, w0, w1);
            }
            for (auto& th : pool) th.join();
        }

        // Deterministic reduction in walker order.
        McResult res;
        res.walkers = config.walkers;
        double sum = 0.0;
        for (const auto& o : outcomes) {
            if (o.absorbed) {
                ++res.absorbed;
                sum += o.payoff;
            } else {
                ++res.capped;
            }
        }
        if (res.absorbed == 0) {
            throw NumericalError("run_payoff: every walker hit the jump cap");
        }
        res.estimate = sum / static_cast<double>(res.absorbed);
        double ss = 0.0;
        for (const auto& o : outcomes) {
            if (o.absorbed) {
                const double d = o.payoff - res.estimate;
                ss += d * d;
            }
        }
        if (res.absorbed > 1) {
            res.std_error = std::sqrt(ss / static_cast<double>(res.absorbed - 1)) /
                            std::sqrt(static_cast<double>(res.absorbed));
        }
        res.bias_warning =
            static_cast<double>(res.capped) > 0.01 * static_cast<double>(res.walkers);
        results.push_back(res);
    }
    return results;
}

OccupationResult occupation_histogram(const WalkConfig& config, std::int64_t total_jumps,
                                      int bins, double burn_in_fraction, double start) {
    if (config.partition.has_dirichlet()) {
        throw ValidationError("occupation_histogram: requires an empty Dirichlet region");
    }
    if (bins < 1) throw ValidationError("occupation_histogram: bins must be >= 1");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
        throw ValidationError("occupation_histogram: burn-in fraction must lie in [0,1)");
    }
    if (!config.omega.contains(start)) {
        throw ValidationError("occupation_histogram: start must lie inside Omega");
    }

    OccupationResult out;
    const double a = config.omega.a, L = config.omega.length();
    out.bin_edges.resize(bins + 1);
    for (int k = 0; k <= bins; ++k) out.bin_edges[k] = a + L * k / bins;
    out.counts.assign(bins, 0);

    Rng rng = Rng::stream(config.seed, 0);
    double x = start;
    const std::int64_t burn = static_cast<std::int64_t>(burn_in_fraction * total_jumps);
    for (std::int64_t j = 0; j < total_jumps; ++j) {
        const double z = sample_jump(config.s, config.eps, rng);
        double landed = x + z;
        if (!config.omega.contains(landed)) {
            landed = sample_return(landed, config.omega, config.s, rng);
        }
        x = landed;
        if (j < burn) continue;
        int bin = static_cast<int>((x - a) / L * bins);
        bin = std::clamp(bin, 0, bins - 1);
        ++out.counts[bin];
        ++out.total;
    }
    out.frequency.resize(bins);
    for (int k = 0; k < bins; ++k) {
        out.frequency[k] = static_cast<double>(out.counts[k]) / static_cast<double>(out.total);
    }
    return out;
}

}  // namespace nonlocal
