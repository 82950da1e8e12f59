#include "nonlocal/runner.hpp"

#include "nonlocal/elliptic.hpp"
#include "nonlocal/heat.hpp"
#include "nonlocal/output.hpp"
#include "nonlocal/sha256.hpp"
#include "nonlocal/spectral.hpp"
#include "nonlocal/stochastic.hpp"
#include "nonlocal/version.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace nonlocal {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

class OutputSink {
public:
    OutputSink(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content) {
        const std::filesystem::path path = std::filesystem::path(dir_) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationError("cannot write output file " + path.string());
        out << content;
        out.close();
        json entry;
        entry["file"] = name;
        entry["bytes"] = content.size();
        entry["sha256"] = sha256_hex(content);
        files_.push_back(entry);
    }

    json manifest_entries() const {
        json arr = json::array();
        for (const auto& f : files_) arr.push_back(f);
        return arr;
    }

private:
    std::string dir_;
    std::vector<json> files_;
};

ScalarFn fn_of(const Expr& e) {
    if (e.empty()) return nullptr;
    return [e](double x) { return e(x); };
}

SpaceTimeFn fn_xt(const Expr& e) {
    return [e](double x, double t) { return e(x, t); };
}

void add_field_rows(CsvTable& table, const Mesh& mesh, const Field& f) {
    for (int i = 0; i < mesh.node_count(); ++i) table.add_row({mesh.node(i), f.values[i]});
    table.add_row({mesh.right_tail_edge(), f.farfield});
}

json run_solve(const Config& cfg, int threads, OutputSink& sink) {
    if (!cfg.problem) throw ValidationError("solve: config has no \"problem\" section");
    const ProblemSection& p = *cfg.problem;
    const Mesh mesh = Mesh::build(cfg.domain, cfg.h, cfg.R);
    AssemblyOptions aopts;
    aopts.quad_order = cfg.quad_order;
    aopts.threads = threads;
    const auto t0 = Clock::now();
    const DiscreteOperator op = DiscreteOperator::assemble(mesh, cfg.s, aopts);
    const double assemble_ms = ms_since(t0);

    const auto t1 = Clock::now();
    EllipticSolution sol = [&]() {
        switch (p.kind) {
            case ProblemSection::Kind::Neumann:
                return solve_neumann(op, fn_of(p.f), fn_of(p.g));
            case ProblemSection::Kind::Mixed: {
                const ExteriorPartition part = p.partition->build(cfg.R);
                const double ffv = p.partition->farfield_value.value_or(0.0);
                return solve_mixed(op, fn_of(p.f), fn_of(p.phi), fn_of(p.g), part, ffv);
            }
            case ProblemSection::Kind::Robin:
            default:
                return solve_robin(op, fn_of(p.alpha), fn_of(p.beta), fn_of(p.gamma), fn_of(p.f));
        }
    }();
    const double solve_ms = ms_since(t1);

    CsvTable table({"x", "u"});
    add_field_rows(table, mesh, sol.field);
    sink.write("solution.csv", table.render());

    PlotSeries series{"u", {}, {}};
    for (int i = 0; i < mesh.node_count(); ++i) {
        series.x.push_back(mesh.node(i));
        series.y.push_back(sol.field.values[i]);
    }
    sink.write("solution.svg", render_line_plot("solution profile", "x", "u", {series}));

    json summary;
    summary["residual_norm"] = sol.residual_norm;
    summary["compat_residual"] = sol.compat_residual;
    summary["mean_pinned"] = sol.mean_pinned;
    summary["farfield"] = sol.field.farfield;
    summary["timings_ms"] = {{"assemble", assemble_ms}, {"solve", solve_ms}};
    return summary;
}

json run_eig(const Config& cfg, int threads, OutputSink& sink) {
    const int k = cfg.eig ? cfg.eig->k : 6;
    const Mesh mesh = Mesh::build(cfg.domain, cfg.h, cfg.R);
    AssemblyOptions aopts;
    aopts.quad_order = cfg.quad_order;
    aopts.threads = threads;
    const DiscreteOperator op = DiscreteOperator::assemble(mesh, cfg.s, aopts);
    const SpectralResult res = eigs(op, k);

    CsvTable table({"i", "lambda", "mu", "residual"});
    for (int i = 0; i < k; ++i) {
        table.add_row({static_cast<double>(i + 1), res.lambdas[i], res.mus[i], res.residuals[i]});
    }
    sink.write("spectrum.csv", table.render());

    std::vector<std::string> cols{"x"};
    for (int i = 1; i <= k; ++i) cols.push_back("u" + std::to_string(i));
    CsvTable fields(cols);
    for (int n = 0; n < mesh.node_count(); ++n) {
        std::vector<double> row{mesh.node(n)};
        for (int i = 0; i < k; ++i) row.push_back(res.fields(n, i));
        fields.add_row(row);
    }
    sink.write("eigenfields.csv", fields.render());

    PlotSeries series{"lambda", {}, {}};
    for (int i = 0; i < k; ++i) {
        series.x.push_back(i + 1);
        series.y.push_back(res.lambdas[i]);
    }
    sink.write("spectrum.svg", render_line_plot("Neumann spectrum", "index", "lambda", {series}));

    json summary;
    summary["lambda_1"] = res.lambdas[0];
    if (k > 1) summary["lambda_2"] = res.lambdas[1];
    return summary;
}

json run_heat(const Config& cfg, int threads, OutputSink& sink) {
    if (!cfg.heat) throw ValidationError("heat: config has no \"heat\" section");
    const HeatSection& hs = *cfg.heat;
    const Mesh mesh = Mesh::build(cfg.domain, cfg.h, cfg.R);
    AssemblyOptions aopts;
    aopts.quad_order = cfg.quad_order;
    aopts.threads = threads;
    const DiscreteOperator op = DiscreteOperator::assemble(mesh, cfg.s, aopts);

    HeatRun run{Field::interpolate(mesh, [&](double x) { return hs.u0(x); },
                                   0.5 * (hs.u0(mesh.left_tail_edge()) +
                                          hs.u0(mesh.right_tail_edge()))),
                hs.dt,
                hs.t_final,
                hs.scheme,
                hs.source ? fn_xt(*hs.source) : SpaceTimeFn(),
                hs.flux ? fn_xt(*hs.flux) : SpaceTimeFn(),
                hs.sample_every};
    const Trajectory traj = evolve(op, run);
    for (const auto& w : traj.warnings) std::cerr << "warning: " << w << "\n";

    CsvTable table({"t", "mass", "E", "A"});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        table.add_row({traj.times[k], traj.mass[k], traj.energy[k], traj.deviation[k]});
    }
    sink.write("trajectory.csv", table.render());

    CsvTable field({"x", "u"});
    add_field_rows(field, mesh, traj.samples.back());
    sink.write("final_field.csv", field.render());

    PlotSeries series{"log A", {}, {}};
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.deviation[k] > 0.0) {
            series.x.push_back(traj.times[k]);
            series.y.push_back(std::log(traj.deviation[k]));
        }
    }
    if (!series.x.empty()) {
        sink.write("decay.svg", render_line_plot("deviation decay", "t", "log A(t)", {series}));
    }

    json summary;
    summary["mean"] = traj.mean;
    summary["mass_drift"] = std::abs(traj.mass.back() - traj.mass.front());
    summary["warnings"] = traj.warnings;
    return summary;
}

json run_mc(const Config& cfg, std::uint64_t seed, int threads, OutputSink& sink) {
    if (!cfg.mc) throw ValidationError("mc: config has no \"mc\" section");
    const McSection& ms = *cfg.mc;
    WalkConfig wc;
    wc.s = cfg.s;
    wc.omega = cfg.domain;
    wc.eps = ms.epsilon;
    wc.partition = ms.partition ? ms.partition->build(cfg.R)
                                : ExteriorPartition::uniform(ExtClass::Neumann, cfg.R);
    wc.phi = fn_of(ms.phi);
    wc.psi = ms.psi.empty() ? nullptr : fn_of(ms.psi);
    wc.max_jumps = ms.max_jumps;
    wc.walkers = ms.walkers;
    wc.seed = seed;
    wc.threads = threads;

    json summary;
    if (ms.mode == McSection::Mode::Payoff) {
        const std::vector<McResult> results = run_payoff(wc, ms.start_points);
        CsvTable table({"x0", "estimate", "std_error", "walkers", "absorbed", "capped"});
        bool warned = false;
        for (std::size_t i = 0; i < results.size(); ++i) {
            const McResult& r = results[i];
            table.add_row({ms.start_points[i], r.estimate, r.std_error,
                           static_cast<double>(r.walkers), static_cast<double>(r.absorbed),
                           static_cast<double>(r.capped)});
            warned = warned || r.bias_warning;
        }
        sink.write("payoff.csv", table.render());
        if (warned) {
            std::cerr << "warning: more than 1% of walkers hit the jump cap; "
                         "the estimate may be biased\n";
        }
        summary["bias_warning"] = warned;
    } else {
        const OccupationResult occ =
            occupation_histogram(wc, ms.jumps, ms.bins, ms.burn_in, ms.start);
        CsvTable table({"bin_lo", "bin_hi", "count", "frequency"});
        PlotSeries series{"occupation", {}, {}};
        for (int k = 0; k < ms.bins; ++k) {
            table.add_row({occ.bin_edges[k], occ.bin_edges[k + 1],
                           static_cast<double>(occ.counts[k]), occ.frequency[k]});
            series.x.push_back(0.5 * (occ.bin_edges[k] + occ.bin_edges[k + 1]));
            series.y.push_back(occ.frequency[k]);
        }
        sink.write("occupation.csv", table.render());
        sink.write("occupation.svg",
                   render_line_plot("occupation histogram", "x", "frequency", {series}));
        summary["total_counted"] = occ.total;
    }
    return summary;
}

json run_limits(const Config& cfg, OutputSink& sink) {
    if (!cfg.limits) throw ValidationError("limits: config has no \"limits\" section");
    const LimitsSection& ls = *cfg.limits;
    json summary;
    if (ls.mode == LimitsSection::Mode::SLimit) {
        SLimitOptions opt;
        opt.omega = cfg.domain;
        opt.R_factor = std::max(2, static_cast<int>(std::round(cfg.R / cfg.domain.length())));
        const auto rows = s_limit_suite(fn_of(ls.u), fn_of(ls.v), ls.s_list, opt);
        CsvTable table({"s", "flux", "scaled_energy"});
        PlotSeries flux{"flux", {}, {}}, energy{"scaled energy", {}, {}};
        for (const auto& r : rows) {
            table.add_row({r.s, r.flux, r.scaled_energy});
            flux.x.push_back(r.s);
            flux.y.push_back(r.flux);
            energy.x.push_back(r.s);
            energy.y.push_back(r.scaled_energy);
        }
        sink.write("limits.csv", table.render());
        sink.write("flux_vs_s.svg",
                   render_line_plot("s -> 1 limits", "s", "value", {flux, energy}));
    } else {
        const KappaEstimate est =
            boundary_kappa(fn_of(ls.u), cfg.domain, ls.kappa_s, ls.side, ls.eps_list);
        CsvTable table({"eps", "ratio"});
        for (std::size_t k = 0; k < est.eps.size(); ++k) {
            table.add_row({est.eps[k], est.ratios[k]});
        }
        sink.write("kappa.csv", table.render());
        summary["kappa_limit"] = est.limit;
    }
    return summary;
}

json run_perimeter(const Config& cfg, OutputSink& sink) {
    const PerimeterSection per = cfg.perimeter.value_or(PerimeterSection{});
    CsvTable table({"s", "closed_form", "quadrature", "rel_error"});
    for (double s : per.s_list) {
        const double cf = fractional_perimeter(cfg.domain, s);
        const double q = fractional_perimeter_quadrature(cfg.domain, s);
        table.add_row({s, cf, q, std::abs(cf - q) / cf});
    }
    sink.write("perimeter.csv", table.render());
    return json::object();
}

}  // namespace

int run_subcommand(const std::string& subcommand, Config cfg, const std::string& out_dir,
                   const RunOverrides& overrides) {
    try {
        if (overrides.seed) cfg.seed = *overrides.seed;
        const int threads = std::max(1, overrides.threads);
        const auto t0 = Clock::now();

        OutputSink sink(out_dir);
        json summary;
        if (subcommand == "solve") {
            summary = run_solve(cfg, threads, sink);
        } else if (subcommand == "eig") {
            summary = run_eig(cfg, threads, sink);
        } else if (subcommand == "heat") {
            summary = run_heat(cfg, threads, sink);
        } else if (subcommand == "mc") {
            summary = run_mc(cfg, cfg.seed, threads, sink);
        } else if (subcommand == "limits") {
            summary = run_limits(cfg, sink);
        } else if (subcommand == "perimeter") {
            summary = run_perimeter(cfg, sink);
        } else {
            throw ValidationError("unknown subcommand \"" + subcommand +
                                  "\" (expected solve, eig, heat, mc, limits, or perimeter)");
        }

        json manifest;
        manifest["tool"] = {{"name", kToolName},
                            {"version", kToolVersion},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)}};
        manifest["subcommand"] = subcommand;
        manifest["seed"] = cfg.seed;
        manifest["threads"] = threads;
        manifest["config"] = cfg.canonical();
        manifest["summary"] = summary;
        manifest["outputs"] = sink.manifest_entries();
        manifest["wall_ms"] = ms_since(t0);

        const std::filesystem::path mpath = std::filesystem::path(out_dir) / "manifest.json";
        std::ofstream mf(mpath, std::ios::binary);
        mf << manifest.dump(2) << "\n";
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace nonlocal
