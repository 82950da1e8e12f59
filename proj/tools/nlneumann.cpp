#include "nonlocal/config.hpp"
#include "nonlocal/runner.hpp"
#include "nonlocal/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Solver toolkit for the fractional Laplacian with nonlocal Neumann conditions"};
    app.set_version_flag("--version", std::string(nonlocal::kToolVersion));

    std::string subcommand;
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;

    app.add_option("subcommand", subcommand,
                   "one of: solve, eig, heat, mc, limits, perimeter")
        ->required();
    app.add_option("--config", config_path, "path to the JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--seed", seed, "RNG seed, overrides the config")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--threads", threads, "worker threads for assembly and Monte Carlo")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    nonlocal::Config cfg;
    try {
        cfg = nonlocal::parse_config(config_path);
    } catch (const nonlocal::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    nonlocal::RunOverrides overrides;
    if (seed_given) overrides.seed = seed;
    overrides.threads = threads;
    return nonlocal::run_subcommand(subcommand, cfg, out_dir, overrides);
}
