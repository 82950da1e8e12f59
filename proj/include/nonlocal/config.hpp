#pragma once

#include "nonlocal/expr.hpp"
#include "nonlocal/heat.hpp"
#include "nonlocal/interval.hpp"
#include "nonlocal/operator.hpp"
#include "nonlocal/partition.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nonlocal {

struct PartitionConfig {
    std::vector<ExtSegment> segments;
    ExtClass beyond = ExtClass::Neumann;
    std::optional<double> farfield_value;
    std::optional<double> horizon;  // defaults to the grid radius R

    ExteriorPartition build(double default_horizon) const;
};

struct ProblemSection {
    enum class Kind { Neumann, Mixed, Robin };
    Kind kind = Kind::Neumann;
    Expr f, g;
    Expr phi;  // mixed
    std::optional<PartitionConfig> partition;
    Expr alpha, beta, gamma;  // robin
};

struct HeatSection {
    Expr u0;
    double dt = 1e-3;
    double t_final = 1.0;
    Scheme scheme = Scheme::ImplicitEuler;
    std::optional<Expr> source;
    std::optional<Expr> flux;
    int sample_every = 10;
};

struct EigSection {
    int k = 6;
};

struct McSection {
    enum class Mode { Payoff, Occupation };
    Mode mode = Mode::Payoff;
    double epsilon = 1e-3;
    std::int64_t walkers = 100000;
    std::int64_t max_jumps = 100000;
    std::vector<double> start_points{0.5};
    Expr phi, psi;
    std::optional<PartitionConfig> partition;
    std::int64_t jumps = 1000000;  // occupation mode
    int bins = 20;
    double burn_in = 0.1;
    double start = 0.5;
};

struct LimitsSection {
    enum class Mode { SLimit, Kappa };
    Mode mode = Mode::SLimit;
    Expr u, v;
    std::vector<double> s_list;
    BoundarySide side = BoundarySide::Right;
    std::vector<double> eps_list;
    double kappa_s = 0.75;
};

struct PerimeterSection {
    std::vector<double> s_list{0.1, 0.25, 0.4};
};

/// Full batch configuration: strict schema, unknown keys are fatal, all
/// validation failures are reported together.
struct Config {
    Interval domain{0.0, 1.0};
    double s = 0.5;
    double h = 0.05;
    double R = 2.0;
    int quad_order = 4;
    std::uint64_t seed = 0;

    std::optional<ProblemSection> problem;
    std::optional<HeatSection> heat;
    std::optional<EigSection> eig;
    std::optional<McSection> mc;
    std::optional<LimitsSection> limits;
    std::optional<PerimeterSection> perimeter;

    /// Canonical serialization; parse(emit(c)) reproduces c.
    nlohmann::ordered_json canonical() const;
};

Config parse_config_text(const std::string& json_text);
Config parse_config(const std::string& path);

}  // namespace nonlocal
