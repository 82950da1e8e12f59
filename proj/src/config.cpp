#include "nonlocal/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nonlocal {

using json = nlohmann::ordered_json;

ExteriorPartition PartitionConfig::build(double default_horizon) const {
    ExteriorPartition p;
    p.segments = segments;
    p.beyond = beyond;
    p.horizon = horizon.value_or(default_horizon);
    return p;
}

namespace {

class Reader {
public:
    std::vector<std::string> errors;

    void check_keys(const json& j, const std::string& path, std::set<std::string> allowed) {
        if (!j.is_object()) {
            fail(path, "must be an object");
            return;
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!allowed.count(it.key())) {
                fail(path, "unknown key \"" + it.key() + "\"");
            }
        }
    }

    void fail(const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    }

    double number(const json& j, const std::string& path, const std::string& key, double fallback,
                  bool required = false) {
        if (!j.contains(key)) {
            if (required) fail(path + "." + key, "is required");
            return fallback;
        }
        if (!j[key].is_number()) {
            fail(path + "." + key, "must be a number");
            return fallback;
        }
        return j[key].get<double>();
    }

    std::int64_t integer(const json& j, const std::string& path, const std::string& key,
                         std::int64_t fallback) {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_number_integer()) {
            fail(path + "." + key, "must be an integer");
            return fallback;
        }
        return j[key].get<std::int64_t>();
    }

    std::string text(const json& j, const std::string& path, const std::string& key,
                     const std::string& fallback, bool required = false) {
        if (!j.contains(key)) {
            if (required) fail(path + "." + key, "is required");
            return fallback;
        }
        if (!j[key].is_string()) {
            fail(path + "." + key, "must be a string");
            return fallback;
        }
        return j[key].get<std::string>();
    }

    Expr expr(const json& j, const std::string& path, const std::string& key,
              const std::string& fallback, bool allow_t = false) {
        const std::string src = text(j, path, key, fallback);
        try {
            Expr e = Expr::parse(src);
            if (e.uses_t() && !allow_t) {
                fail(path + "." + key, "may not depend on t");
            }
            return e;
        } catch (const ValidationError& err) {
            fail(path + "." + key, err.what());
            return Expr();
        }
    }

    std::vector<double> number_list(const json& j, const std::string& path,
                                    const std::string& key, std::vector<double> fallback) {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_array()) {
            fail(path + "." + key, "must be an array of numbers");
            return fallback;
        }
        std::vector<double> out;
        for (const auto& v : j[key]) {
            if (!v.is_number()) {
                fail(path + "." + key, "must be an array of numbers");
                return fallback;
            }
            out.push_back(v.get<double>());
        }
        return out;
    }
};

PartitionConfig parse_partition(Reader& rd, const json& j, const std::string& path) {
    PartitionConfig pc;
    rd.check_keys(j, path, {"segments", "beyond", "farfield_value", "horizon"});
    if (j.contains("segments")) {
        if (!j["segments"].is_array()) {
            rd.fail(path + ".segments", "must be an array");
        } else {
            int k = 0;
            for (const auto& seg : j["segments"]) {
                const std::string spath = path + ".segments[" + std::to_string(k++) + "]";
                rd.check_keys(seg, spath, {"lo", "hi", "type"});
                ExtSegment es;
                es.lo = rd.number(seg, spath, "lo", 0.0, true);
                es.hi = rd.number(seg, spath, "hi", 0.0, true);
                const std::string type = rd.text(seg, spath, "type", "", true);
                if (type == "dirichlet") {
                    es.cls = ExtClass::Dirichlet;
                } else if (type == "neumann") {
                    es.cls = ExtClass::Neumann;
                } else {
                    rd.fail(spath + ".type", "must be \"dirichlet\" or \"neumann\"");
                }
                pc.segments.push_back(es);
            }
        }
    }
    const std::string beyond = rd.text(j, path, "beyond", "neumann");
    if (beyond == "dirichlet") {
        pc.beyond = ExtClass::Dirichlet;
    } else if (beyond == "neumann") {
        pc.beyond = ExtClass::Neumann;
    } else {
        rd.fail(path + ".beyond", "must be \"dirichlet\" or \"neumann\"");
    }
    if (j.contains("farfield_value")) pc.farfield_value = rd.number(j, path, "farfield_value", 0.0);
    if (j.contains("horizon")) pc.horizon = rd.number(j, path, "horizon", 0.0);
    return pc;
}

json emit_partition(const PartitionConfig& pc) {
    json j;
    json segs = json::array();
    for (const auto& s : pc.segments) {
        json seg;
        seg["lo"] = s.lo;
        seg["hi"] = s.hi;
        seg["type"] = s.cls == ExtClass::Dirichlet ? "dirichlet" : "neumann";
        segs.push_back(seg);
    }
    j["segments"] = segs;
    j["beyond"] = pc.beyond == ExtClass::Dirichlet ? "dirichlet" : "neumann";
    if (pc.farfield_value) j["farfield_value"] = *pc.farfield_value;
    if (pc.horizon) j["horizon"] = *pc.horizon;
    return j;
}

}  // namespace

Config parse_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }

    Reader rd;
    Config cfg;
    rd.check_keys(j, "config",
                  {"domain", "s", "grid", "quadrature", "seed", "problem", "heat", "eig", "mc",
                   "limits", "perimeter"});
    if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");

    double a = 0.0, b = 1.0;
    if (j.contains("domain")) {
        rd.check_keys(j["domain"], "domain", {"a", "b"});
        a = rd.number(j["domain"], "domain", "a", 0.0, true);
        b = rd.number(j["domain"], "domain", "b", 1.0, true);
    } else {
        rd.fail("domain", "is required");
    }
    cfg.s = rd.number(j, "config", "s", 0.5, true);
    if (j.contains("grid")) {
        rd.check_keys(j["grid"], "grid", {"h", "R"});
        cfg.h = rd.number(j["grid"], "grid", "h", 0.05, true);
        cfg.R = rd.number(j["grid"], "grid", "R", 2.0, true);
    } else {
        rd.fail("grid", "is required");
    }
    if (j.contains("quadrature")) {
        rd.check_keys(j["quadrature"], "quadrature", {"order"});
        cfg.quad_order = static_cast<int>(rd.integer(j["quadrature"], "quadrature", "order", 4));
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            rd.fail("seed", "must be an unsigned integer");
        } else {
            cfg.seed = j["seed"].get<std::uint64_t>();
        }
    }

    if (j.contains("problem")) {
        const json& p = j["problem"];
        const std::string path = "problem";
        rd.check_keys(p, path, {"kind", "f", "g", "phi", "partition", "alpha", "beta", "gamma"});
        ProblemSection ps;
        const std::string kind = rd.text(p, path, "kind", "neumann");
        if (kind == "neumann") {
            ps.kind = ProblemSection::Kind::Neumann;
        } else if (kind == "mixed") {
            ps.kind = ProblemSection::Kind::Mixed;
        } else if (kind == "robin") {
            ps.kind = ProblemSection::Kind::Robin;
        } else {
            rd.fail(path + ".kind", "must be \"neumann\", \"mixed\", or \"robin\"");
        }
        ps.f = rd.expr(p, path, "f", "0");
        ps.g = rd.expr(p, path, "g", "0");
        if (ps.kind == ProblemSection::Kind::Mixed) {
            ps.phi = rd.expr(p, path, "phi", "0");
            if (p.contains("partition")) {
                ps.partition = parse_partition(rd, p["partition"], path + ".partition");
            } else {
                rd.fail(path + ".partition", "is required for mixed problems");
            }
        }
        if (ps.kind == ProblemSection::Kind::Robin) {
            ps.alpha = rd.expr(p, path, "alpha", "1");
            ps.beta = rd.expr(p, path, "beta", "1");
            ps.gamma = rd.expr(p, path, "gamma", "0");
        }
        cfg.problem = std::move(ps);
    }

    if (j.contains("heat")) {
        const json& h = j["heat"];
        rd.check_keys(h, "heat",
                      {"u0", "dt", "t_final", "scheme", "source", "flux", "sample_every"});
        HeatSection hs;
        hs.u0 = rd.expr(h, "heat", "u0", "0");
        hs.dt = rd.number(h, "heat", "dt", 1e-3, true);
        hs.t_final = rd.number(h, "heat", "t_final", 1.0, true);
        const std::string scheme = rd.text(h, "heat", "scheme", "implicit-euler");
        if (scheme == "implicit-euler") {
            hs.scheme = Scheme::ImplicitEuler;
        } else if (scheme == "crank-nicolson") {
            hs.scheme = Scheme::CrankNicolson;
        } else {
            rd.fail("heat.scheme", "must be \"implicit-euler\" or \"crank-nicolson\"");
        }
        if (h.contains("source")) hs.source = rd.expr(h, "heat", "source", "0", true);
        if (h.contains("flux")) hs.flux = rd.expr(h, "heat", "flux", "0", true);
        hs.sample_every = static_cast<int>(rd.integer(h, "heat", "sample_every", 10));
        cfg.heat = std::move(hs);
    }

    if (j.contains("eig")) {
        rd.check_keys(j["eig"], "eig", {"k"});
        EigSection es;
        es.k = static_cast<int>(rd.integer(j["eig"], "eig", "k", 6));
        cfg.eig = es;
    }

    if (j.contains("mc")) {
        const json& m = j["mc"];
        rd.check_keys(m, "mc",
                      {"mode", "epsilon", "walkers", "max_jumps", "start_points", "phi", "psi",
                       "partition", "jumps", "bins", "burn_in", "start"});
        McSection ms;
        const std::string mode = rd.text(m, "mc", "mode", "payoff");
        if (mode == "payoff") {
            ms.mode = McSection::Mode::Payoff;
        } else if (mode == "occupation") {
            ms.mode = McSection::Mode::Occupation;
        } else {
            rd.fail("mc.mode", "must be \"payoff\" or \"occupation\"");
        }
        ms.epsilon = rd.number(m, "mc", "epsilon", 1e-3);
        ms.walkers = rd.integer(m, "mc", "walkers", 100000);
        ms.max_jumps = rd.integer(m, "mc", "max_jumps", 100000);
        ms.start_points = rd.number_list(m, "mc", "start_points", {0.5});
        ms.phi = rd.expr(m, "mc", "phi", "0");
        ms.psi = rd.expr(m, "mc", "psi", "0");
        if (m.contains("partition")) {
            ms.partition = parse_partition(rd, m["partition"], "mc.partition");
        } else if (ms.mode == McSection::Mode::Payoff) {
            rd.fail("mc.partition", "is required in payoff mode");
        }
        ms.jumps = rd.integer(m, "mc", "jumps", 1000000);
        ms.bins = static_cast<int>(rd.integer(m, "mc", "bins", 20));
        ms.burn_in = rd.number(m, "mc", "burn_in", 0.1);
        ms.start = rd.number(m, "mc", "start", 0.5 * (a + b));
        cfg.mc = std::move(ms);
    }

    if (j.contains("limits")) {
        const json& l = j["limits"];
        rd.check_keys(l, "limits", {"mode", "u", "v", "s_list", "side", "eps_list", "s"});
        LimitsSection ls;
        const std::string mode = rd.text(l, "limits", "mode", "s-limit");
        if (mode == "s-limit") {
            ls.mode = LimitsSection::Mode::SLimit;
        } else if (mode == "kappa") {
            ls.mode = LimitsSection::Mode::Kappa;
        } else {
            rd.fail("limits.mode", "must be \"s-limit\" or \"kappa\"");
        }
        ls.u = rd.expr(l, "limits", "u", "0");
        ls.v = rd.expr(l, "limits", "v", "1");
        ls.s_list = rd.number_list(l, "limits", "s_list", {0.6, 0.7, 0.8, 0.9, 0.95});
        const std::string side = rd.text(l, "limits", "side", "right");
        if (side == "left") {
            ls.side = BoundarySide::Left;
        } else if (side == "right") {
            ls.side = BoundarySide::Right;
        } else {
            rd.fail("limits.side", "must be \"left\" or \"right\"");
        }
        ls.eps_list = rd.number_list(l, "limits", "eps_list",
                                     {0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125});
        ls.kappa_s = rd.number(l, "limits", "s", 0.75);
        cfg.limits = std::move(ls);
    }

    if (j.contains("perimeter")) {
        rd.check_keys(j["perimeter"], "perimeter", {"s_list"});
        PerimeterSection ps;
        ps.s_list = rd.number_list(j["perimeter"], "perimeter", "s_list", {0.1, 0.25, 0.4});
        cfg.perimeter = std::move(ps);
    }

    // Numeric guards, aggregated.
    if (!(a < b)) rd.fail("domain", "requires a < b");
    if (!(cfg.s > 0.0 && cfg.s < 1.0)) rd.fail("s", "must lie in (0,1)");
    if (!(cfg.h > 0.0)) {
        rd.fail("grid.h", "must be positive");
    } else if (a < b) {
        const double ratio = (b - a) / cfg.h;
        if (std::abs(ratio - std::round(ratio)) > 1e-9) {
            rd.fail("grid.h", "(b-a)/h = " + std::to_string(ratio) + " is not an integer");
        }
        const double ratio_R = cfg.R / cfg.h;
        if (std::abs(ratio_R - std::round(ratio_R)) > 1e-9) {
            rd.fail("grid.R", "R/h = " + std::to_string(ratio_R) + " is not an integer");
        }
    }
    if (cfg.R < 2.0 * (b - a) - 1e-12) rd.fail("grid.R", "must be at least 2(b-a)");
    if (cfg.quad_order < 2) rd.fail("quadrature.order", "must be >= 2");
    if (cfg.heat) {
        if (!(cfg.heat->dt > 0.0)) rd.fail("heat.dt", "must be positive");
        if (!(cfg.heat->t_final >= cfg.heat->dt)) rd.fail("heat.t_final", "must be at least dt");
        if (cfg.heat->sample_every < 1) rd.fail("heat.sample_every", "must be >= 1");
    }
    if (cfg.eig) {
        const int interior = static_cast<int>(std::round((b - a) / cfg.h)) + 1;
        if (cfg.eig->k < 1 || cfg.eig->k > interior) {
            rd.fail("eig.k", "must lie between 1 and the interior DOF count (" +
                                 std::to_string(interior) + ")");
        }
    }
    if (cfg.mc) {
        if (!(cfg.mc->epsilon > 0.0)) rd.fail("mc.epsilon", "must be positive");
        if (cfg.mc->walkers < 1) rd.fail("mc.walkers", "must be >= 1");
        if (cfg.mc->max_jumps < 1) rd.fail("mc.max_jumps", "must be >= 1");
        if (cfg.mc->bins < 1) rd.fail("mc.bins", "must be >= 1");
        if (!(cfg.mc->burn_in >= 0.0 && cfg.mc->burn_in < 1.0)) {
            rd.fail("mc.burn_in", "must lie in [0,1)");
        }
        for (double x0 : cfg.mc->start_points) {
            if (!(x0 > a && x0 < b)) rd.fail("mc.start_points", "must lie inside the domain");
        }
        if (cfg.mc->partition) {
            if (cfg.mc->partition->beyond == ExtClass::Dirichlet &&
                !cfg.mc->partition->farfield_value) {
                rd.fail("mc.partition.farfield_value",
                        "is required when beyond = \"dirichlet\"");
            }
            if (a < b) {
                try {
                    cfg.mc->partition->build(cfg.R).validate(Interval(a, b));
                } catch (const ValidationError& e) {
                    rd.fail("mc.partition", e.what());
                }
            }
        }
    }
    if (cfg.problem && cfg.problem->kind == ProblemSection::Kind::Mixed && cfg.problem->partition) {
        if (cfg.problem->partition->beyond == ExtClass::Dirichlet &&
            !cfg.problem->partition->farfield_value) {
            rd.fail("problem.partition.farfield_value", "is required when beyond = \"dirichlet\"");
        }
        if (a < b) {
            try {
                cfg.problem->partition->build(cfg.R).validate(Interval(a, b));
            } catch (const ValidationError& e) {
                rd.fail("problem.partition", e.what());
            }
        }
    }
    if (cfg.limits) {
        for (double s : cfg.limits->s_list) {
            if (!(s > 0.0 && s < 1.0)) rd.fail("limits.s_list", "entries must lie in (0,1)");
        }
    }
    if (cfg.perimeter) {
        for (double s : cfg.perimeter->s_list) {
            if (!(s > 0.0 && s < 0.5)) rd.fail("perimeter.s_list", "entries must lie in (0, 1/2)");
        }
    }

    if (!rd.errors.empty()) {
        std::ostringstream msg;
        msg << "config validation failed with " << rd.errors.size() << " error(s):";
        for (const auto& e : rd.errors) msg << "\n  - " << e;
        throw ValidationError(msg.str());
    }
    cfg.domain = Interval(a, b);
    return cfg;
}

Config parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config: cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

json Config::canonical() const {
    json j;
    j["domain"] = {{"a", domain.a}, {"b", domain.b}};
    j["s"] = s;
    j["grid"] = {{"h", h}, {"R", R}};
    j["quadrature"] = {{"order", quad_order}};
    j["seed"] = seed;
    if (problem) {
        json p;
        switch (problem->kind) {
            case ProblemSection::Kind::Neumann: p["kind"] = "neumann"; break;
            case ProblemSection::Kind::Mixed: p["kind"] = "mixed"; break;
            case ProblemSection::Kind::Robin: p["kind"] = "robin"; break;
        }
        p["f"] = problem->f.text();
        p["g"] = problem->g.text();
        if (problem->kind == ProblemSection::Kind::Mixed) {
            p["phi"] = problem->phi.text();
            if (problem->partition) p["partition"] = emit_partition(*problem->partition);
        }
        if (problem->kind == ProblemSection::Kind::Robin) {
            p["alpha"] = problem->alpha.text();
            p["beta"] = problem->beta.text();
            p["gamma"] = problem->gamma.text();
        }
        j["problem"] = p;
    }
    if (heat) {
        json h2;
        h2["u0"] = heat->u0.text();
        h2["dt"] = heat->dt;
        h2["t_final"] = heat->t_final;
        h2["scheme"] = heat->scheme == Scheme::ImplicitEuler ? "implicit-euler" : "crank-nicolson";
        if (heat->source) h2["source"] = heat->source->text();
        if (heat->flux) h2["flux"] = heat->flux->text();
        h2["sample_every"] = heat->sample_every;
        j["heat"] = h2;
    }
    if (eig) j["eig"] = {{"k", eig->k}};
    if (mc) {
        json m;
        m["mode"] = mc->mode == McSection::Mode::Payoff ? "payoff" : "occupation";
        m["epsilon"] = mc->epsilon;
        m["walkers"] = mc->walkers;
        m["max_jumps"] = mc->max_jumps;
        m["start_points"] = mc->start_points;
        m["phi"] = mc->phi.text();
        m["psi"] = mc->psi.text();
        if (mc->partition) m["partition"] = emit_partition(*mc->partition);
        m["jumps"] = mc->jumps;
        m["bins"] = mc->bins;
        m["burn_in"] = mc->burn_in;
        m["start"] = mc->start;
        j["mc"] = m;
    }
    if (limits) {
        json l;
        l["mode"] = limits->mode == LimitsSection::Mode::SLimit ? "s-limit" : "kappa";
        l["u"] = limits->u.text();
        l["v"] = limits->v.text();
        l["s_list"] = limits->s_list;
        l["side"] = limits->side == BoundarySide::Right ? "right" : "left";
        l["eps_list"] = limits->eps_list;
        l["s"] = limits->kappa_s;
        j["limits"] = l;
    }
    if (perimeter) j["perimeter"] = {{"s_list", perimeter->s_list}};
    return j;
}

}  // namespace nonlocal
