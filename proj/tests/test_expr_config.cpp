#include "nonlocal/config.hpp"
#include "nonlocal/expr.hpp"
#include "nonlocal/runner.hpp"
#include "nonlocal/sha256.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nonlocal;

TEST_CASE("expression parsing and evaluation") {
    CHECK(Expr::parse("sin(2*pi*x)")(0.25) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(Expr::parse("1+2*x")(3.0) == doctest::Approx(7.0));
    CHECK(Expr::parse("-x^2")(3.0) == doctest::Approx(-9.0));   // ^ binds before unary minus
    CHECK(Expr::parse("2^3^2")(0.0) == doctest::Approx(512.0)); // right associative
    CHECK(Expr::parse("6/3/2")(0.0) == doctest::Approx(1.0));   // left associative
    CHECK(Expr::parse("6-3-2")(0.0) == doctest::Approx(1.0));
    CHECK(Expr::parse("pow(2,10)")(0.0) == doctest::Approx(1024.0));
    CHECK(Expr::parse("x^-1")(4.0) == doctest::Approx(0.25));
    CHECK(Expr::parse("abs(-3)+sqrt(16)")(0.0) == doctest::Approx(7.0));
    CHECK(Expr::parse("exp(0)+cos(0)")(0.0) == doctest::Approx(2.0));
    CHECK(Expr::parse("x*t")(2.0, 3.0) == doctest::Approx(6.0));
    CHECK(Expr::parse("x*t").uses_t());
    CHECK_FALSE(Expr::parse("x*x").uses_t());
}

TEST_CASE("expression syntax errors carry offsets and expectations") {
    CHECK_THROWS_WITH_AS(Expr::parse("(1+2*x"), doctest::Contains("end-of-input"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(Expr::parse("(1+2*x"), doctest::Contains("\")\""), ValidationError);
    CHECK_THROWS_WITH_AS(Expr::parse("1+*2"), doctest::Contains("offset 2"), ValidationError);
    CHECK_THROWS_WITH_AS(Expr::parse("sin 3"), doctest::Contains("\"(\""), ValidationError);
    CHECK_THROWS_WITH_AS(Expr::parse("bogus(3)"), doctest::Contains("offset 0"), ValidationError);
    CHECK_THROWS_AS(Expr::parse("1+2)"), ValidationError);
}

TEST_CASE("expression runtime errors") {
    CHECK_THROWS_AS(Expr::parse("1/x")(0.0), NumericalError);
    CHECK_THROWS_AS(Expr::parse("sqrt(x)")(-1.0), NumericalError);
    CHECK_THROWS_AS(Expr::parse("pow(x,0.5)")(-2.0), NumericalError);
    CHECK_THROWS_AS(Expr::parse("x^-1")(0.0), NumericalError);
}

namespace {

const char* kMinimalConfig = R"json({
  "domain": {"a": 0, "b": 1},
  "s": 0.5,
  "grid": {"h": 0.05, "R": 2},
  "problem": {"kind": "neumann", "f": "sin(2*pi*x)", "g": "0"}
})json";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config parsing: minimal accept, strict schema, aggregated errors") {
    const Config cfg = parse_config_text(kMinimalConfig);
    CHECK(cfg.s == 0.5);
    CHECK(cfg.problem.has_value());
    CHECK(cfg.problem->f.text() == "sin(2*pi*x)");

    CHECK_THROWS_WITH_AS(parse_config_text(R"json({"domain":{"a":0,"b":1},"s":1.5,
        "grid":{"h":0.05,"R":2}})json"),
                         doctest::Contains("must lie in (0,1)"), ValidationError);

    CHECK_THROWS_WITH_AS(parse_config_text(R"json({"domain":{"a":0,"b":1},"s":0.5,
        "grid":{"h":0.05,"R":2},"epsilon_jump":0.1})json"),
                         doctest::Contains("epsilon_jump"), ValidationError);

    // all violations are reported at once
    try {
        parse_config_text(R"json({"domain":{"a":1,"b":0},"s":2,"grid":{"h":-0.1,"R":2}})json");
        CHECK(false);
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("domain") != std::string::npos);
        CHECK(msg.find("s:") != std::string::npos);
        CHECK(msg.find("grid.h") != std::string::npos);
    }

    CHECK_THROWS_WITH_AS(parse_config_text(R"json({"domain":{"a":0,"b":1},"s":0.5,
        "grid":{"h":0.3,"R":2}})json"),
                         doctest::Contains("not an integer"), ValidationError);
}

TEST_CASE("config canonical round trip") {
    const char* full = R"json({
      "domain": {"a": 0, "b": 1},
      "s": 0.75,
      "grid": {"h": 0.02, "R": 2},
      "seed": 99,
      "problem": {"kind": "mixed", "f": "0", "phi": "1",
        "partition": {"segments": [{"lo": -2, "hi": 0, "type": "neumann"},
                                   {"lo": 1, "hi": 3, "type": "dirichlet"}],
                      "beyond": "dirichlet", "farfield_value": 1.0}},
      "heat": {"u0": "x", "dt": 0.001, "t_final": 0.5, "scheme": "crank-nicolson",
               "sample_every": 5},
      "eig": {"k": 4},
      "mc": {"mode": "occupation", "epsilon": 0.001, "jumps": 1000, "bins": 10,
             "burn_in": 0.2},
      "limits": {"mode": "kappa", "u": "x", "s": 0.75,
                 "eps_list": [0.02, 0.01, 0.005]},
      "perimeter": {"s_list": [0.1, 0.25]}
    })json";
    const Config once = parse_config_text(full);
    const std::string emitted = once.canonical().dump(2);
    const Config twice = parse_config_text(emitted);
    CHECK(twice.canonical().dump(2) == emitted);
}

TEST_CASE("CLI runner: exit codes, artifacts, digests, determinism") {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "nlneumann_test";
    fs::remove_all(base);

    SUBCASE("incompatible data exits 3 with the residual reported") {
        Config cfg = parse_config_text(R"json({
          "domain": {"a": 0, "b": 1}, "s": 0.5, "grid": {"h": 0.1, "R": 2},
          "problem": {"kind": "neumann", "f": "1", "g": "0"}})json");
        CHECK(run_subcommand("solve", cfg, (base / "bad").string(), {}) == 3);
    }

    SUBCASE("unknown subcommand exits 2") {
        const Config cfg = parse_config_text(kMinimalConfig);
        CHECK(run_subcommand("explode", cfg, (base / "none").string(), {}) == 2);
    }

    SUBCASE("solve writes byte-identical artifacts with matching digests") {
        const Config cfg = parse_config_text(kMinimalConfig);
        const fs::path out1 = base / "run1";
        const fs::path out2 = base / "run2";
        REQUIRE(run_subcommand("solve", cfg, out1.string(), {}) == 0);
        REQUIRE(run_subcommand("solve", cfg, out2.string(), {}) == 0);

        const std::string csv1 = slurp(out1 / "solution.csv");
        const std::string csv2 = slurp(out2 / "solution.csv");
        CHECK(!csv1.empty());
        CHECK(csv1 == csv2);
        CHECK(csv1.find("x,u\n") == 0);
        CHECK(csv1.find('\r') == std::string::npos);

        const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
        for (const auto& entry : manifest["outputs"]) {
            const std::string content = slurp(out1 / entry["file"].get<std::string>());
            CHECK(sha256_hex(content) == entry["sha256"].get<std::string>());
            CHECK(content.size() == entry["bytes"].get<std::size_t>());
        }
        CHECK(manifest["config"]["s"].get<double>() == 0.5);
    }

    SUBCASE("eig emits the spectrum with a vanishing first eigenvalue") {
        Config cfg = parse_config_text(R"json({
          "domain": {"a": 0, "b": 1}, "s": 0.5, "grid": {"h": 0.1, "R": 2},
          "eig": {"k": 6}})json");
        const fs::path out = base / "eig";
        REQUIRE(run_subcommand("eig", cfg, out.string(), {}) == 0);
        std::ifstream in(out / "spectrum.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "i,lambda,mu,residual");
        double l1 = 0, l2 = 0;
        char comma;
        int idx;
        std::string rest;
        in >> idx >> comma >> l1;
        std::getline(in, rest);
        in >> idx >> comma >> l2;
        CHECK(l1 <= 1e-8 * l2);
    }

    SUBCASE("heat emits a mass-conserving trajectory") {
        Config cfg = parse_config_text(R"json({
          "domain": {"a": 0, "b": 1}, "s": 0.5, "grid": {"h": 0.1, "R": 2},
          "heat": {"u0": "x", "dt": 0.01, "t_final": 0.2}})json");
        const fs::path out = base / "heat";
        REQUIRE(run_subcommand("heat", cfg, out.string(), {}) == 0);
        std::ifstream in(out / "trajectory.csv");
        std::string line;
        std::getline(in, line);
        CHECK(line == "t,mass,E,A");
        double mass0 = -1.0;
        while (std::getline(in, line)) {
            double t, mass, e, a;
            CHECK(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &mass, &e, &a) == 4);
            if (mass0 < 0.0) mass0 = mass;
            CHECK(std::abs(mass - mass0) <= 1e-12);
        }
        CHECK(mass0 == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("seed override lands in the manifest and the outputs") {
        Config cfg = parse_config_text(R"json({
          "domain": {"a": 0, "b": 1}, "s": 0.5, "grid": {"h": 0.1, "R": 2},
          "mc": {"mode": "occupation", "epsilon": 0.001, "jumps": 20000, "bins": 10,
                 "burn_in": 0.1, "start": 0.5}})json");
        RunOverrides ov;
        ov.seed = 777;
        const fs::path out = base / "mc";
        REQUIRE(run_subcommand("mc", cfg, out.string(), ov) == 0);
        const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
        CHECK(manifest["seed"].get<std::uint64_t>() == 777);
        CHECK(fs::exists(out / "occupation.csv"));
        CHECK(fs::exists(out / "occupation.svg"));
    }

    fs::remove_all(base);
}
