#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "pks/cli_io.hpp"
#include "pks/initial_data.hpp"

using namespace pks;
using namespace pks::io;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pks_lab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Points the output root at a scratch directory for the lifetime of the object.
struct OutputRoot {
    explicit OutputRoot(const fs::path& p) { setenv(kOutputRootEnv, p.c_str(), 1); }
    ~OutputRoot() { unsetenv(kOutputRootEnv); }
};

}  // namespace

TEST_CASE("minimal evolve config gets defaults") {
    const auto c = parse_config(json::parse(R"({"mode": "evolve", "n_dim": 3, "m": 8,
        "initial": {"kind": "patch", "radius": 1}, "t_end": 0.1})"));
    CHECK(c.mode == Mode::evolve);
    CHECK(c.cells == 2048);
    CHECK(c.r_max == 4.0);
    CHECK(c.t_end == 0.1);
    CHECK(c.initial.kind == "patch");
    CHECK(c.output_dir == "evolve");
}

TEST_CASE("config errors name the key") {
    auto e = error_of(json::parse(R"({"mode": "evolve", "m": 8, "grid": {"cells": 0}})"));
    CHECK(e.find("grid.cells") != std::string::npos);
    CHECK(e.find("[8, 4194304]") != std::string::npos);

    e = error_of(json::parse(R"({"mode": "sweep-stationary", "m": 1.5})"));
    CHECK(e.find("m >= 3") != std::string::npos);

    e = error_of(json::parse(R"({"mode": "evolve", "m": 8, "gird": {}})"));
    CHECK(e.find("gird") != std::string::npos);

    CHECK(error_of(json::parse(R"({"m": 8})")).find("mode") != std::string::npos);
    CHECK(error_of(json::parse(R"({"mode": "evolve"})")).find("m:") != std::string::npos);
    CHECK(error_of(json::parse(R"({"mode": "sweep-evolve", "m_values": [16, 8]})")).find("increasing") !=
          std::string::npos);
    CHECK(!error_of(json::parse(R"({"mode": "evolve", "m": 8, "m_values": [8]})")).empty());
    CHECK(!error_of(json::parse(R"({"mode": "evolve", "m": 8, "initial": {"kind": "patch", "amplitude": 1}})"))
               .empty());
    CHECK(!error_of(json::parse(R"({"mode": "stationary", "m": 8, "initial": {"kind": "bump"}})")).empty());
    CHECK(!error_of(json::parse(R"({"mode": "evolve", "m": 8, "seed": -1})")).empty());
    CHECK(!error_of(json::parse(R"({"mode": "evolve", "m": 8, "tolerances": {"cfl_diffusion": 0.7}})")).empty());
}

TEST_CASE("sweep defaults and single m") {
    CHECK(parse_config(json::parse(R"({"mode": "sweep-evolve"})")).m_values == std::vector<double>{8, 16, 32, 64});
    CHECK(parse_config(json::parse(R"({"mode": "sweep-stationary"})")).m_values ==
          std::vector<double>{4, 8, 16, 32, 64});
    CHECK(parse_config(json::parse(R"({"mode": "sweep-stationary", "m": 6})")).m_values == std::vector<double>{6});
}

TEST_CASE("config round trip through json") {
    const auto c = parse_config(json::parse(R"({"mode": "sweep-evolve", "m_values": [8, 16, 32, 64],
        "grid": {"r_max": 5, "cells": 512}, "seed": 7})"));
    const auto again = parse_config(to_json(c));
    CHECK(again.m_values == c.m_values);
    CHECK(again.r_max == 5.0);
    CHECK(again.cells == 512);
    CHECK(again.seed == 7);
    CHECK(to_json(again).dump() == to_json(c).dump());
}

TEST_CASE("initial density from the config") {
    auto c = parse_config(json::parse(R"({"mode": "evolve", "m": 8, "grid": {"cells": 256}})"));
    CHECK(config_initial_density(c).max() == doctest::Approx(0.5).epsilon(1e-3));
    c = parse_config(json::parse(R"({"mode": "evolve", "m": 8, "grid": {"cells": 256},
        "initial": {"kind": "stationary", "mass": 4.18879020478639}})"));
    CHECK(config_initial_density(c).total_mass() == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(2e-2));
}

TEST_CASE("doubles survive formatting") {
    for (double x : {0.1, 1.0 / 3.0, 6.929182510314625, 1e-300, -2.5e17, 5e-324}) {
        const auto text = format_double(x);
        CHECK(std::strtod(text.c_str(), nullptr) == x);
    }
}

TEST_CASE("series csv") {
    const auto dir = scratch("series");
    write_series(dir / "empty.csv", {});
    CHECK(count_lines(dir / "empty.csv") == 1);

    const RadialGrid g(3, 4.0, 64);
    const auto s = make_state(bump_density(g, 0.5, 1.0), 8.0);
    const auto bp = barrier_params(s.rho, s);
    const std::vector<EstimateReport> two{make_report(s, bp), make_report(s, bp)};
    write_series(dir / "two.csv", two);
    CHECK(count_lines(dir / "two.csv") == 3);
    const auto text = slurp(dir / "two.csv");
    CHECK(text.rfind("t,", 0) == 0);
}

TEST_CASE("single m sweep writes null slopes") {
    const RadialGrid g(3, 4.0, 128);
    EvolutionSweepConfig cfg;
    cfg.initial = bump_density(g, 0.5, 1.0);
    cfg.m_values = {4.0};
    cfg.t_end = 0.01;
    cfg.snapshots = 2;
    const auto dir = scratch("single");
    const auto files = write_sweep(dir, run_evolution_sweep(cfg));
    REQUIRE(files.per_m.size() == 1);
    CHECK(fs::exists(files.per_m[0]));
    const auto j = json::parse(slurp(files.summary));
    CHECK(j["slopes"].is_null());
    CHECK(j["runs"][0]["file"] == files.per_m[0].filename().string());
}

TEST_CASE("sweep output is byte for byte reproducible") {
    const auto root = scratch("determinism");
    OutputRoot env(root);
    auto cfg = parse_config(json::parse(R"({"mode": "sweep-evolve", "grid": {"cells": 128},
        "t_end": 0.02, "snapshots": 4, "output_dir": "a"})"));
    std::ostringstream log;
    CHECK(execute(cfg, log).exit_code == 0);
    cfg.output_dir = "b";
    CHECK(execute(cfg, log).exit_code == 0);
    for (const char* f : {"sweep.json", "series_m8.csv", "series_m64.csv"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(root / "a" / f));
        CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
    }
    const auto j = json::parse(slurp(root / "a" / "sweep.json"));
    for (const char* name : {"excess_l2", "omega_neg_l1", "omega_neg_l3_cubed", "gradP_l3", "dtP_l1", "comp_residual"})
        CHECK(j["slopes"].contains(name));
}

TEST_CASE("manifest is written when a run fails") {
    const auto root = scratch("failure");
    OutputRoot env(root);
    // A patch filling most of the domain trips the support guard on the first step.
    const auto cfg = parse_config(json::parse(R"({"mode": "evolve", "m": 8, "output_dir": "bad",
        "initial": {"kind": "patch", "radius": 1}, "grid": {"r_max": 1.05, "cells": 64}})"));
    std::ostringstream log;
    const auto out = execute(cfg, log);
    CHECK(out.exit_code == 1);
    REQUIRE(fs::exists(root / "bad" / "manifest.json"));
    const auto m = json::parse(slurp(root / "bad" / "manifest.json"));
    CHECK(m["code_version"] == kCodeVersion);
    CHECK(m["runs"][0]["status"] == "failed");
    CHECK(!m["runs"][0]["error"].get<std::string>().empty());
    CHECK(m["assumption_flags"].contains("pressure_time_derivative_compatibility"));
    CHECK(m["config"]["mode"] == "evolve");
}

TEST_CASE("stationary mode writes profile and bounds") {
    const auto root = scratch("stationary");
    OutputRoot env(root);
    const auto cfg = parse_config(json::parse(R"({"mode": "stationary", "m": 8, "grid": {"cells": 512}})"));
    std::ostringstream log;
    CHECK(execute(cfg, log).exit_code == 0);
    const auto j = json::parse(slurp(root / "stationary" / "summary.json"));
    CHECK(j["ok"] == true);
    CHECK(j["bounds"]["limit_radius"].get<double>() == doctest::Approx(1.0));
    CHECK(count_lines(root / "stationary" / "profile.csv") > 100);
    CHECK(fs::exists(root / "stationary" / "uv.csv"));
}

TEST_CASE("evolve mode with the uniqueness probe") {
    const auto root = scratch("probe");
    OutputRoot env(root);
    const auto cfg = parse_config(json::parse(R"({"mode": "evolve", "m": 8, "grid": {"cells": 128},
        "t_end": 0.02, "snapshots": 4, "perturbation": 0.01, "seed": 3})"));
    std::ostringstream log;
    CHECK(execute(cfg, log).exit_code == 0);
    CHECK(count_lines(root / "evolve" / "series.csv") == 6);
    CHECK(count_lines(root / "evolve" / "probe.csv") == 6);
    const auto m = json::parse(slurp(root / "evolve" / "manifest.json"));
    CHECK(m["assumption_flags"]["initial_density_at_most_half"] == "holds");
    CHECK(m["conservation"][0]["clipped_mass"] == 0.0);
}

TEST_CASE("oracle battery passes") {
    const auto checks = run_validation();
    CHECK(checks.size() > 20);
    for (const auto& c : checks) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.passed);
    }
}

TEST_CASE("a broken laplacian stencil fails the complementarity oracle") {
    const Laplacian broken = [](const RadialGrid& g, std::span<const double> p) {
        // Drops the curvature term: only the 1-D second difference.
        std::vector<double> out(g.cells(), 0.0);
        const double h2 = g.dr() * g.dr();
        for (std::size_t i = 1; i + 1 < g.cells(); ++i) out[i] = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / h2;
        return out;
    };
    CHECK(patch_omega_defect(3, radial_laplacian) <= 1e-9);
    CHECK(patch_omega_defect(3, broken) > 1e-2);
    CHECK(patch_omega_defect(4, broken) > 1e-2);
}
