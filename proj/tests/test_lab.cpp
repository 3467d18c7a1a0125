#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "roughns/lab.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace roughns;
namespace fs = std::filesystem;

namespace {

std::string small_solve_config(const std::string& outdir) {
    return R"({
  "schema_version": 1,
  "kind": "solve",
  "solver": {"dim": 2, "trunc": 8, "viscosity": 0.01, "dt": 0.0078125, "horizon": 0.25,
             "dealias": true, "store_every": 4, "store_states": false},
  "initial": {"kind": "taylor-green"},
  "family": {"preset": "zero"},
  "noise": {"kind": "zero", "mesh": 0.25},
  "checks": {"exact_decay_tolerance": 1e-8},
  "output": {"directory": ")" +
           outdir + R"("}
})";
}

nlohmann::json read_summary(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    nlohmann::json j;
    is >> j;
    return j;
}

} // namespace

TEST_CASE("experiment run writes a summary with passing checks") {
    const fs::path root = fs::temp_directory_path() / "roughns_lab_test";
    fs::remove_all(root);
    const auto outcome = run_experiment_text(small_solve_config("tg"), root.string());
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.pass);
    const auto summary = read_summary(outcome.summary_path);
    CHECK(summary["pass"] == true);
    CHECK(summary["kind"] == "solve");
    CHECK(summary["artifact_version"] == "0.1.0");
    CHECK(summary.contains("config_hash"));
    CHECK(fs::exists(root / "tg" / "trajectory.csv"));
    CHECK(fs::exists(root / "tg" / "enstrophy.svg"));
}

TEST_CASE("summaries are byte-identical across repeated runs") {
    const fs::path root = fs::temp_directory_path() / "roughns_lab_repro";
    fs::remove_all(root);
    const auto a = run_experiment_text(small_solve_config("a"), root.string());
    const auto b = run_experiment_text(small_solve_config("a"), root.string());
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    std::ifstream fa(a.summary_path), fb(b.summary_path);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("malformed json is rejected with a line anchor") {
    const auto outcome = run_experiment_text("{\n  \"schema_version\": 1,\n  bogus\n}");
    CHECK(outcome.exit_code == 2);
    CHECK(outcome.message.find("line 3") != std::string::npos);
}

TEST_CASE("unknown keys are rejected (fail-closed schema)") {
    std::string cfg = small_solve_config("x");
    cfg.insert(cfg.find("\"kind\""), "\"surprise\": 1,\n  ");
    const auto outcome = run_experiment_text(cfg);
    CHECK(outcome.exit_code == 2);
    CHECK(outcome.message.find("surprise") != std::string::npos);

    CHECK_THROWS_AS(validate_config_text(cfg), ConfigError);
}

TEST_CASE("wongzakai requires at least three meshes") {
    const std::string cfg = R"({
  "schema_version": 1,
  "kind": "wongzakai",
  "solver": {"dim": 2, "trunc": 4, "viscosity": 0.01, "dt": 0.015625, "horizon": 0.25,
             "dealias": true},
  "initial": {"kind": "random-band", "band": 2, "amplitude": 1.0, "seed": 1},
  "family": {"preset": "shear-pair-2d", "amplitude": 0.3},
  "noise": {"kind": "brownian", "seed": 1, "mesh": 0.015625},
  "study": {"meshes": [0.0625]},
  "output": {"directory": "wz"}
})";
    const auto outcome = run_experiment_text(cfg);
    CHECK(outcome.exit_code == 2);
    CHECK_THROWS_AS(validate_config_text(cfg), ConfigError);
}

TEST_CASE("unexpected blow-up maps to the numerical-failure exit code") {
    const std::string cfg = R"({
  "schema_version": 1,
  "kind": "solve",
  "solver": {"dim": 2, "trunc": 8, "viscosity": 0.0, "dt": 0.0078125, "horizon": 0.25,
             "dealias": true, "blowup_factor": 1e-9},
  "initial": {"kind": "random-band", "band": 4, "amplitude": 1.0, "seed": 3},
  "family": {"preset": "shear-pair-2d", "amplitude": 1.0},
  "noise": {"kind": "brownian", "seed": 3, "mesh": 0.03125},
  "output": {"directory": "blow"}
})";
    const fs::path root = fs::temp_directory_path() / "roughns_lab_blow";
    fs::remove_all(root);
    const auto outcome = run_experiment_text(cfg, root.string());
    CHECK(outcome.exit_code == 3);
}

TEST_CASE("a failed check maps to exit code 1") {
    // Taylor-Green decay with an unreachable tolerance
    std::string cfg = small_solve_config("tight");
    const auto pos = cfg.find("1e-8");
    cfg.replace(pos, 4, "1e-30");
    const fs::path root = fs::temp_directory_path() / "roughns_lab_tight";
    fs::remove_all(root);
    const auto outcome = run_experiment_text(cfg, root.string());
    CHECK(outcome.exit_code == 1);
    CHECK_FALSE(outcome.pass);
    REQUIRE(outcome.failed_checks.size() == 1);
    CHECK(outcome.failed_checks.front() == "exact_decay_relative_error");
}

TEST_CASE("explicit mode lists seed the initial vorticity") {
    const std::string cfg = R"({
  "schema_version": 1,
  "kind": "solve",
  "solver": {"dim": 2, "trunc": 8, "viscosity": 0.01, "dt": 0.015625, "horizon": 0.125,
             "dealias": true, "store_every": 4, "store_states": false},
  "initial": {"kind": "modes",
              "modes": [{"k": [1, 1], "re": 0.5}, {"k": [1, -1], "re": 0.5}]},
  "family": {"preset": "zero"},
  "noise": {"kind": "zero", "mesh": 0.125},
  "checks": {"exact_decay_tolerance": 1e-8},
  "output": {"directory": "modes"}
})";
    const fs::path root = fs::temp_directory_path() / "roughns_lab_modes";
    fs::remove_all(root);
    // the mode list above is the Taylor-Green vortex, so exact decay holds
    const auto outcome = run_experiment_text(cfg, root.string());
    CHECK(outcome.exit_code == 0);
}

TEST_CASE("preset registry is stable") {
    const auto& presets = experiment_presets();
    CHECK(presets.size() >= 8);
    // pinned identifiers
    const std::vector<std::string> expected{
        "taylor-green-2d", "enstrophy-bm-2d", "wong-zakai-2d", "moving-frame-2d",
        "local-3d",        "tstar-3d",        "pressure-2d",   "remainder-scaling-2d"};
    for (const auto& name : expected) {
        bool found = false;
        for (const auto& p : presets) found = found || p.name == name;
        CHECK_MESSAGE(found, name);
        CHECK_NOTHROW(validate_config_text(preset_config_text(name)));
    }
    CHECK_THROWS_AS(preset_config_text("nope"), ConfigError);
}

TEST_CASE("config hash is stable and content-sensitive") {
    const auto h1 = config_hash("abc");
    const auto h2 = config_hash("abc");
    const auto h3 = config_hash("abd");
    CHECK(h1 == h2);
    CHECK(h1 != h3);
}

TEST_CASE("tstar experiment runs standalone") {
    const std::string cfg = R"({
  "schema_version": 1,
  "kind": "tstar",
  "study": {"g0": 0.5, "q": 1.0, "growth": 1.0},
  "checks": {"oracle_tolerance": 0.01},
  "output": {"directory": "ts"}
})";
    const fs::path root = fs::temp_directory_path() / "roughns_lab_ts";
    fs::remove_all(root);
    const auto outcome = run_experiment_text(cfg, root.string());
    CHECK(outcome.exit_code == 0);
    const auto summary = read_summary(outcome.summary_path);
    CHECK(summary["metrics"]["tstar_quadrature"].get<double>() > 0.0);
    CHECK(fs::exists(root / "ts" / "tstar.csv"));
}

TEST_CASE("environment variable reroots relative output directories") {
    const fs::path root = fs::temp_directory_path() / "roughns_lab_env";
    fs::remove_all(root);
    setenv("ROUGHNS_OUTPUT_ROOT", root.string().c_str(), 1);
    const auto outcome = run_experiment_text(small_solve_config("env"));
    unsetenv("ROUGHNS_OUTPUT_ROOT");
    REQUIRE(outcome.exit_code == 0);
    CHECK(fs::exists(root / "env" / "summary.json"));
}
