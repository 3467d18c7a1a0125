// Exercises the shared-library C surface the way an external client would:
// only roughns.h, opaque handles, status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <roughns.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

TEST_CASE("version and error reporting") {
    CHECK(std::string(roughns_version()) == "0.1.0");
    roughns_path* p = nullptr;
    CHECK(roughns_path_brownian(1, -1.0, 1, 1.0, &p) == ROUGHNS_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(roughns_last_error()) > 0);
}

TEST_CASE("path and lift round trip through the C surface") {
    roughns_path* p = nullptr;
    REQUIRE(roughns_path_brownian(42, 1.0 / 256, 2, 1.0, &p) == ROUGHNS_OK);
    CHECK(roughns_path_dimension(p) == 2);
    CHECK(roughns_path_sample_count(p) == 257);

    CHECK(roughns_path_write_csv(p, "capi_path.csv") == ROUGHNS_OK);
    roughns_path* q = nullptr;
    REQUIRE(roughns_path_read_csv("capi_path.csv", &q) == ROUGHNS_OK);
    CHECK(roughns_path_sample_count(q) == 257);

    roughns_lift* lift = nullptr;
    REQUIRE(roughns_lift_create(p, &lift) == ROUGHNS_OK);
    CHECK(roughns_lift_dimension(lift) == 2);

    double z[2];
    double zz[4];
    REQUIRE(roughns_lift_increment(lift, 0.25, 0.75, z, zz) == ROUGHNS_OK);
    // shuffle identity at level 2
    CHECK(std::abs(0.5 * (zz[1] + zz[2]) - 0.5 * z[0] * z[1]) < 1e-12);

    double defect = -1.0;
    REQUIRE(roughns_lift_chen_defect(lift, 0.1, 0.5, 0.9, &defect) == ROUGHNS_OK);
    CHECK(defect < 1e-12);

    CHECK(roughns_lift_increment(lift, 0.9, 0.1, z, zz) == ROUGHNS_ERR_INVALID_ARGUMENT);

    roughns_lift_free(lift);
    roughns_path_free(p);
    roughns_path_free(q);
    std::remove("capi_path.csv");
}

TEST_CASE("family loading enforces the divergence-free constraint") {
    roughns_family* fam = nullptr;
    const char* good = "d 2\nK 1\nsigma 1\nmode 0 1 0 -0.5 1\n";
    REQUIRE(roughns_family_parse(good, &fam) == ROUGHNS_OK);
    CHECK(roughns_family_size(fam) == 1);
    CHECK(roughns_family_dimension(fam) == 2);
    double sup = 0.0;
    REQUIRE(roughns_family_seminorm(fam, 0, &sup) == ROUGHNS_OK);
    CHECK(sup == doctest::Approx(1.0).epsilon(1e-6));
    roughns_family_free(fam);

    roughns_family* bad = nullptr;
    CHECK(roughns_family_parse("d 2\nK 1\nsigma 1\nmode 1 0 0 -0.5 1\n", &bad) !=
          ROUGHNS_OK);
    CHECK(bad == nullptr);
}

TEST_CASE("solver runs through the C surface and balances enstrophy") {
    roughns_family* fam = nullptr;
    REQUIRE(roughns_family_parse(
                "d 2\nK 2\nsigma 1\nmode 0 1 0 -0.25 1\nsigma 2\nmode 1 0 0 0.25 2\n",
                &fam) == ROUGHNS_OK);
    roughns_path* noise = nullptr;
    REQUIRE(roughns_path_brownian(7, 1.0 / 64, 2, 0.25, &noise) == ROUGHNS_OK);

    roughns_solver_config cfg;
    roughns_solver_config_init(&cfg);
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.01;
    cfg.dt = 1.0 / 1024;
    cfg.horizon = 0.25;
    cfg.store_every = 64;

    roughns_trajectory* traj = nullptr;
    REQUIRE(roughns_solve(fam, noise, &cfg, "random-band", 4, 1.0, 5, nullptr, &traj) ==
            ROUGHNS_OK);
    CHECK(roughns_trajectory_blew_up(traj) == 0);
    const size_t n = roughns_trajectory_size(traj);
    CHECK(n > 2);
    CHECK(roughns_trajectory_time(traj, n - 1) == doctest::Approx(0.25));
    CHECK(roughns_trajectory_enstrophy(traj, 0) == doctest::Approx(1.0).epsilon(1e-9));

    double residual = 1.0;
    REQUIRE(roughns_trajectory_balance_residual(traj, &residual) == ROUGHNS_OK);
    CHECK(residual <= 1e-7);

    double mean[2] = {1.0, 1.0};
    REQUIRE(roughns_trajectory_mean(traj, n - 1, mean) == ROUGHNS_OK);

    CHECK(roughns_trajectory_write_csv(traj, "capi_traj.csv") == ROUGHNS_OK);
    std::remove("capi_traj.csv");

    roughns_trajectory_free(traj);
    roughns_path_free(noise);
    roughns_family_free(fam);
}

TEST_CASE("experiments and presets through the C surface") {
    CHECK(roughns_preset_count() >= 8);
    CHECK(roughns_preset_name(0) != nullptr);
    CHECK(roughns_preset_description(0) != nullptr);
    CHECK(roughns_preset_config("taylor-green-2d") != nullptr);
    CHECK(roughns_preset_config("nope") == nullptr);

    const char* cfg = R"({
  "schema_version": 1,
  "kind": "tstar",
  "study": {"g0": 0.5, "q": 1.0},
  "output": {"directory": "capi_ts"}
})";
    int exit_code = -1;
    char msg[512];
    REQUIRE(roughns_experiment_run_text(cfg, "capi_out", &exit_code, msg, sizeof(msg)) ==
            ROUGHNS_OK);
    CHECK(exit_code == 0);

    // validation: write a config file, validate via the C call
    {
        FILE* f = std::fopen("capi_cfg.json", "w");
        REQUIRE(f != nullptr);
        std::fputs(cfg, f);
        std::fclose(f);
    }
    CHECK(roughns_config_validate("capi_cfg.json", msg, sizeof(msg)) == ROUGHNS_OK);
    {
        FILE* f = std::fopen("capi_bad.json", "w");
        REQUIRE(f != nullptr);
        std::fputs("{ not json", f);
        std::fclose(f);
    }
    CHECK(roughns_config_validate("capi_bad.json", msg, sizeof(msg)) ==
          ROUGHNS_ERR_INVALID_ARGUMENT);
    CHECK(std::strstr(msg, "line") != nullptr);
    std::remove("capi_cfg.json");
    std::remove("capi_bad.json");
}
