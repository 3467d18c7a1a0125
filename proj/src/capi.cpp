#include "roughns.h"

#include "roughns/analysis.hpp"
#include "roughns/lab.hpp"
#include "roughns/rough_path.hpp"
#include "roughns/sample_path.hpp"
#include "roughns/solver.hpp"

#include <cstring>
#include <string>

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what != nullptr ? what : "unknown error"; }

void copy_message(char* dst, size_t len, const std::string& msg) {
    if (dst == nullptr || len == 0) return;
    const size_t n = std::min(len - 1, msg.size());
    std::memcpy(dst, msg.data(), n);
    dst[n] = '\0';
}

template <typename Fn>
roughns_status guarded(Fn&& fn) {
    try {
        fn();
        return ROUGHNS_OK;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return ROUGHNS_ERR_INVALID_ARGUMENT;
    } catch (const roughns::ConfigError& e) {
        set_error(e.what());
        return ROUGHNS_ERR_INVALID_ARGUMENT;
    } catch (const std::runtime_error& e) {
        set_error(e.what());
        return ROUGHNS_ERR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return ROUGHNS_ERR_INTERNAL;
    }
}

} // namespace

struct roughns_path {
    roughns::SamplePath p;
};
struct roughns_lift {
    roughns::RoughPathLift l;
};
struct roughns_family {
    roughns::VectorFieldFamily f;
};
struct roughns_trajectory {
    roughns::Trajectory t;
};

extern "C" {

const char* roughns_version(void) { return "0.1.0"; }

const char* roughns_last_error(void) { return g_last_error.c_str(); }

/* ---- paths ---- */

roughns_status roughns_path_brownian(uint64_t seed, double mesh, int k_dim, double horizon,
                                     roughns_path** out) {
    if (out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new roughns_path{roughns::sample_brownian(seed, mesh, k_dim, horizon)};
    });
}

roughns_status roughns_path_fbm(uint64_t seed, double mesh, int k_dim, double horizon,
                                double hurst, roughns_path** out) {
    if (out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new roughns_path{roughns::sample_fbm(seed, mesh, k_dim, horizon, hurst)};
    });
}

roughns_status roughns_path_smooth(uint64_t seed, double mesh, int k_dim, double horizon,
                                   roughns_path** out) {
    if (out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new roughns_path{roughns::sample_smooth(seed, mesh, k_dim, horizon)};
    });
}

roughns_status roughns_path_read_csv(const char* file, roughns_path** out) {
    if (file == nullptr || out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = new roughns_path{roughns::read_path_csv_file(file)}; });
}

roughns_status roughns_path_write_csv(const roughns_path* path, const char* file) {
    if (path == nullptr || file == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { roughns::write_path_csv_file(path->p, file); });
}

int roughns_path_dimension(const roughns_path* path) {
    return path != nullptr ? path->p.k_dim : 0;
}

size_t roughns_path_sample_count(const roughns_path* path) {
    return path != nullptr ? path->p.size() : 0;
}

void roughns_path_free(roughns_path* path) { delete path; }

/* ---- lifts ---- */

roughns_status roughns_lift_create(const roughns_path* path, roughns_lift** out) {
    if (path == nullptr || out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = new roughns_lift{roughns::RoughPathLift(path->p)}; });
}

roughns_status roughns_lift_increment(const roughns_lift* lift, double s, double t,
                                      double* z, double* zz) {
    if (lift == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto inc = lift->l.increment(s, t);
        const auto two = lift->l.level_two(s, t);
        const int k = lift->l.k_dim();
        if (z != nullptr)
            for (int i = 0; i < k; ++i) z[i] = inc[static_cast<std::size_t>(i)];
        if (zz != nullptr)
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) zz[i * k + j] = two(i, j);
    });
}

roughns_status roughns_lift_chen_defect(const roughns_lift* lift, double s, double mid,
                                        double t, double* defect_norm) {
    if (lift == nullptr || defect_norm == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { *defect_norm = lift->l.chen_defect(s, mid, t).frobenius(); });
}

int roughns_lift_dimension(const roughns_lift* lift) {
    return lift != nullptr ? lift->l.k_dim() : 0;
}

void roughns_lift_free(roughns_lift* lift) { delete lift; }

/* ---- families ---- */

roughns_status roughns_family_load(const char* file, roughns_family** out) {
    if (file == nullptr || out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = new roughns_family{roughns::read_family_file(file)}; });
}

roughns_status roughns_family_parse(const char* text, roughns_family** out) {
    if (text == nullptr || out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = new roughns_family{roughns::parse_family(text)}; });
}

int roughns_family_size(const roughns_family* fam) {
    return fam != nullptr ? fam->f.size() : 0;
}

int roughns_family_dimension(const roughns_family* fam) {
    return fam != nullptr ? fam->f.dim() : 0;
}

roughns_status roughns_family_seminorm(const roughns_family* fam, int order, double* out) {
    if (fam == nullptr || out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = fam->f.seminorm_inf(order); });
}

void roughns_family_free(roughns_family* fam) { delete fam; }

/* ---- solver ---- */

void roughns_solver_config_init(roughns_solver_config* cfg) {
    if (cfg == nullptr) return;
    cfg->dim = 2;
    cfg->trunc = 16;
    cfg->viscosity = 0.0;
    cfg->dt = 1e-3;
    cfg->horizon = 1.0;
    cfg->dealias = 1;
    cfg->blowup_factor = 1e6;
    cfg->store_every = 1;
}

roughns_status roughns_solve(const roughns_family* fam, const roughns_path* noise,
                             const roughns_solver_config* cfg, const char* initial_kind,
                             int initial_band, double initial_amplitude,
                             uint64_t initial_seed, const double* mean0,
                             roughns_trajectory** out) {
    if (fam == nullptr || noise == nullptr || cfg == nullptr || initial_kind == nullptr ||
        out == nullptr)
        return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        roughns::SolverConfig sc;
        sc.dim = cfg->dim;
        sc.trunc = cfg->trunc;
        sc.viscosity = cfg->viscosity;
        sc.dt = cfg->dt;
        sc.horizon = cfg->horizon;
        sc.dealias = cfg->dealias != 0;
        sc.blowup_factor = cfg->blowup_factor;
        sc.store_every = cfg->store_every;
        sc.store_states = true;

        roughns::SpectralField xi0;
        const std::string kind = initial_kind;
        if (kind == "taylor-green") {
            xi0 = roughns::taylor_green_vorticity(sc.trunc);
        } else if (kind == "random-band") {
            xi0 = roughns::random_band_vorticity(sc.dim, sc.trunc, initial_band,
                                                 initial_amplitude, initial_seed);
        } else if (kind == "zero") {
            xi0 = sc.dim == 2 ? roughns::SpectralField::scalar(2, sc.trunc)
                              : roughns::SpectralField::vector(3, sc.trunc);
        } else {
            throw std::invalid_argument("unknown initial kind '" + kind + "'");
        }
        std::array<double, 3> mean{0.0, 0.0, 0.0};
        if (mean0 != nullptr)
            for (int i = 0; i < sc.dim; ++i) mean[static_cast<std::size_t>(i)] = mean0[i];
        *out = new roughns_trajectory{
            roughns::solve_vorticity(xi0, mean, sc, fam->f, noise->p)};
    });
}

size_t roughns_trajectory_size(const roughns_trajectory* traj) {
    return traj != nullptr ? traj->t.size() : 0;
}

double roughns_trajectory_time(const roughns_trajectory* traj, size_t i) {
    return traj != nullptr && i < traj->t.size() ? traj->t.times[i] : 0.0;
}

double roughns_trajectory_enstrophy(const roughns_trajectory* traj, size_t i) {
    return traj != nullptr && i < traj->t.size() ? traj->t.enstrophy[i] : 0.0;
}

double roughns_trajectory_palinstrophy(const roughns_trajectory* traj, size_t i) {
    return traj != nullptr && i < traj->t.size() ? traj->t.palinstrophy[i] : 0.0;
}

double roughns_trajectory_h1_velocity(const roughns_trajectory* traj, size_t i) {
    return traj != nullptr && i < traj->t.size() ? traj->t.h1_velocity[i] : 0.0;
}

roughns_status roughns_trajectory_mean(const roughns_trajectory* traj, size_t i,
                                       double* mean) {
    if (traj == nullptr || mean == nullptr || i >= traj->t.size())
        return ROUGHNS_ERR_INVALID_ARGUMENT;
    for (int c = 0; c < traj->t.config.dim; ++c)
        mean[c] = traj->t.means[i][static_cast<std::size_t>(c)];
    return ROUGHNS_OK;
}

int roughns_trajectory_blew_up(const roughns_trajectory* traj) {
    return traj != nullptr && traj->t.blew_up ? 1 : 0;
}

roughns_status roughns_trajectory_write_csv(const roughns_trajectory* traj,
                                            const char* file) {
    if (traj == nullptr || file == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] { traj->t.write_csv_file(file); });
}

roughns_status roughns_trajectory_balance_residual(const roughns_trajectory* traj,
                                                   double* out) {
    if (traj == nullptr || out == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded(
        [&] { *out = roughns::enstrophy_balance_residual(traj->t, traj->t.config.viscosity); });
}

void roughns_trajectory_free(roughns_trajectory* traj) { delete traj; }

/* ---- experiments ---- */

roughns_status roughns_experiment_run(const char* config_file, const char* output_root,
                                      int* exit_code, char* message, size_t message_len) {
    if (config_file == nullptr || exit_code == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto outcome = roughns::run_experiment_file(
            config_file, output_root != nullptr ? output_root : "");
        *exit_code = outcome.exit_code;
        std::string msg = outcome.message;
        if (msg.empty() && !outcome.failed_checks.empty()) {
            msg = "failed checks:";
            for (const auto& f : outcome.failed_checks) msg += " " + f;
        }
        if (msg.empty()) msg = outcome.summary_path;
        copy_message(message, message_len, msg);
    });
}

roughns_status roughns_experiment_run_text(const char* config_json, const char* output_root,
                                           int* exit_code, char* message,
                                           size_t message_len) {
    if (config_json == nullptr || exit_code == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto outcome = roughns::run_experiment_text(
            config_json, output_root != nullptr ? output_root : "");
        *exit_code = outcome.exit_code;
        std::string msg = outcome.message;
        if (msg.empty() && !outcome.failed_checks.empty()) {
            msg = "failed checks:";
            for (const auto& f : outcome.failed_checks) msg += " " + f;
        }
        if (msg.empty()) msg = outcome.summary_path;
        copy_message(message, message_len, msg);
    });
}

roughns_status roughns_config_validate(const char* config_file, char* message,
                                       size_t message_len) {
    if (config_file == nullptr) return ROUGHNS_ERR_INVALID_ARGUMENT;
    try {
        roughns::validate_config_file(config_file);
        copy_message(message, message_len, "ok");
        return ROUGHNS_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        copy_message(message, message_len, e.what());
        return ROUGHNS_ERR_INVALID_ARGUMENT;
    }
}

int roughns_preset_count(void) {
    return static_cast<int>(roughns::experiment_presets().size());
}

const char* roughns_preset_name(int index) {
    const auto& presets = roughns::experiment_presets();
    if (index < 0 || index >= static_cast<int>(presets.size())) return nullptr;
    return presets[static_cast<std::size_t>(index)].name.c_str();
}

const char* roughns_preset_description(int index) {
    const auto& presets = roughns::experiment_presets();
    if (index < 0 || index >= static_cast<int>(presets.size())) return nullptr;
    return presets[static_cast<std::size_t>(index)].description.c_str();
}

const char* roughns_preset_config(const char* name) {
    if (name == nullptr) return nullptr;
    try {
        thread_local std::string text;
        text = roughns::preset_config_text(name);
        return text.c_str();
    } catch (const std::exception&) {
        return nullptr;
    }
}

} // extern "C"
