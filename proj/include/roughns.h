/* C interface of the rough Navier-Stokes laboratory.
 *
 * All functions return roughns_status (ROUGHNS_OK on success) unless
 * documented otherwise; on failure roughns_last_error() carries a
 * thread-local message. Handles are opaque and freed by their _free call.
 */
#ifndef ROUGHNS_H
#define ROUGHNS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum roughns_status {
    ROUGHNS_OK = 0,
    ROUGHNS_ERR_INVALID_ARGUMENT = 1,
    ROUGHNS_ERR_IO = 2,
    ROUGHNS_ERR_NUMERICAL = 3,
    ROUGHNS_ERR_INTERNAL = 4
} roughns_status;

const char* roughns_version(void);
const char* roughns_last_error(void);

/* ---- driver paths ------------------------------------------------------ */

typedef struct roughns_path roughns_path;

roughns_status roughns_path_brownian(uint64_t seed, double mesh, int k_dim, double horizon,
                                     roughns_path** out);
roughns_status roughns_path_fbm(uint64_t seed, double mesh, int k_dim, double horizon,
                                double hurst, roughns_path** out);
roughns_status roughns_path_smooth(uint64_t seed, double mesh, int k_dim, double horizon,
                                   roughns_path** out);
roughns_status roughns_path_read_csv(const char* file, roughns_path** out);
roughns_status roughns_path_write_csv(const roughns_path* path, const char* file);
int roughns_path_dimension(const roughns_path* path);
size_t roughns_path_sample_count(const roughns_path* path);
void roughns_path_free(roughns_path* path);

/* ---- rough-path lifts --------------------------------------------------- */

typedef struct roughns_lift roughns_lift;

roughns_status roughns_lift_create(const roughns_path* path, roughns_lift** out);
/* z: K entries; zz: K*K entries, row-major, entry (j,k) = int dz^j dz^k. */
roughns_status roughns_lift_increment(const roughns_lift* lift, double s, double t,
                                      double* z, double* zz);
/* Frobenius norm of the Chen defect over (s, mid, t). */
roughns_status roughns_lift_chen_defect(const roughns_lift* lift, double s, double mid,
                                        double t, double* defect_norm);
int roughns_lift_dimension(const roughns_lift* lift);
void roughns_lift_free(roughns_lift* lift);

/* ---- perturbation families ---------------------------------------------- */

typedef struct roughns_family roughns_family;

roughns_status roughns_family_load(const char* file, roughns_family** out);
roughns_status roughns_family_parse(const char* text, roughns_family** out);
int roughns_family_size(const roughns_family* fam);
int roughns_family_dimension(const roughns_family* fam);
/* W^{order,infty} seminorm of the family, order in [0,3]. */
roughns_status roughns_family_seminorm(const roughns_family* fam, int order, double* out);
void roughns_family_free(roughns_family* fam);

/* ---- Galerkin solver ------------------------------------------------------ */

typedef struct roughns_solver_config {
    int dim;              /* 2 or 3 */
    int trunc;            /* Fourier band */
    double viscosity;
    double dt;
    double horizon;
    int dealias;          /* nonzero: alias-free products (default) */
    double blowup_factor; /* threshold relative to |xi_0|_0 */
    int store_every;      /* sample cadence in steps */
} roughns_solver_config;

void roughns_solver_config_init(roughns_solver_config* cfg);

typedef struct roughns_trajectory roughns_trajectory;

/* initial_kind: "taylor-green", "random-band" or "zero". */
roughns_status roughns_solve(const roughns_family* fam, const roughns_path* noise,
                             const roughns_solver_config* cfg, const char* initial_kind,
                             int initial_band, double initial_amplitude,
                             uint64_t initial_seed, const double* mean0,
                             roughns_trajectory** out);

size_t roughns_trajectory_size(const roughns_trajectory* traj);
double roughns_trajectory_time(const roughns_trajectory* traj, size_t i);
double roughns_trajectory_enstrophy(const roughns_trajectory* traj, size_t i);
double roughns_trajectory_palinstrophy(const roughns_trajectory* traj, size_t i);
double roughns_trajectory_h1_velocity(const roughns_trajectory* traj, size_t i);
roughns_status roughns_trajectory_mean(const roughns_trajectory* traj, size_t i,
                                       double* mean);
int roughns_trajectory_blew_up(const roughns_trajectory* traj);
roughns_status roughns_trajectory_write_csv(const roughns_trajectory* traj,
                                            const char* file);
/* max_t | |xi_t|^2 + 2 nu int |grad xi|^2 - |xi_0|^2 | / |xi_0|^2, d=2 only. */
roughns_status roughns_trajectory_balance_residual(const roughns_trajectory* traj,
                                                   double* out);
void roughns_trajectory_free(roughns_trajectory* traj);

/* ---- experiments ----------------------------------------------------------- */

/* Runs a config file; writes summary.json and artifacts. exit_code follows the
 * CLI convention: 0 checks pass, 1 check failure, 2 config error, 3 numerical
 * failure. Returns ROUGHNS_OK whenever the experiment executed far enough to
 * produce an exit code. */
roughns_status roughns_experiment_run(const char* config_file, const char* output_root,
                                      int* exit_code, char* message, size_t message_len);
roughns_status roughns_experiment_run_text(const char* config_json, const char* output_root,
                                           int* exit_code, char* message,
                                           size_t message_len);
/* Validates a config; ROUGHNS_OK or ROUGHNS_ERR_INVALID_ARGUMENT with the
 * diagnostic copied into message. */
roughns_status roughns_config_validate(const char* config_file, char* message,
                                       size_t message_len);

int roughns_preset_count(void);
const char* roughns_preset_name(int index);
const char* roughns_preset_description(int index);
const char* roughns_preset_config(const char* name); /* NULL for unknown names */

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ROUGHNS_H */
