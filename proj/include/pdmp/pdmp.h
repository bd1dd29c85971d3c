#ifndef PDMP_H
#define PDMP_H

/* C interface to the probabilistic movement-primitive library: learn
 * primitives from demonstration trajectories, roll them out with
 * uncertainty, and monitor executions for failures online.
 *
 * All functions returning pdmp_status set a thread-local message
 * retrievable via pdmp_last_error() on anything but PDMP_OK. Objects are
 * opaque; every *_free accepts NULL. */

#include <stdint.h>

#if defined(_WIN32)
#define PDMP_API __declspec(dllexport)
#else
#define PDMP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pdmp_status {
  PDMP_OK = 0,
  PDMP_ERR_INVALID_ARGUMENT = 1,
  PDMP_ERR_IO = 2,
  PDMP_ERR_PARSE = 3,
  PDMP_ERR_MODEL = 4,
  PDMP_ERR_FIT = 5,
  PDMP_ERR_INTERNAL = 6
} pdmp_status;

typedef struct pdmp_trajectory pdmp_trajectory;
typedef struct pdmp_model pdmp_model;
typedef struct pdmp_rollout pdmp_rollout;
typedef struct pdmp_report pdmp_report;
typedef struct pdmp_training_info pdmp_training_info;

PDMP_API const char* pdmp_version(void);
PDMP_API const char* pdmp_last_error(void);

/* ----- trajectories (positions are row-major, n_steps x n_dofs) ----- */

PDMP_API pdmp_status pdmp_trajectory_create(const double* positions,
                                            int n_steps, int n_dofs,
                                            double dt, pdmp_trajectory** out);
PDMP_API pdmp_status pdmp_trajectory_read_csv(const char* path,
                                              pdmp_trajectory** out);
PDMP_API pdmp_status pdmp_trajectory_write_csv(const pdmp_trajectory* traj,
                                               const char* path);
/* Freeze the position at onset for a fraction of the run (blocked motion). */
PDMP_API pdmp_status pdmp_trajectory_hold(const pdmp_trajectory* traj,
                                          double onset_fraction,
                                          double duration_fraction,
                                          pdmp_trajectory** out);
PDMP_API int pdmp_trajectory_steps(const pdmp_trajectory* traj);
PDMP_API int pdmp_trajectory_dofs(const pdmp_trajectory* traj);
PDMP_API double pdmp_trajectory_dt(const pdmp_trajectory* traj);
PDMP_API pdmp_status pdmp_trajectory_positions(const pdmp_trajectory* traj,
                                               double* out);
PDMP_API void pdmp_trajectory_free(pdmp_trajectory* traj);

/* ----- synthetic letter dataset ----- */

PDMP_API pdmp_status pdmp_dataset_generate(const char* templates_path,
                                           const char* out_root,
                                           uint64_t seed, int n_train,
                                           int n_test,
                                           const char* config_hash);

/* ----- training ----- */

typedef struct pdmp_train_options {
  int n_basis;
  double alpha_z;
  double beta_z; /* < 0: alpha_z / 4 */
  double alpha_x;
  double tau;
  double prior_precision;
  int evidence_noise; /* nonzero: estimate sigma_n^2 from the data */
  double noise_var;   /* initial (evidence) or fixed value */
  int printed_discretization; /* nonzero: lagged velocity/position rows */
  int em_max_iters;
  double em_tol;
  double threshold_multiplier;
  int smooth_window;
  uint64_t seed;
  const char* label;       /* optional */
  const char* config_hash; /* optional */
} pdmp_train_options;

PDMP_API void pdmp_train_options_init(pdmp_train_options* opts);

PDMP_API pdmp_status pdmp_train(const pdmp_trajectory* const* demos,
                                int n_demos, const pdmp_train_options* opts,
                                pdmp_model** out_model,
                                pdmp_training_info** out_info /* optional */);

PDMP_API int pdmp_training_info_em_iters(const pdmp_training_info* info);
/* Copies up to cap trace entries; *n gets the full length. */
PDMP_API pdmp_status pdmp_training_info_em_trace(const pdmp_training_info* info,
                                                 double* out, int cap, int* n);
PDMP_API double pdmp_training_info_rollout_rmse(const pdmp_training_info* info);
PDMP_API double pdmp_training_info_stroke_amplitude(
    const pdmp_training_info* info);
PDMP_API double pdmp_training_info_fit_rmse(const pdmp_training_info* info,
                                            int dof);
PDMP_API void pdmp_training_info_free(pdmp_training_info* info);

/* ----- models ----- */

PDMP_API pdmp_status pdmp_model_save(const pdmp_model* model,
                                     const char* path);
PDMP_API pdmp_status pdmp_model_load(const char* path, pdmp_model** out);
PDMP_API int pdmp_model_dofs(const pdmp_model* model);
PDMP_API int pdmp_model_fit_steps(const pdmp_model* model);
PDMP_API double pdmp_model_dt(const pdmp_model* model);
PDMP_API double pdmp_model_threshold(const pdmp_model* model);
PDMP_API double pdmp_model_train_loglik_min(const pdmp_model* model);
PDMP_API double pdmp_model_obs_noise(const pdmp_model* model, int dof);
PDMP_API const char* pdmp_model_label(const pdmp_model* model);
PDMP_API void pdmp_model_free(pdmp_model* model);

/* ----- rollout (open loop, uncertainty propagated) ----- */

/* n_steps <= 0 and tau <= 0 pick model defaults; start/goal may be NULL or
 * hold one value per DOF. */
PDMP_API pdmp_status pdmp_rollout_run(const pdmp_model* model, int n_steps,
                                      double tau, const double* start,
                                      const double* goal, pdmp_rollout** out);
PDMP_API int pdmp_rollout_steps(const pdmp_rollout* roll);
PDMP_API int pdmp_rollout_dofs(const pdmp_rollout* roll);
PDMP_API double pdmp_rollout_dt(const pdmp_rollout* roll);
PDMP_API pdmp_status pdmp_rollout_positions(const pdmp_rollout* roll,
                                            double* out);
PDMP_API pdmp_status pdmp_rollout_stddevs(const pdmp_rollout* roll,
                                          double* out);
PDMP_API pdmp_status pdmp_rollout_velocities(const pdmp_rollout* roll,
                                             double* out);
PDMP_API pdmp_status pdmp_rollout_write_csv(const pdmp_rollout* roll,
                                            const char* path);
PDMP_API void pdmp_rollout_free(pdmp_rollout* roll);

/* ----- failure monitoring ----- */

PDMP_API pdmp_status pdmp_monitor_run(const pdmp_model* model,
                                      const pdmp_trajectory* obs,
                                      int smooth_window, pdmp_report** out);
PDMP_API int pdmp_report_failed(const pdmp_report* report);
PDMP_API int pdmp_report_failure_step(const pdmp_report* report); /* -1: none */
PDMP_API double pdmp_report_min_loglik(const pdmp_report* report);
PDMP_API double pdmp_report_total_loglik(const pdmp_report* report);
PDMP_API double pdmp_report_threshold(const pdmp_report* report);
PDMP_API int pdmp_report_steps(const pdmp_report* report);
PDMP_API pdmp_status pdmp_report_loglik_trace(const pdmp_report* report,
                                              double* out, int cap, int* n);
PDMP_API pdmp_status pdmp_report_save(const pdmp_report* report,
                                      const char* path);
PDMP_API void pdmp_report_free(pdmp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* PDMP_H */
