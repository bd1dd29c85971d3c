#include "pdmp/pdmp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "imitation.hpp"
#include "kalman.hpp"
#include "model.hpp"
#include "monitor.hpp"
#include "trajectory.hpp"

struct pdmp_trajectory {
  pdmp::Trajectory traj;
};
struct pdmp_model {
  pdmp::PrimitiveModel model;
};
struct pdmp_rollout {
  pdmp::ModelRollout roll;
};
struct pdmp_report {
  pdmp::MonitorReport rep;
};
struct pdmp_training_info {
  pdmp::LearnInfo info;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what ? what : "unknown"; }

template <typename F>
pdmp_status guarded(F&& fn) noexcept {
  try {
    fn();
    return PDMP_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return PDMP_ERR_INVALID_ARGUMENT;
  } catch (const pdmp::ParseError& e) {
    set_error(e.what());
    return PDMP_ERR_PARSE;
  } catch (const pdmp::IoError& e) {
    set_error(e.what());
    return PDMP_ERR_IO;
  } catch (const pdmp::FitError& e) {
    set_error(e.what());
    return PDMP_ERR_FIT;
  } catch (const pdmp::ModelError& e) {
    set_error(e.what());
    return PDMP_ERR_MODEL;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return PDMP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return PDMP_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown failure");
    return PDMP_ERR_INTERNAL;
  }
}

pdmp_status require(bool ok, const char* message) {
  if (ok) return PDMP_OK;
  set_error(message);
  return PDMP_ERR_INVALID_ARGUMENT;
}

std::vector<double> resolve(const double* values, int n) {
  if (!values) return {};
  return std::vector<double>(values, values + n);
}

pdmp_status copy_matrix(const Eigen::MatrixXd& m, double* out,
                        const char* what) {
  if (pdmp_status st = require(out != nullptr, what)) return st;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) *out++ = m(i, j);
  return PDMP_OK;
}

}  // namespace

extern "C" {

const char* pdmp_version(void) { return "0.1.0"; }

const char* pdmp_last_error(void) { return g_last_error.c_str(); }

/* ----- trajectories ----- */

pdmp_status pdmp_trajectory_create(const double* positions, int n_steps,
                                   int n_dofs, double dt,
                                   pdmp_trajectory** out) {
  if (pdmp_status st = require(positions && out, "null argument")) return st;
  return guarded([&] {
    auto handle = std::make_unique<pdmp_trajectory>();
    handle->traj.dt = dt;
    handle->traj.samples.resize(n_steps, n_dofs);
    for (int j = 0; j < n_steps; ++j)
      for (int k = 0; k < n_dofs; ++k)
        handle->traj.samples(j, k) = positions[j * n_dofs + k];
    handle->traj.validate();
    *out = handle.release();
  });
}

pdmp_status pdmp_trajectory_read_csv(const char* path, pdmp_trajectory** out) {
  if (pdmp_status st = require(path && out, "null argument")) return st;
  return guarded([&] {
    auto handle = std::make_unique<pdmp_trajectory>();
    handle->traj = pdmp::read_trajectory_csv(path);
    *out = handle.release();
  });
}

pdmp_status pdmp_trajectory_write_csv(const pdmp_trajectory* traj,
                                      const char* path) {
  if (pdmp_status st = require(traj && path, "null argument")) return st;
  return guarded([&] { pdmp::write_trajectory_csv(traj->traj, path); });
}

pdmp_status pdmp_trajectory_hold(const pdmp_trajectory* traj,
                                 double onset_fraction,
                                 double duration_fraction,
                                 pdmp_trajectory** out) {
  if (pdmp_status st = require(traj && out, "null argument")) return st;
  return guarded([&] {
    pdmp::PerturbationSpec spec;
    spec.kind = pdmp::PerturbationSpec::Kind::Hold;
    spec.onset_fraction = onset_fraction;
    spec.duration_fraction = duration_fraction;
    auto handle = std::make_unique<pdmp_trajectory>();
    handle->traj = pdmp::apply_perturbation(traj->traj, spec);
    *out = handle.release();
  });
}

int pdmp_trajectory_steps(const pdmp_trajectory* traj) {
  return traj ? traj->traj.n_steps() : 0;
}

int pdmp_trajectory_dofs(const pdmp_trajectory* traj) {
  return traj ? traj->traj.n_dofs() : 0;
}

double pdmp_trajectory_dt(const pdmp_trajectory* traj) {
  return traj ? traj->traj.dt : 0.0;
}

pdmp_status pdmp_trajectory_positions(const pdmp_trajectory* traj,
                                      double* out) {
  if (pdmp_status st = require(traj != nullptr, "null trajectory")) return st;
  return copy_matrix(traj->traj.samples, out, "null output buffer");
}

void pdmp_trajectory_free(pdmp_trajectory* traj) { delete traj; }

/* ----- dataset ----- */

pdmp_status pdmp_dataset_generate(const char* templates_path,
                                  const char* out_root, uint64_t seed,
                                  int n_train, int n_test,
                                  const char* config_hash) {
  if (pdmp_status st = require(templates_path && out_root, "null argument"))
    return st;
  return guarded([&] {
    pdmp::DatasetConfig cfg;
    cfg.seed = seed;
    cfg.n_train = n_train;
    cfg.n_test = n_test;
    if (config_hash) cfg.config_hash = config_hash;
    const auto templates = pdmp::load_letter_templates(templates_path);
    pdmp::write_dataset(out_root, templates, cfg);
  });
}

/* ----- training ----- */

void pdmp_train_options_init(pdmp_train_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  pdmp::LearnConfig defaults;
  opts->n_basis = defaults.n_basis;
  opts->alpha_z = defaults.alpha_z;
  opts->beta_z = defaults.beta_z;
  opts->alpha_x = defaults.alpha_x;
  opts->tau = defaults.tau;
  opts->prior_precision = defaults.prior_precision;
  opts->evidence_noise = 1;
  opts->noise_var = defaults.noise_var;
  opts->printed_discretization = 0;
  opts->em_max_iters = defaults.em.max_iters;
  opts->em_tol = defaults.em.tol;
  opts->threshold_multiplier = defaults.threshold_multiplier;
  opts->smooth_window = defaults.smooth_window;
  opts->seed = 0;
  opts->label = nullptr;
  opts->config_hash = nullptr;
}

pdmp_status pdmp_train(const pdmp_trajectory* const* demos, int n_demos,
                       const pdmp_train_options* opts, pdmp_model** out_model,
                       pdmp_training_info** out_info) {
  if (pdmp_status st = require(demos && opts && out_model, "null argument"))
    return st;
  if (pdmp_status st = require(n_demos >= 1, "need at least one demo"))
    return st;
  for (int i = 0; i < n_demos; ++i)
    if (pdmp_status st = require(demos[i] != nullptr, "null demo")) return st;
  return guarded([&] {
    std::vector<pdmp::Trajectory> raw;
    raw.reserve(static_cast<size_t>(n_demos));
    for (int i = 0; i < n_demos; ++i) raw.push_back(demos[i]->traj);
    const pdmp::DemoSet ds = pdmp::align_demos(raw);

    pdmp::LearnConfig cfg;
    cfg.n_basis = opts->n_basis;
    cfg.alpha_z = opts->alpha_z;
    cfg.beta_z = opts->beta_z;
    cfg.alpha_x = opts->alpha_x;
    cfg.tau = opts->tau;
    cfg.prior_precision = opts->prior_precision;
    cfg.noise_mode = opts->evidence_noise ? pdmp::NoiseVarMode::Evidence
                                          : pdmp::NoiseVarMode::Fixed;
    cfg.noise_var = opts->noise_var;
    cfg.mode = opts->printed_discretization
                   ? pdmp::DiscretizationMode::PrintedA
                   : pdmp::DiscretizationMode::SubstitutedEuler;
    cfg.em.max_iters = opts->em_max_iters;
    cfg.em.tol = opts->em_tol;
    cfg.threshold_multiplier = opts->threshold_multiplier;
    cfg.smooth_window = opts->smooth_window;
    cfg.seed = opts->seed;
    if (opts->label) cfg.label = opts->label;
    if (opts->config_hash) cfg.config_hash = opts->config_hash;

    pdmp::LearnInfo info;
    auto model = std::make_unique<pdmp_model>();
    model->model = pdmp::learn_primitive(ds, cfg, &info);
    if (out_info) {
      auto ih = std::make_unique<pdmp_training_info>();
      ih->info = std::move(info);
      *out_info = ih.release();
    }
    *out_model = model.release();
  });
}

int pdmp_training_info_em_iters(const pdmp_training_info* info) {
  return info ? info->info.em.iters : 0;
}

pdmp_status pdmp_training_info_em_trace(const pdmp_training_info* info,
                                        double* out, int cap, int* n) {
  if (pdmp_status st = require(info && n, "null argument")) return st;
  const auto& trace = info->info.em.loglik_trace;
  *n = static_cast<int>(trace.size());
  if (out) {
    const int copy = std::min(cap, *n);
    for (int i = 0; i < copy; ++i) out[i] = trace[static_cast<size_t>(i)];
  }
  return PDMP_OK;
}

double pdmp_training_info_rollout_rmse(const pdmp_training_info* info) {
  return info ? info->info.rollout_rmse : 0.0;
}

double pdmp_training_info_stroke_amplitude(const pdmp_training_info* info) {
  return info ? info->info.stroke_amplitude : 0.0;
}

double pdmp_training_info_fit_rmse(const pdmp_training_info* info, int dof) {
  if (!info || dof < 0 ||
      dof >= static_cast<int>(info->info.fit_rmse.size()))
    return 0.0;
  return info->info.fit_rmse[static_cast<size_t>(dof)];
}

void pdmp_training_info_free(pdmp_training_info* info) { delete info; }

/* ----- models ----- */

pdmp_status pdmp_model_save(const pdmp_model* model, const char* path) {
  if (pdmp_status st = require(model && path, "null argument")) return st;
  return guarded([&] { pdmp::save_model_json(model->model, path); });
}

pdmp_status pdmp_model_load(const char* path, pdmp_model** out) {
  if (pdmp_status st = require(path && out, "null argument")) return st;
  return guarded([&] {
    auto handle = std::make_unique<pdmp_model>();
    handle->model = pdmp::load_model_json(path);
    *out = handle.release();
  });
}

int pdmp_model_dofs(const pdmp_model* model) {
  return model ? model->model.n_dofs() : 0;
}

int pdmp_model_fit_steps(const pdmp_model* model) {
  return model ? model->model.fit_steps : 0;
}

double pdmp_model_dt(const pdmp_model* model) {
  return model ? model->model.dt : 0.0;
}

double pdmp_model_threshold(const pdmp_model* model) {
  return model ? model->model.threshold : 0.0;
}

double pdmp_model_train_loglik_min(const pdmp_model* model) {
  return model ? model->model.train_loglik_min : 0.0;
}

double pdmp_model_obs_noise(const pdmp_model* model, int dof) {
  if (!model || dof < 0 || dof >= model->model.n_dofs()) return 0.0;
  return model->model.dofs[static_cast<size_t>(dof)].obs_noise_r;
}

const char* pdmp_model_label(const pdmp_model* model) {
  return model ? model->model.label.c_str() : "";
}

void pdmp_model_free(pdmp_model* model) { delete model; }

/* ----- rollout ----- */

pdmp_status pdmp_rollout_run(const pdmp_model* model, int n_steps, double tau,
                             const double* start, const double* goal,
                             pdmp_rollout** out) {
  if (pdmp_status st = require(model && out, "null argument")) return st;
  return guarded([&] {
    pdmp::RolloutOptions opts;
    opts.n_steps = n_steps;
    opts.tau = tau;
    opts.start = resolve(start, model->model.n_dofs());
    opts.goal = resolve(goal, model->model.n_dofs());
    auto handle = std::make_unique<pdmp_rollout>();
    handle->roll = pdmp::rollout_model(model->model, opts);
    *out = handle.release();
  });
}

int pdmp_rollout_steps(const pdmp_rollout* roll) {
  return roll ? roll->roll.n_steps() : 0;
}

int pdmp_rollout_dofs(const pdmp_rollout* roll) {
  return roll ? roll->roll.n_dofs() : 0;
}

double pdmp_rollout_dt(const pdmp_rollout* roll) {
  return roll ? roll->roll.dt : 0.0;
}

pdmp_status pdmp_rollout_positions(const pdmp_rollout* roll, double* out) {
  if (pdmp_status st = require(roll != nullptr, "null rollout")) return st;
  return copy_matrix(roll->roll.pos_mean, out, "null output buffer");
}

pdmp_status pdmp_rollout_stddevs(const pdmp_rollout* roll, double* out) {
  if (pdmp_status st = require(roll != nullptr, "null rollout")) return st;
  return copy_matrix(roll->roll.pos_std, out, "null output buffer");
}

pdmp_status pdmp_rollout_velocities(const pdmp_rollout* roll, double* out) {
  if (pdmp_status st = require(roll != nullptr, "null rollout")) return st;
  return copy_matrix(roll->roll.vel_mean, out, "null output buffer");
}

pdmp_status pdmp_rollout_write_csv(const pdmp_rollout* roll,
                                   const char* path) {
  if (pdmp_status st = require(roll && path, "null argument")) return st;
  return guarded([&] { pdmp::write_rollout_csv(roll->roll, path); });
}

void pdmp_rollout_free(pdmp_rollout* roll) { delete roll; }

/* ----- monitoring ----- */

pdmp_status pdmp_monitor_run(const pdmp_model* model,
                             const pdmp_trajectory* obs, int smooth_window,
                             pdmp_report** out) {
  if (pdmp_status st = require(model && obs && out, "null argument")) return st;
  return guarded([&] {
    const double dt_gap = obs->traj.dt - model->model.dt;
    if (std::abs(dt_gap) > 1e-9 * std::max(1.0, model->model.dt))
      throw std::invalid_argument(
          "observation dt does not match the model; resample first");
    pdmp::ExecutionOptions opts;
    opts.smooth_window = smooth_window > 0 ? smooth_window : 1;
    auto handle = std::make_unique<pdmp_report>();
    handle->rep =
        pdmp::classify_execution(model->model, obs->traj.samples, opts);
    *out = handle.release();
  });
}

int pdmp_report_failed(const pdmp_report* report) {
  return report && report->rep.failed ? 1 : 0;
}

int pdmp_report_failure_step(const pdmp_report* report) {
  return report ? report->rep.failure_step : -1;
}

double pdmp_report_min_loglik(const pdmp_report* report) {
  return report ? report->rep.min_loglik : 0.0;
}

double pdmp_report_total_loglik(const pdmp_report* report) {
  return report ? report->rep.total_loglik : 0.0;
}

double pdmp_report_threshold(const pdmp_report* report) {
  return report ? report->rep.threshold : 0.0;
}

int pdmp_report_steps(const pdmp_report* report) {
  return report ? report->rep.n_steps() : 0;
}

pdmp_status pdmp_report_loglik_trace(const pdmp_report* report, double* out,
                                     int cap, int* n) {
  if (pdmp_status st = require(report && n, "null argument")) return st;
  *n = report->rep.n_steps();
  if (out) {
    const int copy = std::min(cap, *n);
    for (int i = 0; i < copy; ++i) out[i] = report->rep.per_step_loglik[i];
  }
  return PDMP_OK;
}

pdmp_status pdmp_report_save(const pdmp_report* report, const char* path) {
  if (pdmp_status st = require(report && path, "null argument")) return st;
  return guarded([&] { pdmp::save_report_json(report->rep, path); });
}

void pdmp_report_free(pdmp_report* report) { delete report; }

}  // extern "C"
