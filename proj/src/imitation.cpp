#include "imitation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"
#include "kalman.hpp"
#include "monitor.hpp"

namespace pdmp {
namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DemoSet align_demos(const std::vector<Trajectory>& raw) {
  if (raw.empty()) throw std::invalid_argument("no demonstrations");
  std::vector<double> durations, dts;
  durations.reserve(raw.size());
  dts.reserve(raw.size());
  for (const Trajectory& t : raw) {
    t.validate();
    durations.push_back(t.duration());
    dts.push_back(t.dt);
  }
  const int d = raw.front().n_dofs();
  for (const Trajectory& t : raw)
    if (t.n_dofs() != d)
      throw std::invalid_argument("demos disagree on DOF count");

  DemoSet ds;
  ds.dt = median_of(dts);
  const double duration = median_of(durations);
  ds.aligned_length =
      std::max<int>(3, 1 + static_cast<int>(std::lround(duration / ds.dt)));
  for (size_t i = 0; i < raw.size(); ++i) {
    const Trajectory res = resample(raw[i], ds.aligned_length, ds.dt);
    ds.demos.push_back(res.samples);
    ds.ids.push_back(raw[i].demo_id.empty() ? "demo_" + std::to_string(i)
                                            : raw[i].demo_id);
  }
  return ds;
}

PrimitiveModel learn_primitive(const DemoSet& ds, const LearnConfig& cfg,
                               LearnInfo* info) {
  if (ds.n_demos() < 1) throw std::invalid_argument("empty demo set");
  if (ds.aligned_length < 3)
    throw std::invalid_argument("aligned demos need at least 3 samples");
  const int t = ds.aligned_length;
  const int d = ds.n_dofs();
  if (d < 1) throw std::invalid_argument("demos have no DOFs");
  for (const Eigen::MatrixXd& demo : ds.demos) {
    if (static_cast<int>(demo.rows()) != t ||
        static_cast<int>(demo.cols()) != d)
      throw std::invalid_argument("demo set is not aligned");
    if (!demo.allFinite())
      throw std::invalid_argument("demo contains non-finite values");
  }
  const int k_demos = ds.n_demos();

  PrimitiveModel model;
  model.hyper = default_hyper_params(cfg.n_basis, cfg.tau, ds.dt, t,
                                     cfg.alpha_z, cfg.beta_z, cfg.alpha_x);
  model.mode = cfg.mode;
  model.dt = ds.dt;
  model.tau = cfg.tau;
  model.fit_steps = t;
  model.threshold_multiplier = cfg.threshold_multiplier;
  model.seed = cfg.seed;
  model.label = cfg.label;
  model.config_hash = cfg.config_hash;

  // Shared per-step features: every DOF rides the same phase.
  TaskParams phase_task;
  phase_task.start = 0.0;
  phase_task.goal = 1.0;
  phase_task.tau = cfg.tau;
  phase_task.dt = ds.dt;
  phase_task.delta_g_fit = 1.0;
  const PhaseTrajectory phase =
      phase_trajectory(model.hyper, phase_task, t);
  Eigen::MatrixXd phi(t, model.hyper.n_basis());
  for (int j = 0; j < t; ++j)
    phi.row(j) = basis_features(phase.values[j], model.hyper).transpose();

  Eigen::MatrixXd phi_pool(k_demos * t, model.hyper.n_basis());
  for (int m = 0; m < k_demos; ++m) phi_pool.middleRows(m * t, t) = phi;

  LearnInfo local_info;
  LearnInfo& out = info ? *info : local_info;
  out.fit_rmse.assign(static_cast<size_t>(d), 0.0);

  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd y(k_demos * t);
    double start_sum = 0.0, goal_sum = 0.0;
    for (int m = 0; m < k_demos; ++m) {
      const Eigen::VectorXd pos = ds.demos[static_cast<size_t>(m)].col(k);
      TaskParams tp;
      tp.start = pos[0];
      tp.goal = pos[t - 1];
      tp.tau = cfg.tau;
      tp.dt = ds.dt;
      tp.delta_g_fit = tp.goal - tp.start;  // fit-time scaling is unity
      y.segment(m * t, t) =
          forcing_targets(pos, nullptr, nullptr, model.hyper, tp);
      start_sum += tp.start;
      goal_sum += tp.goal;
    }
    DofModel dof;
    dof.start = start_sum / k_demos;
    dof.goal = goal_sum / k_demos;
    dof.delta_g_fit = dof.goal - dof.start;
    if (dof.delta_g_fit == 0.0)
      throw FitError("DOF " + std::to_string(k) +
                     ": start equals goal, forcing scale undefined");
    try {
      dof.posterior = fit_forcing_posterior(phi_pool, y, cfg.prior_precision,
                                            cfg.noise_mode, cfg.noise_var);
    } catch (const FitError& e) {
      throw FitError("forcing fit, DOF " + std::to_string(k) + ": " +
                     e.what());
    }
    out.fit_rmse[static_cast<size_t>(k)] = std::sqrt(
        (phi_pool * dof.posterior.mean_w - y).squaredNorm() / y.size());
    dof.obs_noise_r = cfg.em.r_init;
    model.dofs.push_back(std::move(dof));
  }

  out.em = em_fit_observation_noise(model, ds.demos, cfg.em);
  for (int k = 0; k < d; ++k)
    model.dofs[static_cast<size_t>(k)].obs_noise_r =
        out.em.r[static_cast<size_t>(k)];

  ExecutionOptions eo;
  eo.smooth_window = cfg.smooth_window;
  out.threshold = calibrate_threshold(model, ds.demos, eo);
  out.train_loglik_min = model.train_loglik_min;

  // Reconstruction diagnostics against the mean demonstration.
  Eigen::MatrixXd mean_demo = Eigen::MatrixXd::Zero(t, d);
  for (const Eigen::MatrixXd& demo : ds.demos) mean_demo += demo;
  mean_demo /= static_cast<double>(k_demos);
  const ModelRollout roll = rollout_model(model);
  const int tr = std::min(roll.n_steps(), t);
  out.rollout_rmse = std::sqrt(
      (roll.pos_mean.topRows(tr) - mean_demo.topRows(tr)).squaredNorm() /
      (static_cast<double>(tr) * d));
  out.stroke_amplitude = 0.0;
  for (int k = 0; k < d; ++k)
    out.stroke_amplitude =
        std::max(out.stroke_amplitude, mean_demo.col(k).maxCoeff() -
                                           mean_demo.col(k).minCoeff());

  model.validate();
  return model;
}

}  // namespace pdmp
