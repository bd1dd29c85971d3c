#include "kalman.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "errors.hpp"
#include "trajectory.hpp"

namespace pdmp {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::Matrix3d symmetrized(const Eigen::Matrix3d& m) {
  return 0.5 * (m + m.transpose());
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// G^T = P^{-1} (A V); falls back to a jittered solve if P lost definiteness.
Eigen::Matrix3d smoother_gain(const Eigen::Matrix3d& pred_cov,
                              const Eigen::Matrix3d& a,
                              const Eigen::Matrix3d& filt_cov) {
  const Eigen::Matrix3d rhs = a * filt_cov;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(symmetrized(pred_cov));
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    return ldlt.solve(rhs).transpose();
  }
  const double jitter = 1e-12 * std::max(1.0, pred_cov.trace());
  Eigen::Matrix3d p = symmetrized(pred_cov);
  p.diagonal().array() += jitter;
  return Eigen::LDLT<Eigen::Matrix3d>(p).solve(rhs).transpose();
}

}  // namespace

BeliefState predict_step(const BeliefState& prior, const LdsMatrices& mats,
                         double u, const Eigen::Matrix3d& q) {
  BeliefState out;
  out.mean = mats.a * prior.mean + mats.b * u;
  out.cov = symmetrized(mats.a * prior.cov * mats.a.transpose() + q);
  return out;
}

UpdateResult measurement_update(const BeliefState& predicted,
                                const LdsMatrices& mats, double r, double obs,
                                const KalmanOptions& opts) {
  if (!(r > 0.0)) throw std::invalid_argument("observation noise must be > 0");
  if (!std::isfinite(obs))
    throw std::invalid_argument("measurement_update needs a finite observation");

  UpdateResult res;
  const double predicted_pos = mats.c * predicted.mean;
  double s = mats.c * predicted.cov * mats.c.transpose() + r;
  if (!(s > opts.s_floor)) {
    s = std::max(s, 0.0) + opts.s_floor;
    res.regularized = true;
  }
  res.innovation = obs - predicted_pos;
  res.innovation_var = s;
  res.loglik =
      -0.5 * (kLog2Pi + std::log(s) + res.innovation * res.innovation / s);

  const Eigen::Vector3d k = predicted.cov * mats.c.transpose() / s;
  res.belief.mean = predicted.mean + k * res.innovation;
  if (opts.joseph) {
    const Eigen::Matrix3d i_kc =
        Eigen::Matrix3d::Identity() - k * mats.c;
    res.belief.cov = symmetrized(i_kc * predicted.cov * i_kc.transpose() +
                                 k * r * k.transpose());
  } else {
    res.belief.cov =
        symmetrized(predicted.cov - k * (mats.c * predicted.cov));
  }
  return res;
}

double FilterResult::total_loglik() const {
  double total = 0.0;
  for (double l : loglik)
    if (std::isfinite(l)) total += l;
  return total;
}

FilterResult run_filter(const LdsSequence& seq, const Eigen::VectorXd& obs,
                        const KalmanOptions& opts) {
  const int t = seq.n_steps();
  if (t < 1) throw std::invalid_argument("sequence has no steps");
  if (obs.size() != t)
    throw std::invalid_argument("observation length does not match sequence");

  FilterResult fr;
  fr.pred_mean.resize(static_cast<size_t>(t));
  fr.pred_cov.resize(static_cast<size_t>(t));
  fr.mean.resize(static_cast<size_t>(t));
  fr.cov.resize(static_cast<size_t>(t));
  fr.loglik.assign(static_cast<size_t>(t), nan_value());
  fr.innovation.assign(static_cast<size_t>(t), nan_value());
  fr.innovation_var.assign(static_cast<size_t>(t), nan_value());

  BeliefState belief{seq.init_mean, seq.init_cov};
  for (int j = 0; j < t; ++j) {
    BeliefState pred = belief;
    if (j > 0) {
      pred = predict_step(belief, seq.mats, seq.u[static_cast<size_t>(j)],
                          seq.q_at(j));
    }
    fr.pred_mean[static_cast<size_t>(j)] = pred.mean;
    fr.pred_cov[static_cast<size_t>(j)] = pred.cov;

    const double o = obs[j];
    if (std::isfinite(o)) {
      KalmanOptions ko = opts;
      const UpdateResult up = measurement_update(pred, seq.mats, seq.r, o, ko);
      belief = up.belief;
      fr.loglik[static_cast<size_t>(j)] = up.loglik;
      fr.innovation[static_cast<size_t>(j)] = up.innovation;
      fr.innovation_var[static_cast<size_t>(j)] = up.innovation_var;
      fr.regularized = fr.regularized || up.regularized;
    } else {
      belief = pred;
    }
    fr.mean[static_cast<size_t>(j)] = belief.mean;
    fr.cov[static_cast<size_t>(j)] = belief.cov;
  }
  return fr;
}

SmootherResult rts_smooth(const LdsSequence& seq, const FilterResult& fr) {
  const int t = fr.n_steps();
  if (t < 1) throw std::invalid_argument("empty filter result");
  if (seq.n_steps() != t)
    throw std::invalid_argument("sequence/filter length mismatch");

  SmootherResult sm;
  sm.mean.resize(static_cast<size_t>(t));
  sm.cov.resize(static_cast<size_t>(t));
  if (t > 1) sm.cross.resize(static_cast<size_t>(t - 1));

  sm.mean[static_cast<size_t>(t - 1)] = fr.mean[static_cast<size_t>(t - 1)];
  sm.cov[static_cast<size_t>(t - 1)] = fr.cov[static_cast<size_t>(t - 1)];
  for (int j = t - 2; j >= 0; --j) {
    const auto ju = static_cast<size_t>(j);
    const auto jn = static_cast<size_t>(j + 1);
    const Eigen::Matrix3d g =
        smoother_gain(fr.pred_cov[jn], seq.mats.a, fr.cov[ju]);
    sm.mean[ju] = fr.mean[ju] + g * (sm.mean[jn] - fr.pred_mean[jn]);
    sm.cov[ju] = symmetrized(
        fr.cov[ju] + g * (sm.cov[jn] - fr.pred_cov[jn]) * g.transpose());
    sm.cross[ju] = sm.cov[jn] * g.transpose();
  }
  return sm;
}

DofRollout run_rollout(const LdsSequence& seq, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (n_steps > seq.n_steps())
    throw std::invalid_argument("rollout longer than sequence");
  DofRollout out;
  out.mean.resize(static_cast<size_t>(n_steps));
  out.cov.resize(static_cast<size_t>(n_steps));
  BeliefState belief{seq.init_mean, seq.init_cov};
  out.mean[0] = belief.mean;
  out.cov[0] = belief.cov;
  for (int j = 1; j < n_steps; ++j) {
    belief = predict_step(belief, seq.mats, seq.u[static_cast<size_t>(j)],
                          seq.q_at(j));
    out.mean[static_cast<size_t>(j)] = belief.mean;
    out.cov[static_cast<size_t>(j)] = belief.cov;
  }
  return out;
}

namespace {

// Resolve per-DOF start/goal overrides against the model defaults.
double resolved_entry(const std::vector<double>& override_vals, int dof,
                      double fallback) {
  if (override_vals.empty()) return fallback;
  return override_vals[static_cast<size_t>(dof)];
}

void check_override(const std::vector<double>& v, int n_dofs,
                    const char* what) {
  if (!v.empty() && static_cast<int>(v.size()) != n_dofs)
    throw std::invalid_argument(std::string(what) +
                                " override must have one entry per DOF");
}

}  // namespace

ModelRollout rollout_model(const PrimitiveModel& model,
                           const RolloutOptions& opts) {
  model.validate();
  const int d = model.n_dofs();
  check_override(opts.start, d, "start");
  check_override(opts.goal, d, "goal");
  const double tau = opts.tau > 0.0 ? opts.tau : model.tau;
  int n_steps = opts.n_steps;
  if (n_steps <= 0) {
    // Match the fit duration, rescaled by the speed change.
    n_steps = 1 + static_cast<int>(std::lround(
                      (model.fit_steps - 1) * model.tau / tau));
    n_steps = std::max(n_steps, 2);
  }

  ModelRollout out;
  out.dt = model.dt;
  out.tau = tau;
  out.pos_mean.resize(n_steps, d);
  out.pos_std.resize(n_steps, d);
  out.vel_mean.resize(n_steps, d);
  out.acc_mean.resize(n_steps, d);
  for (int k = 0; k < d; ++k) {
    const DofModel& dm = model.dofs[static_cast<size_t>(k)];
    const TaskParams task =
        dof_task(model, k, resolved_entry(opts.start, k, dm.start),
                 resolved_entry(opts.goal, k, dm.goal), tau);
    const LdsSequence seq = build_sequence(model, k, task, n_steps);
    const DofRollout roll = run_rollout(seq, n_steps);
    for (int j = 0; j < n_steps; ++j) {
      const auto ju = static_cast<size_t>(j);
      out.acc_mean(j, k) = roll.mean[ju][0];
      out.vel_mean(j, k) = roll.mean[ju][1];
      out.pos_mean(j, k) = roll.mean[ju][2];
      out.pos_std(j, k) = std::sqrt(std::max(0.0, roll.cov[ju](2, 2)));
    }
  }
  return out;
}

ModelExecution execute_and_monitor(const PrimitiveModel& model,
                                   const Eigen::MatrixXd& obs,
                                   const ExecutionOptions& opts) {
  model.validate();
  const int t = static_cast<int>(obs.rows());
  const int d = model.n_dofs();
  if (t < 1) throw std::invalid_argument("no observations");
  if (static_cast<int>(obs.cols()) != d)
    throw std::invalid_argument("observation DOF count does not match model");
  check_override(opts.start, d, "start");
  check_override(opts.goal, d, "goal");
  if (opts.smooth_window < 1)
    throw std::invalid_argument("smooth_window must be >= 1");
  const double tau = opts.tau > 0.0 ? opts.tau : model.tau;

  ModelExecution ex;
  ex.dt = model.dt;
  ex.truncated = t < model.fit_steps;
  ex.filt_pos.resize(t, d);
  ex.pos_std.resize(t, d);
  ex.step_loglik.setConstant(t, nan_value());

  KalmanOptions ko;
  ko.joseph = opts.joseph;
  std::vector<FilterResult> per_dof(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    const DofModel& dm = model.dofs[static_cast<size_t>(k)];
    double start = dm.start;
    if (!opts.start.empty()) {
      start = opts.start[static_cast<size_t>(k)];
    } else {
      // By default anchor the prior at the first observed position.
      for (int j = 0; j < t; ++j) {
        if (std::isfinite(obs(j, k))) {
          start = obs(j, k);
          break;
        }
      }
    }
    const TaskParams task =
        dof_task(model, k, start, resolved_entry(opts.goal, k, dm.goal), tau);
    const LdsSequence seq = build_sequence(model, k, task, t);
    per_dof[static_cast<size_t>(k)] = run_filter(seq, obs.col(k), ko);
    const FilterResult& fr = per_dof[static_cast<size_t>(k)];
    ex.regularized = ex.regularized || fr.regularized;
    for (int j = 0; j < t; ++j) {
      const auto ju = static_cast<size_t>(j);
      ex.filt_pos(j, k) = fr.mean[ju][2];
      ex.pos_std(j, k) = std::sqrt(std::max(0.0, fr.cov[ju](2, 2)));
    }
  }

  for (int j = 0; j < t; ++j) {
    double sum = 0.0;
    bool any = false;
    for (int k = 0; k < d; ++k) {
      const double l = per_dof[static_cast<size_t>(k)].loglik[static_cast<size_t>(j)];
      if (std::isfinite(l)) {
        sum += l;
        any = true;
      }
    }
    if (any) ex.step_loglik[j] = sum;
  }

  // Trailing moving average; steps without evidence stay NaN.
  const int w = opts.smooth_window;
  ex.smoothed_loglik.setConstant(t, nan_value());
  for (int j = 0; j < t; ++j) {
    double sum = 0.0;
    int count = 0;
    for (int i = std::max(0, j - w + 1); i <= j; ++i) {
      if (std::isfinite(ex.step_loglik[i])) {
        sum += ex.step_loglik[i];
        ++count;
      }
    }
    if (count > 0) ex.smoothed_loglik[j] = sum / count;
  }

  ex.total_loglik = 0.0;
  double min_l = std::numeric_limits<double>::infinity();
  for (int j = 0; j < t; ++j) {
    if (std::isfinite(ex.step_loglik[j])) ex.total_loglik += ex.step_loglik[j];
    if (std::isfinite(ex.smoothed_loglik[j]))
      min_l = std::min(min_l, ex.smoothed_loglik[j]);
  }
  ex.min_step_loglik = std::isfinite(min_l) ? min_l : nan_value();
  return ex;
}

void write_rollout_csv(const ModelRollout& roll, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "t";
  for (int k = 0; k < roll.n_dofs(); ++k)
    out << "," << dof_column_name(k) << "_mean";
  for (int k = 0; k < roll.n_dofs(); ++k)
    out << "," << dof_column_name(k) << "_std";
  out << "\n";
  for (int j = 0; j < roll.n_steps(); ++j) {
    out << csv_number(j * roll.dt);
    for (int k = 0; k < roll.n_dofs(); ++k)
      out << "," << csv_number(roll.pos_mean(j, k));
    for (int k = 0; k < roll.n_dofs(); ++k)
      out << "," << csv_number(roll.pos_std(j, k));
    out << "\n";
  }
  if (!out) throw IoError("failed writing rollout: " + path);
}

}  // namespace pdmp
