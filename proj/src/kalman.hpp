#pragma once

#include <Eigen/Core>
#include <vector>

#include "model.hpp"

namespace pdmp {

struct BeliefState {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

struct KalmanOptions {
  bool joseph = false;        // Joseph-form covariance update
  double s_floor = 1e-12;     // regularizer if the innovation variance degenerates
};

BeliefState predict_step(const BeliefState& prior, const LdsMatrices& mats,
                         double u, const Eigen::Matrix3d& q);

struct UpdateResult {
  BeliefState belief;
  double innovation = 0.0;
  double innovation_var = 0.0;
  double loglik = 0.0;
  bool regularized = false;
};

UpdateResult measurement_update(const BeliefState& predicted,
                                const LdsMatrices& mats, double r, double obs,
                                const KalmanOptions& opts = {});

// Forward pass over one DOF. Observations may contain NaN (missing); such
// steps keep the predicted belief and contribute no likelihood. Step 0 has
// no transition: the prior belief is updated directly.
struct FilterResult {
  std::vector<Eigen::Vector3d> pred_mean;
  std::vector<Eigen::Matrix3d> pred_cov;
  std::vector<Eigen::Vector3d> mean;
  std::vector<Eigen::Matrix3d> cov;
  std::vector<double> loglik;  // NaN where no observation was assimilated
  std::vector<double> innovation;
  std::vector<double> innovation_var;
  bool regularized = false;

  int n_steps() const { return static_cast<int>(mean.size()); }
  double total_loglik() const;
};

FilterResult run_filter(const LdsSequence& seq, const Eigen::VectorXd& obs,
                        const KalmanOptions& opts = {});

// RTS backward pass. cross[j] = Cov(s_{j+1}, s_j | all observations).
struct SmootherResult {
  std::vector<Eigen::Vector3d> mean;
  std::vector<Eigen::Matrix3d> cov;
  std::vector<Eigen::Matrix3d> cross;
};

SmootherResult rts_smooth(const LdsSequence& seq, const FilterResult& fr);

// Open-loop propagation of the belief (no observations).
struct DofRollout {
  std::vector<Eigen::Vector3d> mean;
  std::vector<Eigen::Matrix3d> cov;
};

DofRollout run_rollout(const LdsSequence& seq, int n_steps);

// ----- Model-level drivers over all DOFs (shared phase) -----

struct RolloutOptions {
  int n_steps = -1;           // <= 0: duration-matched to the fit
  double tau = -1.0;          // <= 0: model tau
  std::vector<double> start;  // empty: model starts
  std::vector<double> goal;   // empty: model goals
};

struct ModelRollout {
  double dt = 0.0;
  double tau = 1.0;
  Eigen::MatrixXd pos_mean;  // T x D
  Eigen::MatrixXd pos_std;
  Eigen::MatrixXd vel_mean;
  Eigen::MatrixXd acc_mean;

  int n_steps() const { return static_cast<int>(pos_mean.rows()); }
  int n_dofs() const { return static_cast<int>(pos_mean.cols()); }
};

ModelRollout rollout_model(const PrimitiveModel& model,
                           const RolloutOptions& opts = {});

struct ExecutionOptions {
  double tau = -1.0;          // <= 0: model tau
  std::vector<double> start;  // empty: first finite observation per DOF
  std::vector<double> goal;   // empty: model goals
  bool joseph = false;
  int smooth_window = 1;      // moving average over per-step log-likelihoods
};

// Filter a multi-DOF observation sequence (T x D, NaN = missing) through the
// model and collect the per-step predictive log-likelihood summed over DOFs.
struct ModelExecution {
  double dt = 0.0;
  Eigen::MatrixXd filt_pos;          // T x D filtered position means
  Eigen::MatrixXd pos_std;           // T x D
  Eigen::VectorXd step_loglik;       // per step, summed over observed DOFs
  Eigen::VectorXd smoothed_loglik;   // moving average of step_loglik
  double total_loglik = 0.0;
  double min_step_loglik = 0.0;      // min over smoothed entries
  bool regularized = false;
  bool truncated = false;            // observation stream shorter than the fit

  int n_steps() const { return static_cast<int>(filt_pos.rows()); }
  int n_dofs() const { return static_cast<int>(filt_pos.cols()); }
};

ModelExecution execute_and_monitor(const PrimitiveModel& model,
                                   const Eigen::MatrixXd& obs,
                                   const ExecutionOptions& opts = {});

// Columns: t, one mean per DOF, one position std per DOF.
void write_rollout_csv(const ModelRollout& roll, const std::string& path);

}  // namespace pdmp
