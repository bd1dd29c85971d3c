#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "dmp.hpp"
#include "lds.hpp"
#include "modes.hpp"
#include "regression.hpp"

#include <json.hpp>

namespace pdmp {

// One degree of freedom: the task frame it was fit in plus the weight
// posterior and the calibrated observation noise.
struct DofModel {
  double start = 0.0;
  double goal = 1.0;
  double delta_g_fit = 1.0;
  ForcingPosterior posterior;
  double obs_noise_r = 1e-4;
};

// A learned movement primitive over D degrees of freedom sharing one
// phase variable, one time step and one discretization.
struct PrimitiveModel {
  DmpHyperParams hyper;
  DiscretizationMode mode = DiscretizationMode::SubstitutedEuler;
  double dt = 0.01;
  double tau = 1.0;
  int fit_steps = 0;
  Eigen::Matrix3d init_cov = default_initial_covariance();
  std::vector<DofModel> dofs;

  // Failure-detection calibration.
  double train_loglik_min = 0.0;
  double threshold = 0.0;
  double threshold_multiplier = 2.0;

  // Provenance baked into saved artifacts.
  std::uint64_t seed = 0;
  std::string label;
  std::string config_hash;

  int n_dofs() const { return static_cast<int>(dofs.size()); }
  void validate() const;
};

// Task parameters for one DOF, optionally re-targeted to a new
// start/goal/tau while keeping the fit-time goal change for scaling.
TaskParams dof_task(const PrimitiveModel& model, int dof);
TaskParams dof_task(const PrimitiveModel& model, int dof, double start,
                    double goal, double tau);

// Time-indexed linear system for one DOF. Transitions into step j use the
// phase at step j-1, so u[0]/q_var[0] are placeholders; the first step is
// handled by a measurement update alone.
struct LdsSequence {
  LdsMatrices mats;
  Eigen::Vector3d init_mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d init_cov = Eigen::Matrix3d::Zero();
  std::vector<double> u;       // control input entering step j
  std::vector<double> q_var;   // forcing variance entering step j
  double q_scale = 1.0;        // (s * tau^2)^2
  double r = 1e-4;

  int n_steps() const { return static_cast<int>(u.size()); }
  Eigen::Matrix3d q_at(int j) const;
};

LdsSequence build_sequence(const PrimitiveModel& model, int dof,
                           const TaskParams& task, int n_steps);
LdsSequence build_sequence(const PrimitiveModel& model, int dof, int n_steps);

// JSON persistence. Files carry a format_version so stale artifacts fail
// loudly instead of half-loading.
nlohmann::json model_to_json(const PrimitiveModel& model);
PrimitiveModel model_from_json(const nlohmann::json& j);
void save_model_json(const PrimitiveModel& model, const std::string& path);
PrimitiveModel load_model_json(const std::string& path);

}  // namespace pdmp
