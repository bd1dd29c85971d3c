#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "em.hpp"
#include "model.hpp"
#include "trajectory.hpp"

namespace pdmp {

// K demonstrations resampled to a common length and time step.
struct DemoSet {
  std::vector<Eigen::MatrixXd> demos;  // each aligned_length x D
  std::vector<std::string> ids;
  double dt = 0.01;
  int aligned_length = 0;

  int n_demos() const { return static_cast<int>(demos.size()); }
  int n_dofs() const {
    return demos.empty() ? 0 : static_cast<int>(demos.front().cols());
  }
};

// Linear time-rescaling of every demo to the median duration, then uniform
// resampling to a shared sample count.
DemoSet align_demos(const std::vector<Trajectory>& raw);

struct LearnConfig {
  int n_basis = 25;
  double alpha_z = 25.0;
  double beta_z = -1.0;  // < 0: alpha_z / 4
  double alpha_x = 2.0;
  double tau = 1.0;
  double prior_precision = 1e-6;
  NoiseVarMode noise_mode = NoiseVarMode::Evidence;
  double noise_var = 1e-4;  // initial (Evidence) or fixed (Fixed) sigma_n^2
  DiscretizationMode mode = DiscretizationMode::SubstitutedEuler;
  EmOptions em;
  double threshold_multiplier = 2.0;
  int smooth_window = 1;
  std::uint64_t seed = 0;
  std::string label;
  std::string config_hash;
};

// Diagnostics from a training run, for reports.
struct LearnInfo {
  std::vector<double> fit_rmse;  // forcing-target residual RMSE per DOF
  double rollout_rmse = 0.0;     // mean rollout vs mean demo, over T x D
  double stroke_amplitude = 0.0; // largest per-DOF range of the mean demo
  EmResult em;
  double train_loglik_min = 0.0;
  double threshold = 0.0;
};

// Full pipeline: forcing targets per DOF -> pooled weight posterior ->
// EM observation noise -> threshold calibration.
PrimitiveModel learn_primitive(const DemoSet& ds, const LearnConfig& cfg,
                               LearnInfo* info = nullptr);

}  // namespace pdmp
