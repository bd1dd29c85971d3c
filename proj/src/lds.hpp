#pragma once

#include <Eigen/Core>

#include "dmp.hpp"
#include "modes.hpp"

namespace pdmp {

// One-DOF realization of the discretized attractor as s_t = A s_{t-1} + B u_t
// with state (acc, vel, pos). c reads the position out of the state.
struct LdsMatrices {
  Eigen::Matrix3d a;
  Eigen::Vector3d b;
  Eigen::RowVector3d c;
  DiscretizationMode mode = DiscretizationMode::SubstitutedEuler;
  double spectral_radius = 0.0;
};

LdsMatrices build_matrices(const DmpHyperParams& hp, const TaskParams& tp,
                           DiscretizationMode mode);

// u_t = tau^2 (alpha_z beta_z g + s mu_f). The tau^2 keeps B u_t equal to the
// scalar acceleration update at any playback speed.
double control_input(const DmpHyperParams& hp, const TaskParams& tp,
                     double forcing_mean);

// Q_t = (s tau^2)^2 sigma2_f B B^T: the transition noise induced by an
// uncertain forcing value. Rank 1 whenever sigma2_f > 0.
Eigen::Matrix3d process_noise_at(const TaskParams& tp, const Eigen::Vector3d& b,
                                 double forcing_var);

// Same noise with (s tau^2)^2 already folded into scale.
Eigen::Matrix3d process_noise_scaled(const Eigen::Vector3d& b, double scale,
                                     double forcing_var);

// Scalar observation noise on the measured position channel.
struct ObservationNoise {
  double r = 1e-4;
};

// Small known-start uncertainty around the initial state (acc, vel, pos).
Eigen::Matrix3d default_initial_covariance();

Eigen::Vector3d initial_state_mean(const TaskParams& tp);

}  // namespace pdmp
