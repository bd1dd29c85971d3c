#include "lds.hpp"

#include <Eigen/Eigenvalues>

#include "errors.hpp"

namespace pdmp {

namespace {

double spectral_radius_of(const Eigen::Matrix3d& a) {
  Eigen::EigenSolver<Eigen::Matrix3d> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

LdsMatrices build_matrices(const DmpHyperParams& hp, const TaskParams& tp,
                           DiscretizationMode mode) {
  hp.validate();
  tp.validate();
  const double tau = tp.tau;
  const double dt = tp.dt;
  const double az = hp.alpha_z;
  const double azbz = hp.alpha_z * hp.beta_z;

  LdsMatrices m;
  m.mode = mode;
  m.c << 0.0, 0.0, 1.0;

  // Acceleration row, shared by both modes.
  const Eigen::RowVector3d acc_row(0.0, -az * tau, -azbz * tau * tau);
  if (mode == DiscretizationMode::PrintedA) {
    m.a.row(0) = acc_row;
    m.a.row(1) << dt, 1.0, 0.0;
    m.a.row(2) << 0.0, dt, 1.0;
    m.b << 1.0, 0.0, 0.0;
  } else {
    m.a.row(0) = acc_row;
    m.a.row(1) = dt * acc_row + Eigen::RowVector3d(0.0, 1.0, 0.0);
    m.a.row(2) = dt * dt * acc_row + Eigen::RowVector3d(0.0, dt, 1.0);
    m.b << 1.0, dt, dt * dt;
  }
  m.spectral_radius = spectral_radius_of(m.a);

  // The default gains are stable for any tau <= 2, dt <= 0.01; a violation
  // here means the matrix assembly itself is wrong.
  if (hp.alpha_z == 25.0 && hp.beta_z == 6.25 && tau <= 2.0 && dt <= 0.01 &&
      m.spectral_radius >= 1.0) {
    throw std::logic_error("discretized system unstable inside the default envelope");
  }
  return m;
}

double control_input(const DmpHyperParams& hp, const TaskParams& tp,
                     double forcing_mean) {
  const double s = scaling_factor(tp);
  return tp.tau * tp.tau * (hp.alpha_z * hp.beta_z * tp.goal + s * forcing_mean);
}

Eigen::Matrix3d process_noise_at(const TaskParams& tp, const Eigen::Vector3d& b,
                                 double forcing_var) {
  const double s = scaling_factor(tp);
  const double gain = s * tp.tau * tp.tau;
  return process_noise_scaled(b, gain * gain, forcing_var);
}

Eigen::Matrix3d process_noise_scaled(const Eigen::Vector3d& b, double scale,
                                     double forcing_var) {
  if (forcing_var < 0.0)
    throw std::invalid_argument("forcing variance must be non-negative");
  if (scale < 0.0) throw std::invalid_argument("noise scale must be non-negative");
  return (scale * forcing_var) * (b * b.transpose());
}

Eigen::Matrix3d default_initial_covariance() {
  Eigen::Matrix3d q0 = Eigen::Matrix3d::Zero();
  q0(0, 0) = 1e-4;
  q0(1, 1) = 1e-4;
  q0(2, 2) = 1e-8;
  return q0;
}

Eigen::Vector3d initial_state_mean(const TaskParams& tp) {
  return Eigen::Vector3d(0.0, 0.0, tp.start);
}

}  // namespace pdmp
