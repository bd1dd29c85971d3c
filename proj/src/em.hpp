#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "model.hpp"

namespace pdmp {

struct EmOptions {
  int max_iters = 30;
  double tol = 1e-8;      // stop when the loglik gain per iteration drops below
  double r_init = 1e-4;
  double r_floor = 1e-12;
};

struct EmResult {
  std::vector<double> r;             // per DOF
  std::vector<double> loglik_trace;  // total demo loglik at each E-step
  int iters = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Estimate the per-DOF observation noise from aligned training demos
// (each T x D, T = model.fit_steps). E-step smooths every demo; M-step
// averages squared residuals plus smoothed position variance. The model
// itself is left untouched; callers store the returned r.
EmResult em_fit_observation_noise(const PrimitiveModel& model,
                                  const std::vector<Eigen::MatrixXd>& demos,
                                  const EmOptions& opts = {});

}  // namespace pdmp
