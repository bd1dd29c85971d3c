#pragma once

#include <Eigen/Core>
#include <functional>

#include "modes.hpp"

namespace pdmp {

// Gains and basis layout of one primitive. Shared by every DOF.
struct DmpHyperParams {
  double alpha_z = 25.0;
  double beta_z = 6.25;   // critical damping at alpha_z / 4
  double alpha_x = 2.0;   // phase decay rate
  Eigen::VectorXd centers;  // basis centers in phase space, descending in (0,1]
  Eigen::VectorXd widths;   // positive

  int n_basis() const { return static_cast<int>(centers.size()); }
  void validate() const;
};

// Centers at the phase values of uniformly spaced times over the fit
// horizon, widths set so each kernel reaches its neighbor. beta_z < 0
// selects critical damping (alpha_z / 4).
DmpHyperParams default_hyper_params(int n_basis, double tau, double dt,
                                    int n_steps, double alpha_z = 25.0,
                                    double beta_z = -1.0,
                                    double alpha_x = 2.0);

// Per-DOF task framing. tau is a speed factor: 1 plays at fit speed, 2 at
// double speed. delta_g_fit is the amplitude stored when the primitive was
// fitted; it stays 0 until then.
struct TaskParams {
  double goal = 0.0;
  double start = 0.0;
  double tau = 1.0;
  double dt = 0.01;
  double delta_g_fit = 0.0;

  void validate() const;
};

enum class PhaseIntegration { ClosedForm, Euler };

struct PhaseTrajectory {
  Eigen::VectorXd values;  // x_t, strictly decreasing, x_0 = 1
};

// x_t = exp(-alpha_x * tau * t * dt). The Euler variant replays the
// stepwise integration x_{t} = x_{t-1} (1 - alpha_x tau dt).
PhaseTrajectory phase_trajectory(
    const DmpHyperParams& hp, const TaskParams& tp, int n_steps,
    PhaseIntegration integration = PhaseIntegration::ClosedForm);

// Normalized, phase-gated kernel activations: component i is
// psi_i(x) x / sum_j psi_j(x). Evaluated in shifted log space; if every
// kernel still underflows the nearest center takes the full weight.
Eigen::VectorXd basis_features(double x, const DmpHyperParams& hp);

// (goal - start) / delta_g_fit.
double scaling_factor(const TaskParams& tp);

// Forcing values that would reproduce a demonstrated DOF:
// f_t = acc_t / tau^2 - alpha_z (beta_z (g - pos_t) - vel_t / tau).
// vel/acc may be null, in which case finite differences of pos are used.
Eigen::VectorXd forcing_targets(const Eigen::VectorXd& pos,
                                const Eigen::VectorXd* vel,
                                const Eigen::VectorXd* acc,
                                const DmpHyperParams& hp,
                                const TaskParams& tp);

// Central differences, one-sided at the boundaries.
void finite_differences(const Eigen::VectorXd& pos, double dt,
                        Eigen::VectorXd& vel, Eigen::VectorXd& acc);

struct ScalarRollout {
  Eigen::VectorXd acc;
  Eigen::VectorXd vel;
  Eigen::VectorXd pos;
};

// Deterministic stepwise integration of one DOF, starting at rest.
// The forcing callback receives the phase of the step the transition
// leaves from. This is the reference the probabilistic rollout is checked
// against, so it stays independent of the matrix-based propagation.
ScalarRollout integrate_scalar_dmp(const DmpHyperParams& hp,
                                   const TaskParams& tp,
                                   const std::function<double(double)>& forcing,
                                   int n_steps, DiscretizationMode mode);

}  // namespace pdmp
