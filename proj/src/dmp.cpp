#include "dmp.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace pdmp {

void DmpHyperParams::validate() const {
  if (!(alpha_z > 0.0) || !(beta_z > 0.0) || !(alpha_x > 0.0))
    throw std::invalid_argument("gains alpha_z, beta_z, alpha_x must be positive");
  if (centers.size() < 1)
    throw std::invalid_argument("at least one basis function required");
  if (widths.size() != centers.size())
    throw std::invalid_argument("centers and widths must have equal length");
  for (Eigen::Index i = 0; i < centers.size(); ++i) {
    if (!(centers[i] > 0.0) || centers[i] > 1.0)
      throw std::invalid_argument("basis centers must lie in (0, 1]");
    if (!(widths[i] > 0.0))
      throw std::invalid_argument("basis widths must be positive");
  }
}

void TaskParams::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

DmpHyperParams default_hyper_params(int n_basis, double tau, double dt,
                                    int n_steps, double alpha_z, double beta_z,
                                    double alpha_x) {
  if (n_basis < 1) throw std::invalid_argument("n_basis must be >= 1");
  if (n_steps < 2) throw std::invalid_argument("n_steps must be >= 2");
  DmpHyperParams hp;
  hp.alpha_z = alpha_z;
  hp.beta_z = beta_z < 0.0 ? alpha_z / 4.0 : beta_z;
  hp.alpha_x = alpha_x;
  hp.centers.resize(n_basis);
  hp.widths.resize(n_basis);
  const double duration = (n_steps - 1) * dt;
  for (int i = 0; i < n_basis; ++i) {
    const double t_i =
        n_basis == 1 ? 0.0 : duration * static_cast<double>(i) / (n_basis - 1);
    hp.centers[i] = std::exp(-alpha_x * tau * t_i);
  }
  for (int i = 0; i + 1 < n_basis; ++i) {
    const double dc = hp.centers[i] - hp.centers[i + 1];
    hp.widths[i] = 1.0 / (dc * dc);
  }
  hp.widths[n_basis - 1] = n_basis > 1 ? hp.widths[n_basis - 2] : 1.0;
  hp.validate();
  return hp;
}

PhaseTrajectory phase_trajectory(const DmpHyperParams& hp,
                                 const TaskParams& tp, int n_steps,
                                 PhaseIntegration integration) {
  hp.validate();
  tp.validate();
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  PhaseTrajectory phase;
  phase.values.resize(n_steps);
  if (integration == PhaseIntegration::ClosedForm) {
    const double rate = hp.alpha_x * tp.tau * tp.dt;
    for (int t = 0; t < n_steps; ++t) phase.values[t] = std::exp(-rate * t);
  } else {
    const double shrink = 1.0 - hp.alpha_x * tp.tau * tp.dt;
    if (!(shrink > 0.0))
      throw std::invalid_argument(
          "Euler phase integration requires alpha_x * tau * dt < 1");
    phase.values[0] = 1.0;
    for (int t = 1; t < n_steps; ++t)
      phase.values[t] = phase.values[t - 1] * shrink;
  }
  return phase;
}

Eigen::VectorXd basis_features(double x, const DmpHyperParams& hp) {
  hp.validate();
  if (!(x > 0.0) || x > 1.0)
    throw std::invalid_argument("phase must lie in (0, 1]");
  const int n = hp.n_basis();
  Eigen::VectorXd log_psi(n);
  for (int i = 0; i < n; ++i) {
    const double d = x - hp.centers[i];
    log_psi[i] = -hp.widths[i] * d * d;
  }
  const double shift = log_psi.maxCoeff();
  if (!std::isfinite(shift)) {
    // Every kernel underflowed; hand the weight to the nearest center.
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(x - hp.centers[i]);
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
    phi[nearest] = x;
    return phi;
  }
  Eigen::VectorXd psi = (log_psi.array() - shift).exp();
  return psi * (x / psi.sum());
}

double scaling_factor(const TaskParams& tp) {
  if (tp.delta_g_fit == 0.0)
    throw ModelError("scaling undefined: fitted amplitude delta_g is zero");
  return (tp.goal - tp.start) / tp.delta_g_fit;
}

void finite_differences(const Eigen::VectorXd& pos, double dt,
                        Eigen::VectorXd& vel, Eigen::VectorXd& acc) {
  const Eigen::Index n = pos.size();
  if (n < 3)
    throw std::invalid_argument("finite differences need at least 3 samples");
  vel.resize(n);
  acc.resize(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    vel[i] = (pos[i + 1] - pos[i - 1]) / (2.0 * dt);
  vel[0] = (pos[1] - pos[0]) / dt;
  vel[n - 1] = (pos[n - 1] - pos[n - 2]) / dt;
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    acc[i] = (vel[i + 1] - vel[i - 1]) / (2.0 * dt);
  acc[0] = (vel[1] - vel[0]) / dt;
  acc[n - 1] = (vel[n - 1] - vel[n - 2]) / dt;
}

Eigen::VectorXd forcing_targets(const Eigen::VectorXd& pos,
                                const Eigen::VectorXd* vel,
                                const Eigen::VectorXd* acc,
                                const DmpHyperParams& hp,
                                const TaskParams& tp) {
  hp.validate();
  tp.validate();
  if (pos.size() < 3)
    throw std::invalid_argument("demonstration must have at least 3 samples");
  if (vel && vel->size() != pos.size())
    throw std::invalid_argument("velocity length mismatch");
  if (acc && acc->size() != pos.size())
    throw std::invalid_argument("acceleration length mismatch");

  Eigen::VectorXd v, a;
  if (!vel || !acc) {
    finite_differences(pos, tp.dt, v, a);
  }
  const Eigen::VectorXd& vv = vel ? *vel : v;
  const Eigen::VectorXd& aa = acc ? *acc : a;

  const double tau2 = tp.tau * tp.tau;
  Eigen::VectorXd f(pos.size());
  for (Eigen::Index t = 0; t < pos.size(); ++t) {
    f[t] = aa[t] / tau2 -
           hp.alpha_z * (hp.beta_z * (tp.goal - pos[t]) - vv[t] / tp.tau);
  }
  return f;
}

ScalarRollout integrate_scalar_dmp(const DmpHyperParams& hp,
                                   const TaskParams& tp,
                                   const std::function<double(double)>& forcing,
                                   int n_steps, DiscretizationMode mode) {
  hp.validate();
  tp.validate();
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  const double s = scaling_factor(tp);
  const PhaseTrajectory phase = phase_trajectory(hp, tp, n_steps);

  ScalarRollout out;
  out.acc.setZero(n_steps);
  out.vel.setZero(n_steps);
  out.pos.setZero(n_steps);
  out.pos[0] = tp.start;

  const double tau2 = tp.tau * tp.tau;
  for (int t = 1; t < n_steps; ++t) {
    const double p_prev = out.pos[t - 1];
    const double v_prev = out.vel[t - 1];
    const double a_prev = out.acc[t - 1];
    const double f = forcing(phase.values[t - 1]);
    const double a_new =
        tau2 * (hp.alpha_z * (hp.beta_z * (tp.goal - p_prev) - v_prev / tp.tau) +
                s * f);
    if (mode == DiscretizationMode::SubstitutedEuler) {
      out.acc[t] = a_new;
      out.vel[t] = v_prev + tp.dt * a_new;
      out.pos[t] = p_prev + tp.dt * out.vel[t];
    } else {
      out.acc[t] = a_new;
      out.vel[t] = v_prev + tp.dt * a_prev;
      out.pos[t] = p_prev + tp.dt * v_prev;
    }
  }
  return out;
}

}  // namespace pdmp
