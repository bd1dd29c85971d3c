#pragma once

#include <Eigen/Core>
#include <string>

namespace pdmp {

// Uniformly sampled multi-DOF time series. Velocities/accelerations are
// optional (zero rows when absent).
struct Trajectory {
  double dt = 0.0;
  Eigen::MatrixXd samples;        // T x D positions
  Eigen::MatrixXd velocities;     // empty or T x D
  Eigen::MatrixXd accelerations;  // empty or T x D
  std::string label;
  std::string demo_id;

  int n_steps() const { return static_cast<int>(samples.rows()); }
  int n_dofs() const { return static_cast<int>(samples.cols()); }
  double duration() const { return (n_steps() - 1) * dt; }
  bool has_derivatives() const { return velocities.rows() == samples.rows(); }

  void validate() const;
};

// Linear interpolation onto n_steps uniform samples spanning the original
// duration (derivatives are dropped; they are re-derived downstream).
Trajectory resample(const Trajectory& traj, int n_steps, double new_dt);

struct PerturbationSpec {
  enum class Kind { None, Hold };
  Kind kind = Kind::None;
  double onset_fraction = 0.5;     // in (0, 1)
  double duration_fraction = 0.5;  // onset + duration <= 1

  void validate() const;
};

// Hold freezes the observed position at its onset value for the given span,
// modeling a physically blocked movement; the tail is left unchanged.
Trajectory apply_perturbation(const Trajectory& traj,
                              const PerturbationSpec& spec);

// Shared CSV conventions: channel names x, y, z, c3, ... and full-precision
// decimal formatting.
std::string dof_column_name(int d);
std::string csv_number(double v);

// CSV with header "t,x,y[,...]"; one row per sample, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// Reads the CSV; if a sidecar JSON (same path, .json extension) exists, its
// label/demo_id/dt are used, otherwise dt is inferred from the t column.
Trajectory read_trajectory_csv(const std::string& path);

// Sidecar metadata next to the CSV: label, demo_id, dt, format/seed info.
void write_trajectory_sidecar(const Trajectory& traj, const std::string& csv_path,
                              std::uint64_t seed, const std::string& config_hash);

}  // namespace pdmp
