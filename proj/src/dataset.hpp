#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "trajectory.hpp"

namespace pdmp {

// Hand-authored single-stroke letterform: spline control points, M x 2.
struct LetterTemplate {
  std::string letter;
  Eigen::MatrixXd points;
};

std::vector<LetterTemplate> load_letter_templates(const std::string& path);

struct DatasetConfig {
  int n_train = 10;
  int n_test = 10;
  double dt = 0.01;
  int n_steps = 101;
  std::uint64_t seed = 0;
  double control_jitter = 0.012;   // per-coordinate control point noise
  double amplitude_jitter = 0.05;  // per-axis scale range about the centroid
  double time_warp = 0.05;         // sinusoidal phase warp amplitude
  double min_goal_change = 0.02;   // reject strokes with degenerate endpoints
  std::string config_hash;

  void validate() const;
};

// Deterministic per-demo generation: a Catmull-Rom pass through jittered
// control points, traversed with an eased (zero endpoint velocity) and
// mildly warped time parameter. Degenerate endpoint draws are resampled
// deterministically.
Trajectory generate_demo(const LetterTemplate& tpl, const DatasetConfig& cfg,
                         int letter_index, bool test_split, int demo_index);

// Writes root/letters/<letter>/<train|test>/<demo_id>.csv (+ JSON sidecars)
// and a manifest at root/manifest.json.
void write_dataset(const std::string& root,
                   const std::vector<LetterTemplate>& templates,
                   const DatasetConfig& cfg);

// All *.csv trajectories in one directory, sorted by filename.
std::vector<Trajectory> load_demo_dir(const std::string& dir);

}  // namespace pdmp
