#include "trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "errors.hpp"

namespace pdmp {

std::string dof_column_name(int d) {
  static const char* names[] = {"x", "y", "z"};
  if (d >= 0 && d < 3) return names[d];
  return "c" + std::to_string(d);
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string dof_name(int d) { return dof_column_name(d); }

std::string format_double(double v) { return csv_number(v); }

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

}  // namespace

void Trajectory::validate() const {
  if (n_steps() < 3)
    throw std::invalid_argument("trajectory must have at least 3 samples");
  if (n_dofs() < 1) throw std::invalid_argument("trajectory has no channels");
  if (!(dt > 0.0)) throw std::invalid_argument("trajectory dt must be positive");
  if (!samples.allFinite())
    throw std::invalid_argument("trajectory contains non-finite values");
}

Trajectory resample(const Trajectory& traj, int n_steps, double new_dt) {
  traj.validate();
  if (n_steps < 3) throw std::invalid_argument("resample target too short");
  if (!(new_dt > 0.0)) throw std::invalid_argument("resample dt must be positive");

  const double src_duration = traj.duration();
  Trajectory out;
  out.dt = new_dt;
  out.label = traj.label;
  out.demo_id = traj.demo_id;
  out.samples.resize(n_steps, traj.n_dofs());

  // Sample at fractions of the source duration, so the demo is linearly
  // time-rescaled onto the new grid.
  for (int i = 0; i < n_steps; ++i) {
    const double frac = static_cast<double>(i) / (n_steps - 1);
    const double src_t = frac * src_duration;
    const double idx = src_t / traj.dt;
    const int lo = std::min(static_cast<int>(std::floor(idx)), traj.n_steps() - 1);
    const int hi = std::min(lo + 1, traj.n_steps() - 1);
    const double w = idx - lo;
    out.samples.row(i) =
        (1.0 - w) * traj.samples.row(lo) + w * traj.samples.row(hi);
  }
  return out;
}

void PerturbationSpec::validate() const {
  if (kind == Kind::None) return;
  if (!(onset_fraction > 0.0) || !(onset_fraction < 1.0))
    throw std::invalid_argument("perturbation onset must lie in (0, 1)");
  if (duration_fraction < 0.0 || duration_fraction > 1.0)
    throw std::invalid_argument("perturbation duration must lie in [0, 1]");
  if (onset_fraction + duration_fraction > 1.0 + 1e-12)
    throw std::invalid_argument("perturbation onset + duration must be <= 1");
}

Trajectory apply_perturbation(const Trajectory& traj,
                              const PerturbationSpec& spec) {
  traj.validate();
  spec.validate();
  Trajectory out = traj;
  if (spec.kind == PerturbationSpec::Kind::None) return out;

  const int last = traj.n_steps() - 1;
  const int onset = static_cast<int>(std::lround(spec.onset_fraction * last));
  const int span = static_cast<int>(std::lround(spec.duration_fraction * last));
  const int end = std::min(onset + span, traj.n_steps());
  for (int i = onset; i < end; ++i) out.samples.row(i) = traj.samples.row(onset);
  // Derivatives no longer describe the perturbed signal.
  out.velocities.resize(0, 0);
  out.accelerations.resize(0, 0);
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  traj.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "t";
  for (int d = 0; d < traj.n_dofs(); ++d) out << "," << dof_name(d);
  out << "\n";
  for (int i = 0; i < traj.n_steps(); ++i) {
    out << format_double(i * traj.dt);
    for (int d = 0; d < traj.n_dofs(); ++d)
      out << "," << format_double(traj.samples(i, d));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty file");
  if (line.empty() || line[0] != 't')
    throw ParseError(path + ":1: expected header starting with 't'");
  const auto n_cols = 1 + std::count(line.begin(), line.end(), ',');
  if (n_cols < 2) throw ParseError(path + ":1: need at least one DOF column");

  std::vector<double> times;
  std::vector<double> values;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      char* endp = nullptr;
      const double v = std::strtod(cell.c_str(), &endp);
      if (endp == cell.c_str() || *endp != '\0')
        throw ParseError(path + ":" + std::to_string(row) + ": column " +
                         std::to_string(col) + ": not a number: '" + cell + "'");
      if (col == 1)
        times.push_back(v);
      else
        values.push_back(v);
    }
    if (col != n_cols)
      throw ParseError(path + ":" + std::to_string(row) + ": expected " +
                       std::to_string(n_cols) + " columns, got " +
                       std::to_string(col));
  }
  const int n_steps = static_cast<int>(times.size());
  const int n_dofs = static_cast<int>(n_cols - 1);
  if (n_steps < 3) throw ParseError(path + ": fewer than 3 samples");

  Trajectory traj;
  traj.samples.resize(n_steps, n_dofs);
  for (int i = 0; i < n_steps; ++i)
    for (int d = 0; d < n_dofs; ++d)
      traj.samples(i, d) = values[static_cast<size_t>(i) * n_dofs + d];

  // Prefer sidecar metadata when present.
  const std::string meta = sidecar_path(path);
  if (std::filesystem::exists(meta)) {
    std::ifstream mf(meta);
    nlohmann::json j;
    try {
      mf >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(meta + ": invalid JSON: " + e.what());
    }
    traj.dt = j.value("dt", 0.0);
    traj.label = j.value("label", "");
    traj.demo_id = j.value("demo_id", "");
  }
  if (traj.dt <= 0.0) {
    if (n_steps < 2) throw ParseError(path + ": cannot infer dt");
    traj.dt = (times.back() - times.front()) / (n_steps - 1);
  }
  if (!(traj.dt > 0.0)) throw ParseError(path + ": non-positive sample spacing");
  for (int i = 0; i < n_steps; ++i) {
    if (std::abs(times[i] - i * traj.dt) > 1e-6 * std::max(1.0, times.back()))
      throw ParseError(path + ":" + std::to_string(i + 2) +
                       ": time column is not uniformly spaced");
  }
  traj.validate();
  return traj;
}

void write_trajectory_sidecar(const Trajectory& traj,
                              const std::string& csv_path, std::uint64_t seed,
                              const std::string& config_hash) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["label"] = traj.label;
  j["demo_id"] = traj.demo_id;
  j["dt"] = traj.dt;
  j["n_steps"] = traj.n_steps();
  j["n_dofs"] = traj.n_dofs();
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  std::ofstream out(sidecar_path(csv_path));
  if (!out) throw IoError("cannot open for writing: " + sidecar_path(csv_path));
  out << j.dump(2) << "\n";
}

}  // namespace pdmp
