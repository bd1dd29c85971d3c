#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace pdmp {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform Catmull-Rom with duplicated end points, q in [0, 1].
Eigen::Vector2d spline_at(const Eigen::MatrixXd& pts, double q) {
  const int m = static_cast<int>(pts.rows());
  const int segs = m - 1;
  double f = q * segs;
  int i = std::min(static_cast<int>(f), segs - 1);
  const double s = f - i;

  auto p = [&](int idx) -> Eigen::Vector2d {
    idx = std::clamp(idx, 0, m - 1);
    return pts.row(idx).transpose();
  };
  const Eigen::Vector2d p0 = p(i - 1), p1 = p(i), p2 = p(i + 1), p3 = p(i + 2);
  const double s2 = s * s, s3 = s2 * s;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * s +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s3);
}

std::string two_digit(int n) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d", n);
  return buf;
}

}  // namespace

void DatasetConfig::validate() const {
  if (n_train < 0 || n_test < 0)
    throw std::invalid_argument("demo counts must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (n_steps < 3) throw std::invalid_argument("n_steps must be >= 3");
  if (control_jitter < 0.0 || amplitude_jitter < 0.0 || time_warp < 0.0)
    throw std::invalid_argument("jitter magnitudes must be >= 0");
  if (time_warp >= 1.0 / kPi)
    throw std::invalid_argument("time warp too large to stay monotone");
  if (min_goal_change < 0.0)
    throw std::invalid_argument("min_goal_change must be >= 0");
}

std::vector<LetterTemplate> load_letter_templates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open templates file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (j.value("kind", std::string()) != "pdmp_letter_templates")
    throw ParseError(path + ": not a letter templates file");
  if (j.value("format_version", 0) != 1)
    throw ParseError(path + ": unsupported templates format_version");

  std::vector<LetterTemplate> out;
  try {
    // Object keys iterate sorted, which fixes the letter order.
    for (const auto& [letter, pts] : j.at("letters").items()) {
      LetterTemplate tpl;
      tpl.letter = letter;
      const auto rows = pts.get<std::vector<std::vector<double>>>();
      if (rows.size() < 4)
        throw ParseError(path + ": letter '" + letter +
                         "' needs at least 4 control points");
      tpl.points.resize(static_cast<int>(rows.size()), 2);
      for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 2)
          throw ParseError(path + ": letter '" + letter +
                           "' control points must be [x, y] pairs");
        tpl.points(static_cast<int>(r), 0) = rows[r][0];
        tpl.points(static_cast<int>(r), 1) = rows[r][1];
      }
      out.push_back(std::move(tpl));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (out.empty()) throw ParseError(path + ": no letters defined");
  return out;
}

Trajectory generate_demo(const LetterTemplate& tpl, const DatasetConfig& cfg,
                         int letter_index, bool test_split, int demo_index) {
  cfg.validate();
  if (tpl.points.rows() < 4)
    throw std::invalid_argument("letter template needs at least 4 points");

  const int t = cfg.n_steps;
  const std::uint64_t demo_code =
      static_cast<std::uint64_t>(demo_index) + (test_split ? 1000000u : 0u);

  for (int attempt = 0; attempt < 64; ++attempt) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(letter_index),
                     demo_code, static_cast<std::uint64_t>(attempt)));

    // Perturbation magnitudes are banded ([0.6, 1]·cap, random direction)
    // rather than centered at zero: every demo then carries a similar
    // deviation energy, which keeps the spread of per-demo likelihood
    // minima compact enough for min-based threshold calibration.
    auto banded = [&](double cap) {
      const double mag = rng.uniform(0.6 * cap, cap);
      return rng.uniform(0.0, 1.0) < 0.5 ? -mag : mag;
    };

    // Control points move along the local curve normal: tangent motion is
    // mostly re-parameterization the spline absorbs, so normal displacement
    // gives every demo a comparable shape change for the same magnitude.
    Eigen::MatrixXd pts = tpl.points;
    const int m = static_cast<int>(pts.rows());
    for (int r = 0; r < m; ++r) {
      const int lo = std::max(r - 1, 0), hi = std::min(r + 1, m - 1);
      Eigen::Vector2d tan = (tpl.points.row(hi) - tpl.points.row(lo)).transpose();
      const double len = tan.norm();
      tan = len > 1e-12 ? Eigen::Vector2d(tan / len) : Eigen::Vector2d(1.0, 0.0);
      const Eigen::Vector2d nrm(-tan.y(), tan.x());
      pts.row(r) += (banded(cfg.control_jitter) * nrm).transpose();
    }

    // Axis scales sit on a ring around 1 so the demo "styles" form a
    // continuum instead of discrete sign combinations; ten training draws
    // then bracket anything a test draw can produce.
    const Eigen::RowVector2d centroid = pts.colwise().mean();
    const double style = rng.uniform(0.0, 2.0 * kPi);
    const Eigen::Vector2d scale(1.0 + cfg.amplitude_jitter * std::cos(style),
                                1.0 + cfg.amplitude_jitter * std::sin(style));
    for (int c = 0; c < 2; ++c)
      pts.col(c) = centroid[c] + (pts.col(c).array() - centroid[c]) * scale[c];
    const double warp = banded(cfg.time_warp);

    Trajectory traj;
    traj.dt = cfg.dt;
    traj.label = tpl.letter;
    traj.demo_id = tpl.letter + "_" + (test_split ? "test" : "train") + "_" +
                   two_digit(demo_index);
    traj.samples.resize(t, 2);
    for (int j = 0; j < t; ++j) {
      const double w = static_cast<double>(j) / (t - 1);
      const double eased = w * w * (3.0 - 2.0 * w);
      double q = eased + warp * std::sin(kPi * eased);
      q = std::clamp(q, 0.0, 1.0);
      traj.samples.row(j) = spline_at(pts, q).transpose();
    }

    const Eigen::RowVector2d delta =
        traj.samples.row(t - 1) - traj.samples.row(0);
    if (std::abs(delta[0]) >= cfg.min_goal_change &&
        std::abs(delta[1]) >= cfg.min_goal_change) {
      return traj;
    }
  }
  throw ModelError("letter '" + tpl.letter +
                   "' keeps producing degenerate strokes; check its template");
}

void write_dataset(const std::string& root,
                   const std::vector<LetterTemplate>& templates,
                   const DatasetConfig& cfg) {
  cfg.validate();
  if (templates.empty()) throw std::invalid_argument("no letter templates");

  std::error_code ec;
  for (size_t i = 0; i < templates.size(); ++i) {
    const LetterTemplate& tpl = templates[i];
    for (int split = 0; split < 2; ++split) {
      const bool test = split == 1;
      const fs::path dir = fs::path(root) / "letters" / tpl.letter /
                           (test ? "test" : "train");
      fs::create_directories(dir, ec);
      if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
      const int count = test ? cfg.n_test : cfg.n_train;
      for (int m = 0; m < count; ++m) {
        const Trajectory traj =
            generate_demo(tpl, cfg, static_cast<int>(i), test, m);
        const fs::path csv = dir / (traj.demo_id + ".csv");
        write_trajectory_csv(traj, csv.string());
        write_trajectory_sidecar(traj, csv.string(), cfg.seed,
                                 cfg.config_hash);
      }
    }
  }

  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["kind"] = "pdmp_dataset";
  manifest["seed"] = cfg.seed;
  manifest["config_hash"] = cfg.config_hash;
  manifest["n_train"] = cfg.n_train;
  manifest["n_test"] = cfg.n_test;
  manifest["dt"] = cfg.dt;
  manifest["n_steps"] = cfg.n_steps;
  std::vector<std::string> letters;
  for (const LetterTemplate& tpl : templates) letters.push_back(tpl.letter);
  manifest["letters"] = letters;
  const fs::path mpath = fs::path(root) / "manifest.json";
  std::ofstream out(mpath);
  if (!out) throw IoError("cannot open for writing: " + mpath.string());
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("failed writing manifest: " + mpath.string());
}

std::vector<Trajectory> load_demo_dir(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw IoError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Trajectory> out;
  out.reserve(files.size());
  for (const fs::path& f : files) out.push_back(read_trajectory_csv(f.string()));
  return out;
}

}  // namespace pdmp
