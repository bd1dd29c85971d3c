#include "model.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

#include "errors.hpp"

namespace pdmp {
namespace {

constexpr int kModelFormatVersion = 1;

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a, int expected = -1) {
  const auto values = a.get<std::vector<double>>();
  if (expected >= 0 && static_cast<int>(values.size()) != expected)
    throw std::invalid_argument("vector length mismatch in model data");
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<int>(values.size()));
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(m.size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json& a, int rows, int cols) {
  const auto flat = a.get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != rows * cols)
    throw std::invalid_argument("matrix size mismatch in model data");
  Eigen::MatrixXd m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = flat[static_cast<size_t>(k++)];
  return m;
}

}  // namespace

void PrimitiveModel::validate() const {
  hyper.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("model dt must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("model tau must be > 0");
  if (fit_steps < 2) throw std::invalid_argument("model fit_steps must be >= 2");
  if (dofs.empty()) throw std::invalid_argument("model has no DOFs");
  if (!(threshold_multiplier > 0.0))
    throw std::invalid_argument("threshold multiplier must be > 0");
  if (!init_cov.allFinite())
    throw std::invalid_argument("initial covariance must be finite");
  for (const DofModel& d : dofs) {
    if (d.posterior.n_basis() != hyper.n_basis())
      throw std::invalid_argument("DOF posterior size does not match basis");
    if (!(d.obs_noise_r > 0.0))
      throw std::invalid_argument("observation noise must be > 0");
    if (d.delta_g_fit == 0.0)
      throw std::invalid_argument("fit-time goal change must be nonzero");
    if (!d.posterior.mean_w.allFinite() || !d.posterior.cov_w.allFinite())
      throw std::invalid_argument("DOF posterior must be finite");
  }
}

TaskParams dof_task(const PrimitiveModel& model, int dof) {
  const DofModel& d = model.dofs.at(static_cast<size_t>(dof));
  return dof_task(model, dof, d.start, d.goal, model.tau);
}

TaskParams dof_task(const PrimitiveModel& model, int dof, double start,
                    double goal, double tau) {
  const DofModel& d = model.dofs.at(static_cast<size_t>(dof));
  TaskParams tp;
  tp.start = start;
  tp.goal = goal;
  tp.tau = tau;
  tp.dt = model.dt;
  tp.delta_g_fit = d.delta_g_fit;
  tp.validate();
  return tp;
}

Eigen::Matrix3d LdsSequence::q_at(int j) const {
  if (j < 1 || j >= n_steps()) return Eigen::Matrix3d::Zero();
  return process_noise_scaled(mats.b, q_scale,
                              q_var[static_cast<size_t>(j)]);
}

LdsSequence build_sequence(const PrimitiveModel& model, int dof,
                           const TaskParams& task, int n_steps) {
  if (dof < 0 || dof >= model.n_dofs())
    throw std::invalid_argument("DOF index out of range");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  task.validate();
  const DofModel& d = model.dofs[static_cast<size_t>(dof)];

  LdsSequence seq;
  seq.mats = build_matrices(model.hyper, task, model.mode);
  seq.init_mean = initial_state_mean(task);
  seq.init_cov = model.init_cov;
  seq.r = d.obs_noise_r;
  const double s = scaling_factor(task);
  const double tau2 = task.tau * task.tau;
  seq.q_scale = (s * tau2) * (s * tau2);

  const PhaseTrajectory phase = phase_trajectory(model.hyper, task, n_steps);
  seq.u.assign(static_cast<size_t>(n_steps), 0.0);
  seq.q_var.assign(static_cast<size_t>(n_steps), 0.0);
  for (int j = 1; j < n_steps; ++j) {
    const double x_prev = phase.values[j - 1];
    const ForcingPrediction pred =
        predictive_forcing(d.posterior, model.hyper, x_prev);
    seq.u[static_cast<size_t>(j)] = control_input(model.hyper, task, pred.mean);
    seq.q_var[static_cast<size_t>(j)] = pred.var;
  }
  return seq;
}

LdsSequence build_sequence(const PrimitiveModel& model, int dof, int n_steps) {
  return build_sequence(model, dof, dof_task(model, dof), n_steps);
}

nlohmann::json model_to_json(const PrimitiveModel& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "pdmp_model";
  j["label"] = model.label;
  j["seed"] = model.seed;
  j["config_hash"] = model.config_hash;
  j["discretization"] = to_string(model.mode);
  j["dt"] = model.dt;
  j["tau"] = model.tau;
  j["fit_steps"] = model.fit_steps;
  j["train_loglik_min"] = model.train_loglik_min;
  j["threshold"] = model.threshold;
  j["threshold_multiplier"] = model.threshold_multiplier;
  j["hyper"] = {{"alpha_z", model.hyper.alpha_z},
                {"beta_z", model.hyper.beta_z},
                {"alpha_x", model.hyper.alpha_x},
                {"centers", vec_to_json(model.hyper.centers)},
                {"widths", vec_to_json(model.hyper.widths)}};
  j["init_cov"] = mat_to_json(model.init_cov);
  nlohmann::json dofs = nlohmann::json::array();
  for (const DofModel& d : model.dofs) {
    nlohmann::json dj;
    dj["start"] = d.start;
    dj["goal"] = d.goal;
    dj["delta_g_fit"] = d.delta_g_fit;
    dj["obs_noise_r"] = d.obs_noise_r;
    dj["mean_w"] = vec_to_json(d.posterior.mean_w);
    dj["cov_w"] = mat_to_json(d.posterior.cov_w);
    dj["noise_var"] = d.posterior.noise_var;
    dj["prior_precision"] = d.posterior.prior_precision;
    dofs.push_back(std::move(dj));
  }
  j["dofs"] = std::move(dofs);
  return j;
}

PrimitiveModel model_from_json(const nlohmann::json& j) {
  if (j.value("kind", std::string()) != "pdmp_model")
    throw ModelError("not a model file (missing kind: pdmp_model)");
  const int version = j.value("format_version", 0);
  if (version != kModelFormatVersion)
    throw ModelError("unsupported model format_version " +
                     std::to_string(version));

  PrimitiveModel m;
  m.label = j.value("label", std::string());
  m.seed = j.value("seed", std::uint64_t{0});
  m.config_hash = j.value("config_hash", std::string());
  m.mode = discretization_mode_from_string(j.at("discretization"));
  m.dt = j.at("dt").get<double>();
  m.tau = j.at("tau").get<double>();
  m.fit_steps = j.at("fit_steps").get<int>();
  m.train_loglik_min = j.at("train_loglik_min").get<double>();
  m.threshold = j.at("threshold").get<double>();
  m.threshold_multiplier = j.at("threshold_multiplier").get<double>();

  const nlohmann::json& h = j.at("hyper");
  m.hyper.alpha_z = h.at("alpha_z").get<double>();
  m.hyper.beta_z = h.at("beta_z").get<double>();
  m.hyper.alpha_x = h.at("alpha_x").get<double>();
  m.hyper.centers = vec_from_json(h.at("centers"));
  m.hyper.widths = vec_from_json(h.at("widths"), m.hyper.n_basis());

  m.init_cov = mat_from_json(j.at("init_cov"), 3, 3);

  for (const nlohmann::json& dj : j.at("dofs")) {
    DofModel d;
    d.start = dj.at("start").get<double>();
    d.goal = dj.at("goal").get<double>();
    d.delta_g_fit = dj.at("delta_g_fit").get<double>();
    d.obs_noise_r = dj.at("obs_noise_r").get<double>();
    d.posterior.mean_w = vec_from_json(dj.at("mean_w"));
    d.posterior.cov_w = mat_from_json(dj.at("cov_w"), m.hyper.n_basis(),
                                      m.hyper.n_basis());
    d.posterior.noise_var = dj.at("noise_var").get<double>();
    d.posterior.prior_precision = dj.at("prior_precision").get<double>();
    m.dofs.push_back(std::move(d));
  }
  m.validate();
  return m;
}

void save_model_json(const PrimitiveModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << model_to_json(model).dump(2) << "\n";
  if (!out) throw IoError("failed writing model: " + path);
}

PrimitiveModel load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(path + ": " + e.what());
  }
}

}  // namespace pdmp
