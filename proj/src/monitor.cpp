#include "monitor.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "errors.hpp"

namespace pdmp {

double calibrated_threshold(double train_loglik_min, double multiplier) {
  if (!std::isfinite(train_loglik_min))
    throw std::invalid_argument("training loglik minimum must be finite");
  if (!(multiplier > 0.0))
    throw std::invalid_argument("threshold multiplier must be > 0");
  if (train_loglik_min < 0.0) {
    const double th = multiplier * train_loglik_min;
    if (th <= train_loglik_min) return th;
  }
  if (train_loglik_min == 0.0) return -1.0;
  return train_loglik_min - std::abs(train_loglik_min);
}

double calibrate_threshold(PrimitiveModel& model,
                           const std::vector<Eigen::MatrixXd>& demos,
                           const ExecutionOptions& opts) {
  if (demos.empty())
    throw std::invalid_argument("calibration needs at least one demo");
  double l_min = std::numeric_limits<double>::infinity();
  for (const Eigen::MatrixXd& demo : demos) {
    const ModelExecution ex = execute_and_monitor(model, demo, opts);
    if (std::isfinite(ex.min_step_loglik))
      l_min = std::min(l_min, ex.min_step_loglik);
  }
  if (!std::isfinite(l_min))
    throw ModelError("calibration produced no finite log-likelihoods");
  model.train_loglik_min = l_min;
  model.threshold = calibrated_threshold(l_min, model.threshold_multiplier);
  return model.threshold;
}

MonitorReport classify_execution(const PrimitiveModel& model,
                                 const Eigen::MatrixXd& obs,
                                 const ExecutionOptions& opts) {
  if (!std::isfinite(model.threshold) || !std::isfinite(model.train_loglik_min))
    throw ModelError("model has no calibrated threshold");

  const ModelExecution ex = execute_and_monitor(model, obs, opts);
  MonitorReport rep;
  rep.per_step_loglik = ex.smoothed_loglik;
  rep.raw_step_loglik = ex.step_loglik;
  rep.threshold = model.threshold;
  rep.total_loglik = ex.total_loglik;
  rep.min_loglik = ex.min_step_loglik;
  rep.truncated = ex.truncated;
  for (int j = 0; j < ex.smoothed_loglik.size(); ++j) {
    const double l = ex.smoothed_loglik[j];
    if (std::isfinite(l) && l < model.threshold) {
      rep.failed = true;
      rep.failure_step = j;
      break;
    }
  }
  return rep;
}

nlohmann::json report_to_json(const MonitorReport& report) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = "pdmp_report";
  j["verdict"] = report.failed ? "Failed" : "Nominal";
  if (report.failed)
    j["failure_step"] = report.failure_step;
  else
    j["failure_step"] = nullptr;
  j["threshold"] = report.threshold;
  j["min_loglik"] = report.min_loglik;
  j["total_loglik"] = report.total_loglik;
  j["truncated"] = report.truncated;
  j["n_steps"] = report.n_steps();
  std::vector<double> trace(report.per_step_loglik.data(),
                            report.per_step_loglik.data() + report.n_steps());
  std::vector<double> raw(report.raw_step_loglik.data(),
                          report.raw_step_loglik.data() +
                              report.raw_step_loglik.size());
  j["per_step_loglik"] = trace;   // NaN (no evidence) serializes as null
  j["raw_step_loglik"] = raw;
  return j;
}

void save_report_json(const MonitorReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << report_to_json(report).dump(2) << "\n";
  if (!out) throw IoError("failed writing report: " + path);
}

}  // namespace pdmp
