#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "kalman.hpp"
#include "model.hpp"

#include <json.hpp>

namespace pdmp {

struct MonitorReport {
  Eigen::VectorXd per_step_loglik;  // the trace the verdict is taken from
  Eigen::VectorXd raw_step_loglik;  // before any moving-average smoothing
  double threshold = 0.0;
  bool failed = false;
  int failure_step = -1;  // first step below threshold, -1 when nominal
  double min_loglik = 0.0;
  double total_loglik = 0.0;
  bool truncated = false;

  int n_steps() const { return static_cast<int>(per_step_loglik.size()); }
};

// Threshold from the training minimum: multiplier * L_min for negative
// L_min (more permissive since logliks are negative); otherwise drop below
// the minimum by its own magnitude, or by 1 when it is exactly zero.
double calibrated_threshold(double train_loglik_min, double multiplier);

// Runs every training demo through the filter, records the worst per-step
// loglik, and stores both the statistic and the threshold on the model.
double calibrate_threshold(PrimitiveModel& model,
                           const std::vector<Eigen::MatrixXd>& demos,
                           const ExecutionOptions& opts = {});

MonitorReport classify_execution(const PrimitiveModel& model,
                                 const Eigen::MatrixXd& obs,
                                 const ExecutionOptions& opts = {});

nlohmann::json report_to_json(const MonitorReport& report);
void save_report_json(const MonitorReport& report, const std::string& path);

}  // namespace pdmp
