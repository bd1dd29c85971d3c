#pragma once

#include <Eigen/Core>

#include "dmp.hpp"

namespace pdmp {

// Gaussian posterior over forcing weights for one DOF, plus the residual
// noise floor sigma_n^2 that every predictive variance includes.
struct ForcingPosterior {
  Eigen::VectorXd mean_w;
  Eigen::MatrixXd cov_w;
  double noise_var = 1.0;
  double prior_precision = 1e-6;

  int n_basis() const { return static_cast<int>(mean_w.size()); }
};

enum class NoiseVarMode { Fixed, Evidence };

// Ridge-regularized Bayesian linear regression over stacked
// (features, target) rows:
//   cov_w = (lambda I + Phi^T Phi / sigma_n^2)^{-1}
//   mean_w = cov_w Phi^T y / sigma_n^2
// Evidence mode re-estimates sigma_n^2 from the residuals until the
// posterior and the noise level agree.
ForcingPosterior fit_forcing_posterior(const Eigen::MatrixXd& features,
                                       const Eigen::VectorXd& targets,
                                       double prior_precision,
                                       NoiseVarMode mode,
                                       double noise_var = 1.0);

// Predictive forcing distribution at one phase value:
// mean = phi^T mean_w, var = phi^T cov_w phi + sigma_n^2.
struct ForcingPrediction {
  double mean = 0.0;
  double var = 0.0;
};

ForcingPrediction predictive_forcing(const ForcingPosterior& posterior,
                                     const DmpHyperParams& hp, double x);

}  // namespace pdmp
