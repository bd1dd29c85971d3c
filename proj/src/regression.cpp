#include "regression.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace pdmp {
namespace {

struct SolveResult {
  Eigen::VectorXd mean_w;
  Eigen::MatrixXd cov_w;
};

SolveResult solve_posterior(const Eigen::MatrixXd& features,
                            const Eigen::VectorXd& targets,
                            double prior_precision, double noise_var) {
  const int n = static_cast<int>(features.cols());
  Eigen::MatrixXd precision =
      prior_precision * Eigen::MatrixXd::Identity(n, n) +
      (features.transpose() * features) / noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    // With lambda == 0 a rank-deficient design matrix has no unique
    // solution; a proper prior fixes that.
    throw FitError(
        "weight posterior is singular; use a positive prior precision or "
        "fewer basis functions");
  }
  SolveResult out;
  out.cov_w = llt.solve(Eigen::MatrixXd::Identity(n, n));
  out.mean_w = out.cov_w * (features.transpose() * targets) / noise_var;
  return out;
}

}  // namespace

ForcingPosterior fit_forcing_posterior(const Eigen::MatrixXd& features,
                                       const Eigen::VectorXd& targets,
                                       double prior_precision,
                                       NoiseVarMode mode, double noise_var) {
  if (features.rows() != targets.size())
    throw std::invalid_argument("features/targets row mismatch");
  if (features.rows() < 1) throw std::invalid_argument("empty regression");
  if (features.cols() < 1) throw std::invalid_argument("no basis functions");
  if (prior_precision < 0.0)
    throw std::invalid_argument("prior precision must be >= 0");
  if (noise_var <= 0.0) throw std::invalid_argument("noise_var must be > 0");
  if (!features.allFinite() || !targets.allFinite())
    throw std::invalid_argument("non-finite regression inputs");

  const double rows = static_cast<double>(features.rows());
  const int n = static_cast<int>(features.cols());

  ForcingPosterior post;
  post.prior_precision = prior_precision;
  post.noise_var = noise_var;

  if (mode == NoiseVarMode::Fixed) {
    SolveResult sr =
        solve_posterior(features, targets, prior_precision, noise_var);
    post.mean_w = std::move(sr.mean_w);
    post.cov_w = std::move(sr.cov_w);
    return post;
  }

  // Evidence maximization: alternate the posterior solve with the
  // effective-degrees-of-freedom noise update until sigma_n^2 settles.
  double sigma2 = noise_var;
  SolveResult sr;
  constexpr int kMaxIters = 100;
  constexpr double kTol = 1e-10;
  constexpr double kFloor = 1e-12;
  for (int it = 0; it < kMaxIters; ++it) {
    sr = solve_posterior(features, targets, prior_precision, sigma2);
    const double gamma =
        static_cast<double>(n) - prior_precision * sr.cov_w.trace();
    const double rss = (targets - features * sr.mean_w).squaredNorm();
    double denom = rows - gamma;
    if (denom < 1.0) denom = 1.0;
    double next = rss / denom;
    if (next < kFloor) next = kFloor;
    const double rel = std::abs(next - sigma2) / std::max(sigma2, kFloor);
    sigma2 = next;
    if (rel < kTol) break;
  }
  sr = solve_posterior(features, targets, prior_precision, sigma2);
  post.mean_w = std::move(sr.mean_w);
  post.cov_w = std::move(sr.cov_w);
  post.noise_var = sigma2;
  return post;
}

ForcingPrediction predictive_forcing(const ForcingPosterior& posterior,
                                     const DmpHyperParams& hp, double x) {
  if (posterior.mean_w.size() != hp.centers.size())
    throw std::invalid_argument("posterior/basis size mismatch");
  const Eigen::VectorXd phi = basis_features(x, hp);
  ForcingPrediction pred;
  pred.mean = phi.dot(posterior.mean_w);
  pred.var = phi.dot(posterior.cov_w * phi) + posterior.noise_var;
  if (pred.var < 0.0) pred.var = 0.0;
  return pred;
}

}  // namespace pdmp
