#include "em.hpp"

#include <cmath>
#include <stdexcept>

#include "kalman.hpp"

namespace pdmp {
namespace {

double first_finite(const Eigen::VectorXd& col, double fallback) {
  for (int j = 0; j < col.size(); ++j)
    if (std::isfinite(col[j])) return col[j];
  return fallback;
}

}  // namespace

EmResult em_fit_observation_noise(const PrimitiveModel& model,
                                  const std::vector<Eigen::MatrixXd>& demos,
                                  const EmOptions& opts) {
  if (demos.empty()) throw std::invalid_argument("EM needs at least one demo");
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(opts.r_init > 0.0)) throw std::invalid_argument("r_init must be > 0");
  const int d = model.n_dofs();
  const int t = static_cast<int>(demos.front().rows());
  for (const Eigen::MatrixXd& demo : demos) {
    if (static_cast<int>(demo.rows()) != t ||
        static_cast<int>(demo.cols()) != d)
      throw std::invalid_argument("demos must share shape (aligned T x D)");
  }

  // u and Q do not depend on r, so the sequences are built once per
  // (dof, demo) with the same task frame the monitor will use later:
  // start anchored at the first observed sample, goal from the model.
  std::vector<std::vector<LdsSequence>> seqs(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    seqs[static_cast<size_t>(k)].reserve(demos.size());
    const DofModel& dm = model.dofs[static_cast<size_t>(k)];
    for (const Eigen::MatrixXd& demo : demos) {
      const double start = first_finite(demo.col(k), dm.start);
      const TaskParams task = dof_task(model, k, start, dm.goal, model.tau);
      seqs[static_cast<size_t>(k)].push_back(
          build_sequence(model, k, task, t));
    }
  }

  EmResult res;
  res.r.assign(static_cast<size_t>(d), opts.r_init);
  double prev = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    double total_loglik = 0.0;
    std::vector<double> next_r(static_cast<size_t>(d), 0.0);
    for (int k = 0; k < d; ++k) {
      double acc = 0.0;
      long count = 0;
      for (size_t m = 0; m < demos.size(); ++m) {
        LdsSequence& seq = seqs[static_cast<size_t>(k)][m];
        seq.r = res.r[static_cast<size_t>(k)];
        const Eigen::VectorXd obs = demos[m].col(k);
        const FilterResult fr = run_filter(seq, obs);
        total_loglik += fr.total_loglik();
        const SmootherResult sm = rts_smooth(seq, fr);
        for (int j = 0; j < t; ++j) {
          const double o = obs[j];
          if (!std::isfinite(o)) continue;
          const auto ju = static_cast<size_t>(j);
          const double resid = o - sm.mean[ju][2];
          acc += resid * resid + sm.cov[ju](2, 2);
          ++count;
        }
      }
      if (count == 0)
        throw std::invalid_argument("a DOF has no finite observations");
      double r_new = acc / static_cast<double>(count);
      if (!std::isfinite(r_new)) {
        res.warnings.push_back("non-finite noise update floored");
        r_new = opts.r_floor;
      }
      next_r[static_cast<size_t>(k)] = std::max(r_new, opts.r_floor);
    }
    res.loglik_trace.push_back(total_loglik);
    res.r = next_r;
    res.iters = it + 1;
    if (it > 0 && std::abs(total_loglik - prev) < opts.tol) {
      res.converged = true;
      break;
    }
    prev = total_loglik;
  }
  return res;
}

}  // namespace pdmp
