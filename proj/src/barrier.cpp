#include "rsma/barrier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsma::barrier {

bool strictly_feasible(const ConcaveProgram& prog, const Eigen::VectorXd& z) {
  Eigen::VectorXd c(prog.n_constraints());
  if (!prog.constraint_values(z, c)) return false;
  return (c.array() > 0.0).all();
}

namespace {

constexpr double kRoundoff = 1e-13;

// Newton direction for max phi: solve (-H) dz = g.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad) {
  Eigen::MatrixXd neg = -hess;
  const double scale = std::max(1.0, neg.diagonal().cwiseAbs().maxCoeff());
  for (double ridge = 0.0;; ridge = ridge == 0.0 ? 1e-14 * scale : ridge * 100.0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg + ridge * Eigen::MatrixXd::Identity(neg.rows(), neg.cols()));
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Eigen::VectorXd dz = ldlt.solve(grad);
      if (dz.allFinite()) return dz;
    }
    if (ridge > 1e6 * scale) return grad / scale;  // steepest ascent fallback
  }
}

}  // namespace

Result solve(const ConcaveProgram& prog, Eigen::VectorXd start, const Options& opts) {
  const int n = prog.dim();
  const int m = prog.n_constraints();
  const Eigen::VectorXd& c = prog.objective();

  Result res;
  res.z = std::move(start);
  Eigen::VectorXd values(m);
  if (!prog.constraint_values(res.z, values)) {
    throw std::invalid_argument("barrier start point lies outside the constraint domain");
  }
  for (int i = 0; i < m; ++i) {
    if (!(values(i) > 0.0)) {
      throw std::invalid_argument("barrier start point violates constraint " + std::to_string(i) +
                                  " (value " + std::to_string(values(i)) + ")");
    }
  }
  if (opts.stop_early && opts.stop_early(res.z)) {
    res.status = Status::kStoppedEarly;
    return res;
  }

  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd trial(n);
  Eigen::VectorXd trial_values(m);

  double t = opts.t_init;
  for (res.centerings = 0; res.centerings < opts.max_centerings; ++res.centerings) {
    bool centered = false;
    for (int it = 0; it < opts.max_newton_per_center; ++it) {
      grad = t * c;
      hess.setZero();
      prog.accumulate_barrier(res.z, values, grad, hess);
      const Eigen::VectorXd dz = newton_direction(hess, grad);
      const double decrement = grad.dot(dz);
      if (!(decrement > 2.0 * opts.newton_tol)) {
        centered = true;
        break;
      }

      // Backtracking on phi using log ratios to avoid cancellation at large t.
      double step = 1.0;
      bool moved = false;
      double gain = 0.0;
      while (step > 1e-14) {
        trial = res.z + step * dz;
        if (prog.constraint_values(trial, trial_values) && (trial_values.array() > 0.0).all()) {
          gain = t * step * c.dot(dz) + (trial_values.array() / values.array()).log().sum();
          if (gain >= opts.armijo * step * decrement) {
            moved = true;
            break;
          }
        }
        step *= opts.backtrack;
      }
      if (!moved) break;
      res.z = trial;
      values = trial_values;
      ++res.newton_steps;
      // Progress below the rounding level of phi ends the centering.
      if (gain <= kRoundoff * (1.0 + t * std::abs(c.dot(res.z)) + values.array().log().abs().sum())) {
        centered = true;
        break;
      }
      if (opts.stop_early && opts.stop_early(res.z)) {
        res.status = Status::kStoppedEarly;
        res.t = t;
        return res;
      }
    }
    res.t = t;
    if (m / t <= opts.gap_tol) {
      // The m/t gap bound only holds at a centered point.
      res.status = centered ? Status::kConverged : Status::kIterationLimit;
      ++res.centerings;
      return res;
    }
    t *= opts.t_growth;
  }
  return res;
}

}  // namespace rsma::barrier
