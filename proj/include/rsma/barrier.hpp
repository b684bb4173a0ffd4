/**
 * @file barrier.hpp
 * @brief Log-barrier interior-point method for small dense concave programs.
 *
 * Solves  max c^T z  s.t.  C_i(z) > 0,  with every C_i concave and twice
 * differentiable on its domain, by damped Newton centering of
 *   phi_t(z) = t c^T z + sum_i log C_i(z)
 * along an increasing sequence of t. After centering at t the duality gap is
 * at most n_constraints / t.
 */
#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace rsma::barrier {

class ConcaveProgram {
 public:
  virtual ~ConcaveProgram() = default;

  [[nodiscard]] virtual int dim() const = 0;
  [[nodiscard]] virtual int n_constraints() const = 0;
  [[nodiscard]] virtual const Eigen::VectorXd& objective() const = 0;

  /// Fills C_i(z); returns false when z lies outside the domain of some C_i.
  virtual bool constraint_values(const Eigen::VectorXd& z, Eigen::VectorXd& values) const = 0;

  /// Adds sum_i grad C_i / C_i to `grad` and
  /// sum_i (hess C_i / C_i - grad C_i grad C_i^T / C_i^2) to `hess`.
  /// `values` holds C_i(z) from constraint_values.
  virtual void accumulate_barrier(const Eigen::VectorXd& z, const Eigen::VectorXd& values,
                                  Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const = 0;
};

struct Options {
  double t_init = 1.0;
  double t_growth = 20.0;
  double gap_tol = 1e-9;
  double newton_tol = 1e-10;  // on lambda^2 / 2
  int max_newton_per_center = 200;
  int max_centerings = 60;
  double armijo = 0.01;
  double backtrack = 0.5;
  /// Checked after every Newton step; returning true ends the solve.
  std::function<bool(const Eigen::VectorXd&)> stop_early;
};

enum class Status { kConverged, kStoppedEarly, kIterationLimit };

struct Result {
  Eigen::VectorXd z;
  Status status = Status::kIterationLimit;
  double t = 0.0;
  int newton_steps = 0;
  int centerings = 0;
};

/// True when every constraint is strictly positive at z.
bool strictly_feasible(const ConcaveProgram& prog, const Eigen::VectorXd& z);

/// Requires a strictly feasible start.
Result solve(const ConcaveProgram& prog, Eigen::VectorXd start, const Options& opts = {});

}  // namespace rsma::barrier
