/**
 * @file power_allocator.hpp
 * @brief Power and common-rate allocation for a fixed matching and RS set.
 *
 * Every SINR s(p)/I(p) is replaced by its quadratic-transform surrogate
 *   f(p, y) = 2 y sqrt(s(p)) - y^2 I(p),
 * which is concave in the powers and equals s/I at y* = sqrt(s)/I. The
 * allocator alternates the closed-form y* update with a convex solve over
 * the powers, the common-rate shares and explicit device-rate variables.
 */
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rsma/config.hpp"
#include "rsma/precoding.hpp"
#include "rsma/rate_engine.hpp"

namespace rsma {

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoProgress : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed data of one allocation subproblem. `gains` and `cfg` must outlive it.
struct AllocationProblem {
  const GainTable& gains;
  BeamAssignment assignment;
  RSSelection selection;
  const SystemConfig& cfg;

  [[nodiscard]] int n_users() const { return gains.n_users(); }
  [[nodiscard]] int n_devices() const { return gains.n_devices(); }
  /// P_0 is a decision variable only when some user decodes the common stream.
  [[nodiscard]] bool has_common() const { return selection.any(); }
};

/// Quadratic-transform auxiliaries, in 1/sqrt(W). Zero where unused.
struct AuxVariables {
  Eigen::VectorXd common;   // y_u, u in the RS set
  Eigen::VectorXd priv;     // y^_u
  Eigen::VectorXd device;   // y~_m, assigned devices
};

/// Surrogate values f(p, y) for each family; same layout as AuxVariables.
struct SurrogateValues {
  Eigen::VectorXd common;
  Eigen::VectorXd priv;
  Eigen::VectorXd device;
};

/// The quadratic-transform surrogate for one ratio.
inline double qt_surrogate(double y, double signal, double denominator) {
  return 2.0 * y * std::sqrt(signal) - y * y * denominator;
}
/// Its maximizer over y.
inline double qt_optimal_aux(double signal, double denominator) {
  return std::sqrt(signal) / denominator;
}

AuxVariables aux_update(const Allocation& alloc, const AllocationProblem& prob);
SurrogateValues surrogate_eval(const AuxVariables& aux, const Allocation& alloc,
                               const AllocationProblem& prob);

struct ConvexStepResult {
  Allocation allocation;
  Eigen::VectorXd device_rate_vars;  // R_m
  double surrogate_objective = 0.0;  // sum of R_m
  int newton_steps = 0;
};

/// Solves the concave subproblem for fixed auxiliaries. `start` seeds the
/// interior-point method; when it is not strictly feasible a feasibility
/// phase maximizing the smallest user-rate slack runs first, and Infeasible
/// is thrown if that slack cannot be made positive.
ConvexStepResult convex_step(const AuxVariables& aux, const AllocationProblem& prob,
                             const Allocation& start);

struct AllocationResult {
  Allocation allocation;
  Eigen::VectorXd device_rate_vars;
  std::vector<double> objective_trace;  // true sum device rate, initial point first
  bool converged = false;
  int iterations = 0;
  [[nodiscard]] double sum_rate() const {
    return objective_trace.empty() ? 0.0 : objective_trace.back();
  }
};

/// 70% of the budget spread over the user streams (common included when
/// used), 30% over assigned devices; common-rate shares sized to cover each
/// RS user's private shortfall.
Allocation initial_allocation(const AllocationProblem& prob);

/// Strictly feasible point reached by alternating tight auxiliaries with a
/// max-min-slack interior-point solve. Throws Infeasible.
Allocation feasibility_phase(const AllocationProblem& prob, const Allocation& start);

/// Alternates aux_update and convex_step until the objective changes by at
/// most cfg.outer_tol or cfg.max_iters_alt iterations have run.
AllocationResult alternating_opt(const Allocation& initial, const AllocationProblem& prob);

/// alternating_opt from initial_allocation.
AllocationResult allocate(const AllocationProblem& prob);

/// Sum of the true device rates.
double device_sum_rate(const Allocation& alloc, const AllocationProblem& prob);

}  // namespace rsma
