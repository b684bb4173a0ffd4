/**
 * @file rs_selector.hpp
 * @brief Simulated annealing over the binary RS-user selection.
 *
 * Step t proposes flipping bit (t mod K) of the current selection. Better
 * proposals are always taken; worse ones with probability exp(dR / delta),
 * and delta shrinks geometrically every step. Selections whose allocation
 * subproblem is infeasible score -inf.
 */
#pragma once

#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rsma/power_allocator.hpp"
#include "rsma/random.hpp"
#include "rsma/rate_engine.hpp"

namespace rsma {

class AllInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// exp(dR / delta) capped at 1.
double flip_probability(double delta_rate, double temperature);

struct AnnealSchedule {
  double initial_temperature = 20.0;
  double decay = 0.9;
  int max_steps = 32;

  static AnnealSchedule from_config(const SystemConfig& cfg) {
    return {cfg.anneal_init, cfg.anneal_decay, cfg.anneal_steps()};
  }
};

struct AnnealResult {
  RSSelection best;
  double best_rate = 0.0;
  std::vector<double> trace;           // best-so-far after each step
  std::vector<std::uint64_t> proposals;  // proposed selection masks, in order
  int steps = 0;
  int evaluations = 0;  // distinct selections scored
};

/// Sum rate of a selection; -inf marks an infeasible one.
using SelectionObjective = std::function<double(const RSSelection&)>;

/// Runs the chain from `initial` with memoized objective calls.
AnnealResult anneal(const RSSelection& initial, const SelectionObjective& objective, Rng& rng,
                    const AnnealSchedule& schedule);

struct SelectionOutcome {
  AnnealResult search;
  AllocationResult allocation;  // of the best selection
  /// Objective trace of every allocator run, in evaluation order.
  std::vector<std::pair<std::uint64_t, std::vector<double>>> inner_traces;
};

/// Anneals over selections for a fixed matching, starting from all ones, with
/// the quadratic-transform allocator as the objective. Throws AllInfeasible.
SelectionOutcome optimize_selection(const GainTable& gains, const BeamAssignment& assignment,
                                    const SystemConfig& cfg, Rng& rng);

}  // namespace rsma
