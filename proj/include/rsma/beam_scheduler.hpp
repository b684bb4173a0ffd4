/**
 * @file beam_scheduler.hpp
 * @brief Max-min device-to-beam matching.
 *
 * abs_schedule bisects on a gain threshold; each probe runs a greedy matching
 * that serves the lowest-degree device first and gives it its lowest-degree
 * feasible beam. A successful probe lifts the lower bracket to the matching's
 * actual minimum gain, and the search stops early once the bottleneck device
 * has no alternative beam at that level.
 */
#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "rsma/random.hpp"
#include "rsma/rate_engine.hpp"

namespace rsma {

class InfeasibleMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K x M beam-major gains (row k-1 is private beam k) and a copy scaled so
/// the largest entry is 1.
class GainMatrix {
 public:
  explicit GainMatrix(Eigen::MatrixXd raw);

  [[nodiscard]] const Eigen::MatrixXd& raw() const { return raw_; }
  [[nodiscard]] const Eigen::MatrixXd& normalized() const { return normalized_; }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] int n_beams() const { return static_cast<int>(raw_.rows()); }
  [[nodiscard]] int n_devices() const { return static_cast<int>(raw_.cols()); }

 private:
  Eigen::MatrixXd raw_;
  Eigen::MatrixXd normalized_;
  double scale_ = 1.0;
};

struct ScheduleResult {
  BeamAssignment assignment;
  double bottleneck = 0.0;             // raw scale
  double bottleneck_normalized = 0.0;  // on the max-normalized copy
  int iterations = 0;                  // threshold probes
  bool early_break = false;
};

/// Greedy probe at one threshold: entries <= threshold are infeasible.
/// Returns the full matching or an empty optional when some device is left
/// without a feasible beam.
std::optional<BeamAssignment> greedy_threshold_matching(const Eigen::MatrixXd& normalized,
                                                        double threshold);

ScheduleResult abs_schedule(const GainMatrix& g, double tolerance, int max_iterations = 64);

/// Exhaustive max-min matching; lexicographically smallest on ties. M <= 9.
ScheduleResult bottleneck_oracle(const GainMatrix& g);

/// Uniform injective map of n_devices onto beams 1..n_beams.
BeamAssignment random_schedule(Rng& rng, int n_beams, int n_devices);

/// min over devices of the assigned normalized gain.
double bottleneck_value(const Eigen::MatrixXd& g, const BeamAssignment& a);

}  // namespace rsma
