#include "rsma/beam_scheduler.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace rsma {

GainMatrix::GainMatrix(Eigen::MatrixXd raw) : raw_(std::move(raw)) {
  if (raw_.size() > 0) {
    if (!raw_.allFinite() || raw_.minCoeff() < 0.0) {
      throw std::invalid_argument("gain matrix must be finite and non-negative");
    }
    scale_ = raw_.maxCoeff();
  }
  normalized_ = scale_ > 0.0 ? Eigen::MatrixXd(raw_ / scale_) : raw_;
}

double bottleneck_value(const Eigen::MatrixXd& g, const BeamAssignment& a) {
  double v = std::numeric_limits<double>::infinity();
  for (int m = 0; m < a.n_devices(); ++m) v = std::min(v, g(a.beam_of[m] - 1, m));
  return v;
}

std::optional<BeamAssignment> greedy_threshold_matching(const Eigen::MatrixXd& normalized,
                                                        double threshold) {
  const auto n_beams = normalized.rows();
  const auto n_dev = normalized.cols();
  Eigen::MatrixXd w = (normalized.array() > threshold).select(normalized, 0.0);

  BeamAssignment out{std::vector<int>(n_dev, kUnassigned)};
  for (Eigen::Index matched = 0; matched < n_dev; ++matched) {
    // Highest-priority device: fewest feasible beams, then lowest index.
    Eigen::Index dev = -1;
    Eigen::Index dev_deg = 0;
    for (Eigen::Index m = 0; m < n_dev; ++m) {
      if (out.beam_of[m] != kUnassigned) continue;
      const auto deg = (w.col(m).array() > 0.0).count();
      if (deg == 0) return std::nullopt;
      if (dev < 0 || deg < dev_deg) {
        dev = m;
        dev_deg = deg;
      }
    }
    // Its highest-priority neighbour beam, by the same rule.
    Eigen::Index beam = -1;
    Eigen::Index beam_deg = 0;
    for (Eigen::Index k = 0; k < n_beams; ++k) {
      if (!(w(k, dev) > 0.0)) continue;
      const auto deg = (w.row(k).array() > 0.0).count();
      if (beam < 0 || deg < beam_deg) {
        beam = k;
        beam_deg = deg;
      }
    }
    out.beam_of[dev] = static_cast<int>(beam) + 1;
    w.row(beam).setZero();
    w.col(dev).setZero();
  }
  return out;
}

ScheduleResult abs_schedule(const GainMatrix& g, double tolerance, int max_iterations) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const Eigen::MatrixXd& gn = g.normalized();
  const int n_dev = g.n_devices();
  if (n_dev > g.n_beams()) throw std::invalid_argument("more devices than beams");

  ScheduleResult res;
  if (n_dev == 0) return res;
  for (int m = 0; m < n_dev; ++m) {
    if (!(gn.col(m).maxCoeff() > 0.0)) {
      throw InfeasibleMatrix("device " + std::to_string(m) + " has no usable beam");
    }
  }

  double lo = gn.minCoeff();
  double hi = gn.colwise().maxCoeff().minCoeff();
  std::optional<BeamAssignment> best;
  double best_value = 0.0;
  double last = std::numeric_limits<double>::quiet_NaN();

  while (res.iterations < max_iterations) {
    const double eps = 0.5 * (lo + hi);
    if (!std::isnan(last) && std::abs(eps - last) <= tolerance) break;
    last = eps;
    ++res.iterations;

    auto found = greedy_threshold_matching(gn, eps);
    if (!found) {
      hi = eps;
      continue;
    }
    const double floor_value = bottleneck_value(gn, *found);
    best = std::move(found);
    best_value = floor_value;

    int bottleneck_dev = 0;
    for (int m = 0; m < n_dev; ++m) {
      if (gn(best->beam_of[m] - 1, m) == floor_value) {
        bottleneck_dev = m;
        break;
      }
    }
    // Only its own beam reaches the floor: no matching can do better.
    if ((gn.col(bottleneck_dev).array() >= floor_value).count() == 1) {
      res.early_break = true;
      break;
    }
    lo = floor_value;
  }

  if (!best) {
    best = greedy_threshold_matching(gn, 0.0);
    if (!best) throw InfeasibleMatrix("no matching over the positive-gain support");
    best_value = bottleneck_value(gn, *best);
  }
  res.assignment = std::move(*best);
  res.bottleneck_normalized = best_value;
  res.bottleneck = best_value * g.scale();
  return res;
}

namespace {

struct OracleSearch {
  const Eigen::MatrixXd& gn;
  int n_beams;
  int n_dev;
  std::vector<int> current;
  std::vector<bool> used;
  std::vector<int> best;
  double best_value = -1.0;

  void visit(int m, double floor_value) {
    if (floor_value <= best_value) return;  // cannot be strictly better
    if (m == n_dev) {
      best = current;
      best_value = floor_value;
      return;
    }
    for (int k = 0; k < n_beams; ++k) {
      if (used[k]) continue;
      used[k] = true;
      current[m] = k + 1;
      visit(m + 1, std::min(floor_value, gn(k, m)));
      used[k] = false;
    }
    current[m] = kUnassigned;
  }
};

}  // namespace

ScheduleResult bottleneck_oracle(const GainMatrix& g) {
  const int n_dev = g.n_devices();
  if (n_dev > 9) throw TooLarge("exhaustive matching limited to 9 devices");
  if (n_dev > g.n_beams()) throw std::invalid_argument("more devices than beams");
  ScheduleResult res;
  if (n_dev == 0) return res;

  OracleSearch search{g.normalized(), g.n_beams(), n_dev, std::vector<int>(n_dev, kUnassigned),
                      std::vector<bool>(g.n_beams(), false), {}, -1.0};
  search.visit(0, std::numeric_limits<double>::infinity());
  res.assignment.beam_of = search.best;
  res.bottleneck_normalized = search.best_value;
  res.bottleneck = search.best_value * g.scale();
  return res;
}

BeamAssignment random_schedule(Rng& rng, int n_beams, int n_devices) {
  if (n_devices > n_beams) throw std::invalid_argument("more devices than beams");
  std::vector<int> beams(n_beams);
  for (int k = 0; k < n_beams; ++k) beams[k] = k + 1;
  for (int i = 0; i < n_devices; ++i) {
    const auto j = i + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_beams - i)));
    std::swap(beams[i], beams[j]);
  }
  beams.resize(n_devices);
  return BeamAssignment{std::move(beams)};
}

}  // namespace rsma
