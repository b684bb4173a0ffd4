// Brute-force references used by the unit tests and the acceptance binary.
// Nothing here calls into the rate engine or the allocator.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "rsma/precoding.hpp"
#include "rsma/rate_engine.hpp"

namespace oracle {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log2p(double x) { return std::log2(1.0 + x); }

// Powers indexed by stream: 0 common, 1..K private; device powers separate.
struct Powers {
  std::vector<double> stream;
  std::vector<double> device;
};

struct Rates {
  std::vector<double> common;
  std::vector<double> priv;
  std::vector<double> device;
};

// Straight from the SINR definitions, summing every received stream.
inline void rates_into(const rsma::GainTable& g, const std::vector<int>& beam_of,
                       const std::vector<int>& s, const Powers& p, double noise, Rates& r) {
  const int k = g.n_users();
  const int m = g.n_devices();
  auto device_on = [&](int beam) {
    for (int d = 0; d < m; ++d) {
      if (beam_of[d] == beam) return d;
    }
    return -1;
  };
  r.common.assign(k, 0.0);
  r.priv.assign(k, 0.0);
  r.device.assign(m, 0.0);
  for (int u = 0; u < k; ++u) {
    const double h0 = g.user(u, 0);
    const double hu = g.user(u, u + 1);
    const int d = device_on(u + 1);
    const double dev = d < 0 ? 0.0 : hu * p.device[d];
    r.common[u] = log2p(h0 * p.stream[0] / (hu * p.stream[u + 1] + dev + noise));
    const double leak = s[u] ? 0.0 : h0 * p.stream[0];
    r.priv[u] = log2p(hu * p.stream[u + 1] / (leak + dev + noise));
  }
  for (int d = 0; d < m; ++d) {
    if (beam_of[d] < 0) continue;
    double den = noise;
    for (int i = 0; i <= k; ++i) den += g.device(i, d) * p.stream[i];
    for (int j = 0; j < m; ++j) {
      if (j != d && beam_of[j] >= 0) den += g.device(beam_of[j], d) * p.device[j];
    }
    r.device[d] = log2p(g.device(beam_of[d], d) * p.device[d] / den);
  }
}

inline Rates rates(const rsma::GainTable& g, const std::vector<int>& beam_of,
                   const std::vector<int>& s, const Powers& p, double noise) {
  Rates r;
  rates_into(g, beam_of, s, p, noise, r);
  return r;
}

// Sum device rate when some common-rate split meets every user's floor,
// -inf otherwise. The best split covers each RS user's private shortfall.
inline double feasible_sum_rate(const Rates& r, const std::vector<int>& s, double r_th) {
  double cap = std::numeric_limits<double>::infinity();
  double need = 0.0;
  for (std::size_t u = 0; u < s.size(); ++u) {
    if (s[u]) {
      cap = std::min(cap, r.common[u]);
      need += std::max(0.0, r_th - r.priv[u]);
    } else if (r.priv[u] < r_th) {
      return kNegInf;
    }
  }
  if (need > 0.0 && need > cap) return kNegInf;
  return std::accumulate(r.device.begin(), r.device.end(), 0.0);
}

// Best sum device rate over a uniform grid of `n` steps per axis on the full
// budget: the last assigned device takes whatever the streams leave. Handles
// at most one device.
inline double grid_optimum(const rsma::GainTable& g, const std::vector<int>& beam_of,
                           const std::vector<int>& s, double p_max, double noise, double r_th,
                           int n) {
  const int k = g.n_users();
  const bool common = std::any_of(s.begin(), s.end(), [](int v) { return v != 0; });
  const bool has_device = !beam_of.empty() && beam_of[0] >= 0;
  Powers p;
  p.stream.assign(k + 1, 0.0);
  p.device.assign(beam_of.size(), 0.0);
  Rates r;
  double best = kNegInf;
  std::function<void(int, int)> walk = [&](int stream, int left) {
    if (stream > k) {
      if (has_device) p.device[0] = p_max * left / n;
      rates_into(g, beam_of, s, p, noise, r);
      best = std::max(best, feasible_sum_rate(r, s, r_th));
      return;
    }
    if (stream == 0 && !common) {
      p.stream[0] = 0.0;
      walk(1, left);
      return;
    }
    for (int i = 0; i <= left; ++i) {
      p.stream[stream] = p_max * i / n;
      walk(stream + 1, left - i);
    }
  };
  walk(0, n);
  return best;
}

// Exhaustive max-min matching of M devices to K beams by permutation.
inline double bottleneck(const Eigen::MatrixXd& g) {
  const int k = static_cast<int>(g.rows());
  const int m = static_cast<int>(g.cols());
  std::vector<int> beams(k);
  std::iota(beams.begin(), beams.end(), 0);
  double best = kNegInf;
  do {
    double worst = std::numeric_limits<double>::infinity();
    for (int d = 0; d < m; ++d) worst = std::min(worst, g(beams[d], d));
    best = std::max(best, worst);
  } while (std::next_permutation(beams.begin(), beams.end()));
  return best;
}

// Maximizer of a unimodal function on [lo, hi] by nested uniform grids.
inline double zoom_argmax(const std::function<double(double)>& f, double lo, double hi,
                          int points = 1000, int levels = 8) {
  double best = lo;
  for (int level = 0; level < levels; ++level) {
    const double step = (hi - lo) / points;
    double best_val = kNegInf;
    for (int i = 0; i <= points; ++i) {
      const double x = lo + step * i;
      const double v = f(x);
      if (v > best_val) {
        best_val = v;
        best = x;
      }
    }
    lo = std::max(lo, best - 2.0 * step);
    hi = std::min(hi, best + 2.0 * step);
  }
  return best;
}

}  // namespace oracle
