#include "rsma/qt_program.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rsma::qt {

namespace {
constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
// Phase I keeps log2(1 + F) of every device above -kDeviceDomainFloor.
constexpr double kDeviceDomainFloor = 40.0;
}  // namespace

Layout::Layout(const AllocationProblem& prob, Phase phase) {
  const int k = prob.n_users();
  const int m = prob.n_devices();
  if (prob.has_common()) common = dim++;
  user.resize(k);
  for (int u = 0; u < k; ++u) user[u] = dim++;
  device.assign(m, -1);
  for (int d = 0; d < m; ++d) {
    if (prob.assignment.assigned(d)) device[d] = dim++;
  }
  share.assign(k, -1);
  for (int u = 0; u < k; ++u) {
    if (prob.selection.in_rs_set(u)) share[u] = dim++;
  }
  rate.assign(m, -1);
  if (phase == Phase::kOptimize) {
    for (int d = 0; d < m; ++d) {
      if (prob.assignment.assigned(d)) rate[d] = dim++;
    }
  } else {
    slack = dim++;
  }
  if (common >= 0) powers.push_back(common);
  powers.insert(powers.end(), user.begin(), user.end());
  for (int idx : device) {
    if (idx >= 0) powers.push_back(idx);
  }
}

Program::Program(const AllocationProblem& prob, const AuxVariables& aux, Phase phase)
    : layout_(prob, phase) {
  const auto& g = prob.gains;
  const auto& a = prob.assignment;
  const auto& sel = prob.selection;
  const int k = prob.n_users();
  const int m = prob.n_devices();
  const double pn = prob.cfg.max_power_w / prob.cfg.noise_power_w;
  const double sigma = std::sqrt(prob.cfg.noise_power_w);
  const double r_th = prob.cfg.min_rate_bps_hz;
  const Layout& lay = layout_;

  objective_ = Eigen::VectorXd::Zero(lay.dim);
  if (phase == Phase::kOptimize) {
    for (int idx : lay.rate) {
      if (idx >= 0) objective_(idx) = 1.0;
    }
  } else {
    objective_(lay.slack) = 1.0;
  }

  for (int idx : lay.powers) add({0.0, {{idx, 1.0}}, false, {}}, Family::kBound);
  {
    Constraint budget{1.0, {}, false, {}};
    for (int idx : lay.powers) budget.linear.emplace_back(idx, -1.0);
    add(std::move(budget), Family::kBound);
  }
  for (int idx : lay.share) {
    if (idx >= 0) add({0.0, {{idx, 1.0}}, false, {}}, Family::kBound);
  }

  auto own_device = [&](int u) { return a.device_on(beam_of_user(u)); };

  for (int u = 0; u < k; ++u) {
    Constraint c{-r_th, {}, false, {}};
    if (lay.share[u] >= 0) c.linear.emplace_back(lay.share[u], 1.0);
    if (lay.slack >= 0) c.linear.emplace_back(lay.slack, -1.0);
    c.has_log = true;
    c.log.signal = lay.user[u];
    c.log.gain = g.user_own(u) * pn;
    c.log.y = aux.priv(u) * sigma;
    if (lay.common >= 0 && !sel.in_rs_set(u)) {
      c.log.interference.emplace_back(lay.common, g.user_common(u) * pn);
    }
    if (const int d = own_device(u); d != kUnassigned) {
      c.log.interference.emplace_back(lay.device[d], g.user_own(u) * pn);
    }
    add(std::move(c), Family::kUserRate);
  }

  for (int u = 0; u < k; ++u) {
    if (!sel.in_rs_set(u)) continue;
    Constraint c{0.0, {}, false, {}};
    for (int idx : lay.share) {
      if (idx >= 0) c.linear.emplace_back(idx, -1.0);
    }
    if (lay.slack >= 0) c.linear.emplace_back(lay.slack, -1.0);
    c.has_log = true;
    c.log.signal = lay.common;
    c.log.gain = g.user_common(u) * pn;
    c.log.y = aux.common(u) * sigma;
    c.log.interference.emplace_back(lay.user[u], g.user_own(u) * pn);
    if (const int d = own_device(u); d != kUnassigned) {
      c.log.interference.emplace_back(lay.device[d], g.user_own(u) * pn);
    }
    add(std::move(c), Family::kCommonRate);
  }

  // Phase I has no rate variables; it only keeps each device term inside its
  // domain so that the point it returns can seed the optimization.
  for (int d = 0; d < m; ++d) {
    if (!a.assigned(d)) continue;
    Constraint c{0.0, {}, true, {}};
    if (phase == Phase::kOptimize) {
      c.linear.emplace_back(lay.rate[d], -1.0);
    } else {
      c.constant = kDeviceDomainFloor;
    }
    c.log.signal = lay.device[d];
    c.log.gain = g.device(a.beam_of[d], d) * pn;
    c.log.y = aux.device(d) * sigma;
    if (lay.common >= 0) c.log.interference.emplace_back(lay.common, g.device(0, d) * pn);
    for (int u = 0; u < k; ++u) {
      c.log.interference.emplace_back(lay.user[u], g.device(beam_of_user(u), d) * pn);
    }
    for (int j = 0; j < m; ++j) {
      if (j == d || !a.assigned(j)) continue;
      c.log.interference.emplace_back(lay.device[j], g.device(a.beam_of[j], d) * pn);
    }
    add(std::move(c), phase == Phase::kOptimize ? Family::kDeviceRate : Family::kDeviceDomain);
  }
}

double Program::f_value(const LogTerm& t, const Eigen::VectorXd& z) {
  const double zs = z(t.signal);
  if (!(zs > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double interference = 1.0;
  for (const auto& [idx, w] : t.interference) interference += w * z(idx);
  return 2.0 * t.y * std::sqrt(t.gain * zs) - t.y * t.y * interference;
}

double Program::log_term(const LogTerm& t, const Eigen::VectorXd& z) {
  const double f = f_value(t, z);
  if (!(f > -1.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log1p(f) * kInvLn2;
}

bool Program::constraint_values(const Eigen::VectorXd& z, Eigen::VectorXd& values) const {
  values.resize(n_constraints());
  for (int i = 0; i < n_constraints(); ++i) {
    const Constraint& c = constraints_[i];
    double v = c.constant;
    for (const auto& [idx, a] : c.linear) v += a * z(idx);
    if (c.has_log) {
      const double lt = log_term(c.log, z);
      if (std::isnan(lt)) return false;
      v += lt;
    }
    values(i) = v;
  }
  return true;
}

void Program::accumulate_barrier(const Eigen::VectorXd& z, const Eigen::VectorXd& values,
                                 Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
  Sparse g;
  for (int i = 0; i < n_constraints(); ++i) {
    const Constraint& c = constraints_[i];
    const double ci = values(i);
    g.assign(c.linear.begin(), c.linear.end());
    if (c.has_log) {
      const LogTerm& t = c.log;
      const double opf = 1.0 + f_value(t, z);
      const double zs = z(t.signal);
      const double scale = kInvLn2 / opf;
      const std::size_t first = g.size();
      // dF/dz_s = y sqrt(gain / z_s); d2F/dz_s2 = -y sqrt(gain) / (2 z_s^1.5)
      g.emplace_back(t.signal, t.y * std::sqrt(t.gain / zs));
      for (const auto& [idx, w] : t.interference) g.emplace_back(idx, -t.y * t.y * w);
      const double curvature = -0.5 * t.y * std::sqrt(t.gain) / (zs * std::sqrt(zs));
      hess(t.signal, t.signal) += scale * curvature / ci;
      // -(dF dF^T) / (ln2 (1+F)^2 C)
      const double outer = -kInvLn2 / (opf * opf * ci);
      for (std::size_t p = first; p < g.size(); ++p) {
        for (std::size_t q = first; q < g.size(); ++q) {
          hess(g[p].first, g[q].first) += outer * g[p].second * g[q].second;
        }
      }
      for (std::size_t p = first; p < g.size(); ++p) g[p].second *= scale;
    }
    const double inv = 1.0 / ci;
    for (const auto& [idx, v] : g) grad(idx) += v * inv;
    const double inv2 = inv * inv;
    for (const auto& [pi, pv] : g) {
      for (const auto& [qi, qv] : g) hess(pi, qi) -= pv * qv * inv2;
    }
  }
}

void Program::add(Constraint c, Family f) {
  families_[static_cast<int>(f)].push_back(static_cast<int>(constraints_.size()));
  constraints_.push_back(std::move(c));
}

Eigen::VectorXd pack(const Allocation& alloc, const Layout& lay, double p_max) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(lay.dim);
  if (lay.common >= 0) z(lay.common) = alloc.p_common / p_max;
  for (std::size_t u = 0; u < lay.user.size(); ++u) z(lay.user[u]) = alloc.p_private(u) / p_max;
  for (std::size_t d = 0; d < lay.device.size(); ++d) {
    if (lay.device[d] >= 0) z(lay.device[d]) = alloc.p_device(d) / p_max;
  }
  for (std::size_t u = 0; u < lay.share.size(); ++u) {
    if (lay.share[u] >= 0) z(lay.share[u]) = alloc.r_common(u);
  }
  return z;
}

Allocation unpack(const Eigen::VectorXd& z, const Layout& lay, double p_max) {
  Allocation a = Allocation::zeros(static_cast<int>(lay.user.size()),
                                   static_cast<int>(lay.device.size()));
  if (lay.common >= 0) a.p_common = z(lay.common) * p_max;
  for (std::size_t u = 0; u < lay.user.size(); ++u) a.p_private(u) = z(lay.user[u]) * p_max;
  for (std::size_t d = 0; d < lay.device.size(); ++d) {
    if (lay.device[d] >= 0) a.p_device(d) = z(lay.device[d]) * p_max;
  }
  for (std::size_t u = 0; u < lay.share.size(); ++u) {
    if (lay.share[u] >= 0) a.r_common(u) = z(lay.share[u]);
  }
  return a;
}

}  // namespace rsma::qt
