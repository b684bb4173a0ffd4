#include "rsma/rate_engine.hpp"

#include <algorithm>
#include <sstream>

namespace rsma {

int BeamAssignment::device_on(int beam) const {
  for (int m = 0; m < n_devices(); ++m) {
    if (beam_of[m] == beam) return m;
  }
  return kUnassigned;
}

bool BeamAssignment::is_injective(int n_beams) const {
  std::vector<bool> used(n_beams + 1, false);
  for (int b : beam_of) {
    if (b < 1 || b > n_beams || used[b]) return false;
    used[b] = true;
  }
  return true;
}

RSSelection RSSelection::from_mask(int n_users, std::uint64_t mask) {
  RSSelection sel = all(n_users, false);
  for (int u = 0; u < n_users; ++u) sel.s[u] = (mask >> u) & 1U;
  return sel;
}

bool RSSelection::any() const {
  return std::any_of(s.begin(), s.end(), [](std::uint8_t v) { return v != 0; });
}

std::uint64_t RSSelection::mask() const {
  std::uint64_t m = 0;
  for (int u = 0; u < n_users(); ++u) {
    if (s[u]) m |= std::uint64_t{1} << u;
  }
  return m;
}

Allocation Allocation::zeros(int n_users, int n_devices) {
  Allocation a;
  a.p_private = Eigen::VectorXd::Zero(n_users);
  a.p_device = Eigen::VectorXd::Zero(n_devices);
  a.r_common = Eigen::VectorXd::Zero(n_users);
  return a;
}

namespace {

// h_{u,u} P_{u,m} of the device sharing user u's beam.
double own_beam_device_interference(int u, const LinkState& st) {
  const int m = st.assignment.device_on(beam_of_user(u));
  return m == kUnassigned ? 0.0 : st.gains.user_own(u) * st.alloc.p_device(m);
}

}  // namespace

SinrTerms common_terms(int u, const LinkState& st) {
  const double own = st.gains.user_own(u);
  return {st.gains.user_common(u) * st.alloc.p_common,
          own * st.alloc.p_private(u) + own_beam_device_interference(u, st) + st.noise_power};
}

SinrTerms private_terms(int u, const LinkState& st) {
  const double leak = st.selection.in_rs_set(u) ? 0.0 : st.gains.user_common(u) * st.alloc.p_common;
  return {st.gains.user_own(u) * st.alloc.p_private(u),
          leak + own_beam_device_interference(u, st) + st.noise_power};
}

SinrTerms device_terms(int m, const LinkState& st) {
  if (!st.assignment.assigned(m)) {
    throw Unassigned("device " + std::to_string(m) + " has no beam");
  }
  const int k = st.assignment.beam_of[m];
  const int n_beams = st.gains.n_users();
  double interference = 0.0;
  for (int i = 0; i <= n_beams; ++i) {
    interference += st.gains.device(i, m) * st.alloc.stream_power(i);
  }
  for (int j = 0; j < st.assignment.n_devices(); ++j) {
    if (j == m || !st.assignment.assigned(j)) continue;
    interference += st.gains.device(st.assignment.beam_of[j], m) * st.alloc.p_device(j);
  }
  return {st.gains.device(k, m) * st.alloc.p_device(m), interference + st.noise_power};
}

double common_sinr(int u, const LinkState& st) { return common_terms(u, st).sinr(); }
double private_sinr(int u, const LinkState& st) { return private_terms(u, st).sinr(); }
double device_sinr(int m, const LinkState& st) { return device_terms(m, st).sinr(); }

RateReport evaluate(const GainTable& gains, const BeamAssignment& assignment,
                    const RSSelection& selection, const Allocation& alloc,
                    const SystemConfig& cfg) {
  const int k = gains.n_users();
  const int m = gains.n_devices();
  const LinkState st{gains, assignment, selection, alloc, cfg.noise_power_w};

  RateReport rep;
  rep.common_rates = Eigen::VectorXd::Zero(k);
  rep.private_rates.resize(k);
  rep.user_rates.resize(k);
  rep.device_rates = Eigen::VectorXd::Zero(m);
  for (int u = 0; u < k; ++u) {
    rep.private_rates(u) = rate_of(private_sinr(u, st));
    rep.user_rates(u) = rep.private_rates(u);
    if (selection.in_rs_set(u)) {
      rep.common_rates(u) = rate_of(common_sinr(u, st));
      rep.common_cap = std::min(rep.common_cap, rep.common_rates(u));
      rep.user_rates(u) += alloc.r_common(u);
    }
  }
  for (int d = 0; d < m; ++d) {
    if (assignment.assigned(d)) rep.device_rates(d) = rate_of(device_sinr(d, st));
  }
  rep.sum_device_rate = rep.device_rates.sum();
  rep.total_power = alloc.total_power();
  rep.r_common = alloc.r_common;
  rep.selection = selection;
  rep.assignment = assignment;
  rep.n_beams = k;
  return rep;
}

bool ConstraintCheck::passed() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const Residual& r) { return r.ok(); });
}

const Residual& ConstraintCheck::get(const std::string& name) const {
  for (const auto& r : residuals) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no residual named " + name);
}

std::string ConstraintCheck::describe() const {
  std::ostringstream os;
  for (const auto& r : residuals) {
    os << r.name << '=' << r.value << (r.ok() ? " ok" : " VIOLATED") << "; ";
  }
  return os.str();
}

ConstraintCheck verify_constraints(const RateReport& report, const SystemConfig& cfg) {
  const int k = static_cast<int>(report.user_rates.size());
  ConstraintCheck check;

  check.residuals.push_back(
      {"budget", report.total_power - cfg.max_power_w, kPowerTolerance * cfg.max_power_w});

  double rate_gap = 0.0;
  for (int u = 0; u < k; ++u) {
    rate_gap = std::max(rate_gap, cfg.min_rate_bps_hz - report.user_rates(u));
  }
  check.residuals.push_back({"min_rate", rate_gap, kRateTolerance});

  double split = 0.0;
  double negative = 0.0;
  for (int u = 0; u < k; ++u) {
    const double r = report.r_common(u);
    if (report.selection.in_rs_set(u)) {
      split += r;
      negative = std::max(negative, -r);
    } else {
      // Only RS users hold a common-rate share.
      negative = std::max(negative, std::abs(r));
    }
  }
  const double split_excess =
      std::isinf(report.common_cap) ? (report.selection.any() ? 0.0 : split) : split - report.common_cap;
  check.residuals.push_back({"common_split", std::max(0.0, split_excess), kRateTolerance});
  check.residuals.push_back({"common_nonneg", negative, kRateTolerance});

  double matching = report.assignment.is_injective(report.n_beams) ? 0.0 : 1.0;
  check.residuals.push_back({"matching", matching, 0.0});

  double binary = 0.0;
  for (auto v : report.selection.s) {
    if (v > 1) binary = 1.0;
  }
  check.residuals.push_back({"binary", binary, 0.0});
  return check;
}

}  // namespace rsma
