#include "rsma/power_allocator.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "rsma/barrier.hpp"
#include "rsma/qt_program.hpp"

namespace rsma {

namespace {

using qt::Constraint;
using qt::Family;
using qt::Layout;
using qt::Phase;
using qt::pack;
using qt::unpack;
using QtProgram = qt::Program;

// Shortfall tolerated on the true objective before an outer step is rejected
// as a solver failure rather than barrier-gap noise.
constexpr double kNoProgressSlack = 1e-6;
// Phase-I stops once every user-rate constraint has this much slack.
constexpr double kFeasibilityMargin = 1e-3;
// Starting points are earlier iterates, already close to the central path's end.
constexpr double kInitialBarrierWeight = 1e3;
// Interior points keep at least this fraction of P_max unspent.
constexpr double kBudgetMargin = 1e-6;

// Device-rate variables sit 1/t below their surrogate bound.
void seed_rate_vars(const QtProgram& prog, Eigen::VectorXd& z, double t) {
  for (int i : prog.family(Family::kDeviceRate)) {
    const Constraint& c = prog.constraint(i);
    z(c.linear.front().first) = QtProgram::log_term(c.log, z) - 1.0 / t;
  }
}

double min_over(const Eigen::VectorXd& values, const std::vector<int>& idx) {
  double v = std::numeric_limits<double>::infinity();
  for (int i : idx) v = std::min(v, values(i));
  return v;
}

barrier::Options barrier_options(const SystemConfig& cfg) {
  barrier::Options opts;
  opts.t_init = kInitialBarrierWeight;
  opts.gap_tol = cfg.inner_tol;
  return opts;
}

// Smallest slack over the user-rate and common-rate constraints, and whether
// the bound constraints hold strictly.
struct SlackReport {
  bool bounds_ok = false;
  double rate_slack = -std::numeric_limits<double>::infinity();
};

SlackReport slack_of(const QtProgram& prog, const Eigen::VectorXd& z) {
  SlackReport rep;
  Eigen::VectorXd v;
  if (!prog.constraint_values(z, v)) return rep;
  rep.bounds_ok = min_over(v, prog.family(Family::kBound)) > 0.0;
  rep.rate_slack = std::min(min_over(v, prog.family(Family::kUserRate)),
                            min_over(v, prog.family(Family::kCommonRate)));
  return rep;
}

// One max-min-slack solve at fixed auxiliaries. Returns the best point found
// and its rate slack.
std::pair<Eigen::VectorXd, double> maximize_slack(const AllocationProblem& prob,
                                                  const AuxVariables& aux,
                                                  const Allocation& start) {
  QtProgram prog(prob, aux, Phase::kFeasibility);
  const Layout& lay = prog.layout();
  Eigen::VectorXd z = pack(start, lay, prob.cfg.max_power_w);
  z(lay.slack) = 0.0;
  Eigen::VectorXd v;
  if (!prog.constraint_values(z, v)) throw Infeasible("feasibility start outside the domain");
  const SlackReport rep = slack_of(prog, z);
  z(lay.slack) = rep.rate_slack - 1.0;

  barrier::Options opts = barrier_options(prob.cfg);
  const int slack_idx = lay.slack;
  opts.stop_early = [slack_idx](const Eigen::VectorXd& x) {
    return x(slack_idx) >= kFeasibilityMargin;
  };
  const barrier::Result res = barrier::solve(prog, z, opts);
  Eigen::VectorXd out = res.z;
  out(slack_idx) = 0.0;
  const double slack = slack_of(prog, out).rate_slack;
  return {std::move(out), slack};
}

// Interior starting point for any allocation: strictly positive powers
// within budget and positive shares.
Allocation sanitized(const Allocation& in, const AllocationProblem& prob) {
  Allocation a = in;
  bool bad_power = !(a.p_private.array() > 0.0).all();
  if (prob.has_common() && !(a.p_common > 0.0)) bad_power = true;
  for (int d = 0; d < prob.n_devices(); ++d) {
    if (prob.assignment.assigned(d) && !(a.p_device(d) > 0.0)) bad_power = true;
  }
  if (bad_power) {
    const Allocation init = initial_allocation(prob);
    a.p_common = init.p_common;
    a.p_private = init.p_private;
    a.p_device = init.p_device;
  }
  if (!prob.has_common()) a.p_common = 0.0;
  for (int u = 0; u < prob.n_users(); ++u) {
    if (!prob.selection.in_rs_set(u)) {
      a.r_common(u) = 0.0;
    } else if (!(a.r_common(u) > 0.0)) {
      a.r_common(u) = 1e-3;
    }
  }
  for (int d = 0; d < prob.n_devices(); ++d) {
    if (!prob.assignment.assigned(d)) a.p_device(d) = 0.0;
  }
  if (const double total = a.total_power(); !(total < prob.cfg.max_power_w)) {
    const double shrink = (1.0 - kBudgetMargin) * prob.cfg.max_power_w / total;
    a.p_common *= shrink;
    a.p_private *= shrink;
    a.p_device *= shrink;
  }
  return a;
}

bool strictly_feasible_at_tight_aux(const Allocation& alloc, const AllocationProblem& prob) {
  const AuxVariables aux = aux_update(alloc, prob);
  QtProgram prog(prob, aux, Phase::kOptimize);
  Eigen::VectorXd z = pack(alloc, prog.layout(), prob.cfg.max_power_w);
  Eigen::VectorXd v;
  if (!prog.constraint_values(z, v)) return false;
  const SlackReport rep = slack_of(prog, z);
  return rep.bounds_ok && rep.rate_slack > 0.0;
}

// Longest multiple of the last outer step tried by extrapolated().
constexpr double kMaxExtrapolation = 64.0;

Allocation moved(const Allocation& from, const Allocation& to, double alpha) {
  Allocation a = to;
  a.p_common += alpha * (to.p_common - from.p_common);
  a.p_private += alpha * (to.p_private - from.p_private);
  a.p_device += alpha * (to.p_device - from.p_device);
  a.r_common += alpha * (to.r_common - from.r_common);
  return a;
}

bool interior(const Allocation& a, const AllocationProblem& prob) {
  if ((a.p_private.array() <= 0.0).any() || (a.r_common.array() < 0.0).any()) return false;
  if (prob.has_common() && !(a.p_common > 0.0)) return false;
  for (int d = 0; d < prob.n_devices(); ++d) {
    if (prob.assignment.assigned(d) && !(a.p_device(d) > 0.0)) return false;
  }
  return a.total_power() < prob.cfg.max_power_w;
}

// Pushes `next` further along the direction of the last outer step while the
// true objective keeps rising and the point stays strictly feasible.
Allocation extrapolated(const Allocation& prev, Allocation next, double& objective,
                        const AllocationProblem& prob) {
  for (double alpha = 1.0; alpha <= kMaxExtrapolation; alpha *= 2.0) {
    Allocation cand = moved(prev, next, alpha);
    if (!interior(cand, prob) || !strictly_feasible_at_tight_aux(cand, prob)) break;
    const double value = device_sum_rate(cand, prob);
    if (!(value > objective)) break;
    objective = value;
    next = std::move(cand);
  }
  return next;
}

}  // namespace

AuxVariables aux_update(const Allocation& alloc, const AllocationProblem& prob) {
  const int k = prob.n_users();
  const int m = prob.n_devices();
  const LinkState st{prob.gains, prob.assignment, prob.selection, alloc, prob.cfg.noise_power_w};
  AuxVariables aux{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(m)};
  for (int u = 0; u < k; ++u) {
    const SinrTerms p = private_terms(u, st);
    aux.priv(u) = qt_optimal_aux(p.signal, p.denominator);
    if (prob.selection.in_rs_set(u)) {
      const SinrTerms c = common_terms(u, st);
      aux.common(u) = qt_optimal_aux(c.signal, c.denominator);
    }
  }
  for (int d = 0; d < m; ++d) {
    if (!prob.assignment.assigned(d)) continue;
    const SinrTerms t = device_terms(d, st);
    aux.device(d) = qt_optimal_aux(t.signal, t.denominator);
  }
  return aux;
}

SurrogateValues surrogate_eval(const AuxVariables& aux, const Allocation& alloc,
                               const AllocationProblem& prob) {
  const int k = prob.n_users();
  const int m = prob.n_devices();
  const LinkState st{prob.gains, prob.assignment, prob.selection, alloc, prob.cfg.noise_power_w};
  SurrogateValues out{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(m)};
  for (int u = 0; u < k; ++u) {
    const SinrTerms p = private_terms(u, st);
    out.priv(u) = qt_surrogate(aux.priv(u), p.signal, p.denominator);
    if (prob.selection.in_rs_set(u)) {
      const SinrTerms c = common_terms(u, st);
      out.common(u) = qt_surrogate(aux.common(u), c.signal, c.denominator);
    }
  }
  for (int d = 0; d < m; ++d) {
    if (!prob.assignment.assigned(d)) continue;
    const SinrTerms t = device_terms(d, st);
    out.device(d) = qt_surrogate(aux.device(d), t.signal, t.denominator);
  }
  return out;
}

double device_sum_rate(const Allocation& alloc, const AllocationProblem& prob) {
  return evaluate(prob.gains, prob.assignment, prob.selection, alloc, prob.cfg).sum_device_rate;
}

Allocation initial_allocation(const AllocationProblem& prob) {
  const int k = prob.n_users();
  const int m = prob.n_devices();
  const double p_max = prob.cfg.max_power_w;
  Allocation a = Allocation::zeros(k, m);

  int n_assigned = 0;
  for (int d = 0; d < m; ++d) n_assigned += prob.assignment.assigned(d) ? 1 : 0;
  const int n_streams = k + (prob.has_common() ? 1 : 0);
  const double per_stream = 0.7 * p_max / n_streams;
  a.p_private.setConstant(per_stream);
  if (prob.has_common()) a.p_common = per_stream;
  if (n_assigned > 0) {
    const double per_device = 0.3 * p_max / n_assigned;
    for (int d = 0; d < m; ++d) {
      if (prob.assignment.assigned(d)) a.p_device(d) = per_device;
    }
  }

  if (prob.has_common()) {
    const RateReport rep = evaluate(prob.gains, prob.assignment, prob.selection, a, prob.cfg);
    double need_total = 0.0;
    int n_rs = 0;
    for (int u = 0; u < k; ++u) {
      if (!prob.selection.in_rs_set(u)) continue;
      need_total += std::max(0.0, prob.cfg.min_rate_bps_hz - rep.private_rates(u));
      ++n_rs;
    }
    const double spare = rep.common_cap - need_total;
    const double extra = spare > 0.0 ? spare / (2.0 * n_rs) : 0.0;
    for (int u = 0; u < k; ++u) {
      if (!prob.selection.in_rs_set(u)) continue;
      const double need = std::max(0.0, prob.cfg.min_rate_bps_hz - rep.private_rates(u));
      a.r_common(u) = spare > 0.0 ? need + extra : std::max(need, 1e-3);
    }
  }
  return a;
}

Allocation feasibility_phase(const AllocationProblem& prob, const Allocation& start) {
  Allocation current = sanitized(start, prob);
  double last_slack = -std::numeric_limits<double>::infinity();
  for (int round = 0; round < prob.cfg.max_iters_alt; ++round) {
    const AuxVariables aux = aux_update(current, prob);
    auto [z, slack] = maximize_slack(prob, aux, current);
    const Layout lay(prob, Phase::kFeasibility);
    current = unpack(z, lay, prob.cfg.max_power_w);
    if (slack > 0.0 && strictly_feasible_at_tight_aux(current, prob)) return current;
    if (slack <= last_slack + 1e-9) break;
    last_slack = slack;
  }
  throw Infeasible("user rate requirements cannot be met within the power budget");
}

ConvexStepResult convex_step(const AuxVariables& aux, const AllocationProblem& prob,
                             const Allocation& start) {
  QtProgram prog(prob, aux, Phase::kOptimize);
  const Layout& lay = prog.layout();
  const double p_max = prob.cfg.max_power_w;
  const barrier::Options opts = barrier_options(prob.cfg);

  Allocation seed = sanitized(start, prob);
  Eigen::VectorXd z = pack(seed, lay, p_max);
  const SlackReport rep = slack_of(prog, z);
  if (!rep.bounds_ok || !(rep.rate_slack > 0.0)) {
    auto [zf, slack] = maximize_slack(prob, aux, seed);
    if (!(slack > 0.0)) {
      throw Infeasible("surrogate user-rate constraints cannot be met within the power budget");
    }
    const Layout phase1(prob, Phase::kFeasibility);
    z = pack(unpack(zf, phase1, p_max), lay, p_max);
  }
  seed_rate_vars(prog, z, opts.t_init);

  const barrier::Result res = barrier::solve(prog, z, opts);
  ConvexStepResult out;
  out.allocation = unpack(res.z, lay, p_max);
  out.device_rate_vars = Eigen::VectorXd::Zero(prob.n_devices());
  for (int d = 0; d < prob.n_devices(); ++d) {
    if (lay.rate[d] >= 0) out.device_rate_vars(d) = res.z(lay.rate[d]);
  }
  out.surrogate_objective = out.device_rate_vars.sum();
  out.newton_steps = res.newton_steps;
  return out;
}

AllocationResult alternating_opt(const Allocation& initial, const AllocationProblem& prob) {
  AllocationResult result;
  Allocation current = sanitized(initial, prob);
  if (!strictly_feasible_at_tight_aux(current, prob)) current = feasibility_phase(prob, current);

  double objective = device_sum_rate(current, prob);
  result.objective_trace.push_back(objective);
  Eigen::VectorXd rate_vars =
      evaluate(prob.gains, prob.assignment, prob.selection, current, prob.cfg).device_rates;

  for (int it = 0; it < prob.cfg.max_iters_alt; ++it) {
    ++result.iterations;
    const AuxVariables aux = aux_update(current, prob);
    ConvexStepResult step = convex_step(aux, prob, current);
    const double next = device_sum_rate(step.allocation, prob);
    if (next < objective) {
      if (objective - next > kNoProgressSlack) {
        throw NoProgress("inner solve lowered the objective by " +
                         std::to_string(objective - next));
      }
      // The previous iterate is still optimal to within the barrier gap.
      result.objective_trace.push_back(objective);
      result.converged = true;
      break;
    }
    double reached = next;
    Allocation landed = extrapolated(current, std::move(step.allocation), reached, prob);
    rate_vars = reached > next ? evaluate(prob.gains, prob.assignment, prob.selection, landed,
                                          prob.cfg).device_rates
                               : std::move(step.device_rate_vars);
    const double change = reached - objective;
    current = std::move(landed);
    objective = reached;
    result.objective_trace.push_back(objective);
    if (change <= prob.cfg.outer_tol) {
      result.converged = true;
      break;
    }
  }
  result.allocation = std::move(current);
  result.device_rate_vars = std::move(rate_vars);
  return result;
}

AllocationResult allocate(const AllocationProblem& prob) {
  return alternating_opt(initial_allocation(prob), prob);
}

}  // namespace rsma
