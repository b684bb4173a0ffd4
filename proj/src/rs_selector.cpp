#include "rsma/rs_selector.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace rsma {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double flip_probability(double delta_rate, double temperature) {
  if (delta_rate >= 0.0) return 1.0;
  return std::exp(delta_rate / temperature);
}

AnnealResult anneal(const RSSelection& initial, const SelectionObjective& objective, Rng& rng,
                    const AnnealSchedule& schedule) {
  const int k = initial.n_users();
  std::unordered_map<std::uint64_t, double> memo;
  AnnealResult res;
  auto score = [&](const RSSelection& s) {
    const auto key = s.mask();
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const double v = objective(s);
    memo.emplace(key, v);
    ++res.evaluations;
    return v;
  };

  RSSelection current = initial;
  double current_rate = score(current);
  res.best = current;
  res.best_rate = current_rate;

  double temperature = schedule.initial_temperature;
  const double frozen = 1e-3 * schedule.initial_temperature;
  int unchanged = 0;
  for (int t = 0; t < schedule.max_steps; ++t) {
    RSSelection proposal = current;
    const int bit = t % k;
    proposal.s[bit] = proposal.s[bit] ? 0 : 1;
    res.proposals.push_back(proposal.mask());
    const double rate = score(proposal);

    bool accept = false;
    if (rate > current_rate) {
      accept = true;
    } else if (rate == kNegInf && current_rate == kNegInf) {
      accept = true;  // wander freely until a feasible selection turns up
    } else if (rate != kNegInf) {
      accept = uniform01(rng) < flip_probability(rate - current_rate, temperature);
    }
    if (accept) {
      current = std::move(proposal);
      current_rate = rate;
    }

    if (rate > res.best_rate) {
      res.best = accept ? current : RSSelection::from_mask(k, res.proposals.back());
      res.best_rate = rate;
      unchanged = 0;
    } else {
      ++unchanged;
    }
    res.trace.push_back(res.best_rate);
    temperature *= schedule.decay;
    res.steps = t + 1;
    if (unchanged >= k && temperature < frozen) break;
  }
  return res;
}

SelectionOutcome optimize_selection(const GainTable& gains, const BeamAssignment& assignment,
                                    const SystemConfig& cfg, Rng& rng) {
  const int k = gains.n_users();
  std::map<std::uint64_t, AllocationResult> solved;
  SelectionOutcome out;
  auto objective = [&](const RSSelection& s) {
    const AllocationProblem prob{gains, assignment, s, cfg};
    try {
      AllocationResult r = allocate(prob);
      const double rate = r.sum_rate();
      out.inner_traces.emplace_back(s.mask(), r.objective_trace);
      solved.emplace(s.mask(), std::move(r));
      return rate;
    } catch (const Infeasible&) {
      out.inner_traces.emplace_back(s.mask(), std::vector<double>{});
      return kNegInf;
    }
  };
  out.search = anneal(RSSelection::all(k, true), objective, rng, AnnealSchedule::from_config(cfg));
  if (out.search.best_rate == kNegInf) {
    throw AllInfeasible("no visited RS selection admits a feasible allocation");
  }
  out.allocation = std::move(solved.at(out.search.best.mask()));
  return out;
}

}  // namespace rsma
