#include "rsma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rsma/beam_scheduler.hpp"
#include "rsma/power_allocator.hpp"
#include "rsma/random.hpp"
#include "rsma/rs_selector.hpp"

namespace rsma {

namespace {

constexpr int kMaxRedraws = 16;
// Child stream of the trial seed that drives matching and annealing draws.
constexpr std::uint64_t kAlgorithmStream = 0x5eed;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

BeamAssignment empty_assignment() { return BeamAssignment{{}}; }

BeamAssignment trial_matching(const SystemConfig& cfg, const GainTable& gains, Scheme scheme,
                              Rng& rng) {
  if (cfg.n_devices == 0) return empty_assignment();
  if (scheme == Scheme::kFrsRandom) return random_schedule(rng, cfg.n_users, cfg.n_devices);
  const GainMatrix g(private_device_gains(gains));
  return abs_schedule(g, cfg.abs_tolerance, cfg.max_iters_abs).assignment;
}

int outer_iterations(const std::vector<std::pair<std::uint64_t, std::vector<double>>>& traces) {
  int n = 0;
  for (const auto& [mask, trace] : traces) {
    if (!trace.empty()) n += static_cast<int>(trace.size()) - 1;
  }
  return n;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kFrsAbs:
      return "FRS-ABS";
    case Scheme::kRsAbs:
      return "RS-ABS";
    case Scheme::kSdmaAbs:
      return "SDMA-ABS";
    case Scheme::kFrsRandom:
      return "FRS-Random";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected FRS-ABS, RS-ABS, SDMA-ABS or FRS-Random)");
}

TrialScenario draw_trial_scenario(const SystemConfig& cfg, std::uint64_t seed) {
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, attempt);
    Scenario sc = sample_scenario(cfg, s);
    try {
      PrecoderSet pre = build_precoders(sc.user_channels);
      GainTable gains = gain_tables(sc, pre);
      return {std::move(sc), std::move(pre), std::move(gains), attempt};
    } catch (const RankDeficient&) {
      continue;
    }
  }
  throw RankDeficient("user channels stayed rank deficient after " +
                      std::to_string(kMaxRedraws) + " redraws");
}

TrialRecord run_trial(const SystemConfig& cfg, std::uint64_t seed, Scheme scheme) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.scheme = std::string(scheme_name(scheme));
  rec.seed = seed;
  rec.config_digest = config_digest(cfg);

  const TrialScenario ts = draw_trial_scenario(cfg, seed);
  rec.scenario_redraws = ts.redraws;
  Rng rng(derive_seed(seed, kAlgorithmStream));

  try {
    const BeamAssignment assignment = trial_matching(cfg, ts.gains, scheme, rng);
    RSSelection selection;
    AllocationResult result;
    switch (scheme) {
      case Scheme::kFrsAbs:
      case Scheme::kFrsRandom: {
        SelectionOutcome out = optimize_selection(ts.gains, assignment, cfg, rng);
        selection = out.search.best;
        rec.iterations = outer_iterations(out.inner_traces);
        result = std::move(out.allocation);
        break;
      }
      case Scheme::kRsAbs:
      case Scheme::kSdmaAbs: {
        selection = RSSelection::all(cfg.n_users, scheme == Scheme::kRsAbs);
        result = allocate(AllocationProblem{ts.gains, assignment, selection, cfg});
        rec.iterations = result.iterations;
        break;
      }
    }
    rec.report = evaluate(ts.gains, assignment, selection, result.allocation, cfg);
    rec.feasible = true;
    rec.sum_device_rate = rec.report.sum_device_rate;
    rec.user_rates.assign(rec.report.user_rates.begin(), rec.report.user_rates.end());
    rec.selection_mask = selection.mask();
    rec.matching = assignment.beam_of;
  } catch (const Infeasible& e) {
    rec.note = e.what();
  } catch (const AllInfeasible& e) {
    rec.note = e.what();
  } catch (const InfeasibleMatrix& e) {
    rec.note = e.what();
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "r_th") return SweepAxis::kMinRate;
  if (name == "n_users") return SweepAxis::kUsers;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) +
                              "' (expected r_th or n_users)");
}

std::string_view axis_name(SweepAxis axis) {
  return axis == SweepAxis::kMinRate ? "r_th" : "n_users";
}

SystemConfig config_at(const SystemConfig& base, SweepAxis axis, double value) {
  SystemConfig cfg = base;
  if (axis == SweepAxis::kMinRate) {
    cfg.min_rate_bps_hz = value;
  } else {
    if (value != std::floor(value)) throw ConfigError("n_users sweep values must be integers");
    cfg.n_users = static_cast<int>(value);
    cfg.n_devices = std::min(base.n_devices, cfg.n_users);
  }
  cfg.validate();
  return cfg;
}

SweepPoint summarize(const std::vector<TrialRecord>& records) {
  SweepPoint p;
  p.n_trials = static_cast<int>(records.size());
  if (!records.empty()) {
    p.scheme = records.front().scheme;
    p.axis_value = records.front().axis_value;
  }
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (!r.feasible) {
      ++p.n_infeasible;
      continue;
    }
    sum += r.sum_device_rate;
    ++n;
  }
  if (n == 0) {
    p.mean = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  p.mean = sum / n;
  if (n > 1) {
    double ss = 0.0;
    for (const auto& r : records) {
      if (r.feasible) ss += (r.sum_device_rate - p.mean) * (r.sum_device_rate - p.mean);
    }
    p.std_error = std::sqrt(ss / (n - 1) / n);
  }
  return p;
}

SweepResult sweep(const SystemConfig& base, SweepAxis axis, const std::vector<double>& values,
                  const SweepOptions& opts) {
  if (opts.n_trials < 0) throw std::invalid_argument("n_trials must be nonnegative");
  struct Job {
    SystemConfig cfg;
    double value;
    Scheme scheme;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : values) {
    const SystemConfig cfg = config_at(base, axis, v);
    for (Scheme s : opts.schemes) {
      for (int i = 0; i < opts.n_trials; ++i) {
        jobs.push_back({cfg, v, s, opts.base_seed + static_cast<std::uint64_t>(i)});
      }
    }
  }

  SweepResult out;
  out.trials.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        out.trials[j] = run_trial(jobs[j].cfg, jobs[j].seed, jobs[j].scheme);
        out.trials[j].axis_value = jobs[j].value;
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  int n_threads = opts.n_threads > 0 ? opts.n_threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, std::max<int>(1, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  auto it = out.trials.begin();
  for (double v : values) {
    for (Scheme s : opts.schemes) {
      std::vector<TrialRecord> block(it, it + opts.n_trials);
      it += opts.n_trials;
      SweepPoint p = summarize(block);
      p.axis_value = v;
      p.scheme = std::string(scheme_name(s));
      out.points.push_back(std::move(p));
    }
  }
  return out;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records,
                      bool with_timing) {
  os << "scheme,seed,axis_value,sum_rate_bps_hz,feasible,iters,wall_time_s\n";
  for (const auto& r : records) {
    os << r.scheme << ',' << r.seed << ','
       << (std::isnan(r.axis_value) ? std::string() : fmt("%.10g", r.axis_value)) << ','
       << fmt("%.9f", r.sum_device_rate) << ',' << (r.feasible ? 1 : 0) << ',' << r.iterations
       << ',' << (with_timing ? fmt("%.6f", r.wall_time_s) : std::string("0")) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << "axis_value,scheme,n_trials,n_infeasible,mean_sum_rate_bps_hz,std_error\n";
  for (const auto& p : points) {
    os << fmt("%.10g", p.axis_value) << ',' << p.scheme << ',' << p.n_trials << ','
       << p.n_infeasible << ',' << fmt("%.9f", p.mean) << ',' << fmt("%.9f", p.std_error)
       << '\n';
  }
}

ConvergenceTrace convergence_trace(const SystemConfig& cfg, std::uint64_t seed) {
  const TrialScenario ts = draw_trial_scenario(cfg, seed);
  Rng rng(derive_seed(seed, kAlgorithmStream));
  const BeamAssignment assignment = trial_matching(cfg, ts.gains, Scheme::kFrsAbs, rng);
  SelectionOutcome out = optimize_selection(ts.gains, assignment, cfg, rng);
  ConvergenceTrace trace;
  trace.anneal_best = out.search.trace;
  for (auto& [mask, objective] : out.inner_traces) {
    trace.inner.push_back({mask, std::move(objective)});
  }
  trace.final_rate = out.search.best_rate;
  return trace;
}

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace) {
  os << "series,run,selection_mask,iteration,sum_rate_bps_hz\n";
  for (std::size_t i = 0; i < trace.anneal_best.size(); ++i) {
    os << "anneal,0,," << i + 1 << ',' << fmt("%.9f", trace.anneal_best[i]) << '\n';
  }
  for (std::size_t r = 0; r < trace.inner.size(); ++r) {
    const auto& in = trace.inner[r];
    for (std::size_t i = 0; i < in.objective.size(); ++i) {
      os << "inner," << r + 1 << ',' << in.selection_mask << ',' << i << ','
         << fmt("%.9f", in.objective[i]) << '\n';
    }
  }
}

ZfCheck zf_check(const PrecoderSet& precoders, const std::vector<ChannelVector>& user_channels) {
  ZfCheck out;
  const int k = precoders.n_users();
  for (int i = 0; i < k; ++i) {
    const double hn = user_channels[i].norm();
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double leak = std::abs(user_channels[i].dot(precoders.priv.col(j))) / hn;
      out.max_leakage = std::max(out.max_leakage, leak);
    }
  }
  for (int b = 0; b <= k; ++b) {
    out.max_norm_error = std::max(out.max_norm_error, std::abs(precoders.beam(b).norm() - 1.0));
  }
  return out;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

void note(ValidationReport& rep, const std::string& name, bool ok, double worst,
          const std::string& detail = {}) {
  auto it = std::find_if(rep.checks.begin(), rep.checks.end(),
                         [&](const CheckResult& c) { return c.name == name; });
  if (it == rep.checks.end()) {
    rep.checks.push_back({name, true, 0.0, 0, {}});
    it = rep.checks.end() - 1;
  }
  ++it->runs;
  it->worst = std::max(it->worst, worst);
  if (!ok && it->passed) {
    it->passed = false;
    it->detail = detail;
  }
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Worst relative gap between every surrogate at tight auxiliaries and its SINR.
double tightness_gap(const AllocationProblem& prob, const Allocation& alloc) {
  const AuxVariables aux = aux_update(alloc, prob);
  const SurrogateValues f = surrogate_eval(aux, alloc, prob);
  const LinkState st{prob.gains, prob.assignment, prob.selection, alloc, prob.cfg.noise_power_w};
  double worst = 0.0;
  for (int u = 0; u < prob.n_users(); ++u) {
    worst = std::max(worst, rel_err(f.priv(u), private_sinr(u, st)));
    if (prob.selection.in_rs_set(u)) worst = std::max(worst, rel_err(f.common(u), common_sinr(u, st)));
  }
  for (int m = 0; m < prob.n_devices(); ++m) {
    if (prob.assignment.assigned(m)) worst = std::max(worst, rel_err(f.device(m), device_sinr(m, st)));
  }
  return worst;
}

// Largest increase of any surrogate when its auxiliary moves off y*.
double aux_perturbation_gain(const AllocationProblem& prob, const Allocation& alloc) {
  const AuxVariables aux = aux_update(alloc, prob);
  const SurrogateValues best = surrogate_eval(aux, alloc, prob);
  double worst = 0.0;
  for (double factor : {0.9, 0.99, 1.01, 1.1}) {
    AuxVariables moved = aux;
    moved.common *= factor;
    moved.priv *= factor;
    moved.device *= factor;
    const SurrogateValues f = surrogate_eval(moved, alloc, prob);
    const auto rise = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      return a.size() == 0 ? 0.0 : ((a - b).array() / b.array().abs().max(1e-300)).maxCoeff();
    };
    worst = std::max({worst, rise(f.priv, best.priv), rise(f.device, best.device)});
  }
  return std::max(worst, 0.0);
}

// Rising own power must raise the SINR; rising interference must lower it.
bool sinr_monotone(const AllocationProblem& prob, const Allocation& alloc) {
  const double noise = prob.cfg.noise_power_w;
  for (int u = 0; u < prob.n_users(); ++u) {
    Allocation up = alloc;
    up.p_private(u) *= 2.0;
    const LinkState a{prob.gains, prob.assignment, prob.selection, alloc, noise};
    const LinkState b{prob.gains, prob.assignment, prob.selection, up, noise};
    if (!(private_sinr(u, b) > private_sinr(u, a))) return false;
  }
  for (int m = 0; m < prob.n_devices(); ++m) {
    if (!prob.assignment.assigned(m)) continue;
    Allocation up = alloc;
    up.p_device(m) *= 2.0;
    const LinkState a{prob.gains, prob.assignment, prob.selection, alloc, noise};
    const LinkState b{prob.gains, prob.assignment, prob.selection, up, noise};
    if (!(device_sinr(m, b) > device_sinr(m, a))) return false;
    const int owner = user_of_beam(prob.assignment.beam_of[m]);
    if (!(private_sinr(owner, b) < private_sinr(owner, a))) return false;
  }
  return true;
}

}  // namespace

void validate_scenario(const SystemConfig& cfg, const Scenario& scenario,
                       const PrecoderSet& precoders, std::uint64_t seed,
                       ValidationReport& report) {
  const std::string where = "seed " + std::to_string(seed);
  ++report.n_scenarios;

  const ZfCheck zf = zf_check(precoders, scenario.user_channels);
  note(report, "zf_leakage", zf.max_leakage < 1e-9, zf.max_leakage,
       where + ": leakage " + fmt("%.3e", zf.max_leakage));
  note(report, "beam_norm", zf.max_norm_error < 1e-9, zf.max_norm_error,
       where + ": norm error " + fmt("%.3e", zf.max_norm_error));

  double norm_err = 0.0;
  const double sqrt_n = std::sqrt(static_cast<double>(cfg.n_antennas));
  for (std::size_t k = 0; k < scenario.user_channels.size(); ++k) {
    const double beta = path_loss(scenario.user_locations[k].distance_m, cfg);
    norm_err = std::max(norm_err, rel_err(scenario.user_channels[k].norm(), beta * sqrt_n));
  }
  for (std::size_t m = 0; m < scenario.device_channels.size(); ++m) {
    const double beta = path_loss(scenario.device_locations[m].distance_m, cfg);
    norm_err = std::max(norm_err, rel_err(scenario.device_channels[m].norm(), beta * sqrt_n));
  }
  note(report, "channel_norm", norm_err < 1e-12, norm_err,
       where + ": relative norm error " + fmt("%.3e", norm_err));

  const GainTable gains = gain_tables(scenario, precoders);
  BeamAssignment assignment = empty_assignment();
  if (cfg.n_devices > 0) {
    const GainMatrix g(private_device_gains(gains));
    const ScheduleResult abs = abs_schedule(g, cfg.abs_tolerance, cfg.max_iters_abs);
    assignment = abs.assignment;
    note(report, "matching_injective", assignment.is_injective(cfg.n_users), 0.0, where);
    if (cfg.n_devices <= 9 && cfg.n_users <= 9) {
      const ScheduleResult oracle = bottleneck_oracle(g);
      const double shortfall = oracle.bottleneck_normalized - abs.bottleneck_normalized;
      note(report, "bottleneck_oracle", shortfall <= 1e-3, std::max(shortfall, 0.0),
           where + ": below the exhaustive bottleneck by " + fmt("%.3e", shortfall));
    }
  }

  for (bool all_rs : {true, false}) {
    const AllocationProblem prob{gains, assignment, RSSelection::all(cfg.n_users, all_rs), cfg};
    const Allocation init = initial_allocation(prob);
    const double gap = tightness_gap(prob, init);
    note(report, "surrogate_tightness", gap < 1e-10, gap,
         where + ": surrogate differs from SINR by " + fmt("%.3e", gap));
    const double rise = aux_perturbation_gain(prob, init);
    note(report, "aux_optimality", rise <= 1e-12, rise,
         where + ": moving an auxiliary off y* raised a surrogate by " + fmt("%.3e", rise));
    note(report, "sinr_monotone", sinr_monotone(prob, init), 0.0, where);
  }

  const AllocationProblem rs{gains, assignment, RSSelection::all(cfg.n_users, true), cfg};
  try {
    const AllocationResult res = allocate(rs);
    double drop = 0.0;
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
      drop = std::max(drop, res.objective_trace[i - 1] - res.objective_trace[i]);
    }
    note(report, "trace_monotone", drop <= 1e-8, drop,
         where + ": objective fell by " + fmt("%.3e", drop));
    const ConstraintCheck cc =
        verify_constraints(evaluate(gains, assignment, rs.selection, res.allocation, cfg), cfg);
    note(report, "allocation_constraints", cc.passed(), 0.0, where + ": " + cc.describe());
  } catch (const Infeasible& e) {
    report.warnings.push_back(where + ": all-RS allocation infeasible (" + e.what() + ")");
  }
}

ValidationReport validate_suite(const SystemConfig& cfg, int n) {
  ValidationReport report;
  if (n <= 0) {
    report.warnings.emplace_back("no scenarios requested; nothing was checked");
    return report;
  }
  for (int i = 0; i < n; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    const TrialScenario ts = draw_trial_scenario(cfg, seed);
    validate_scenario(cfg, ts.scenario, ts.precoders, seed, report);
  }
  return report;
}

void write_validation_report(std::ostream& os, const ValidationReport& report) {
  for (const auto& c : report.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " runs=" << c.runs
       << " worst=" << fmt("%.3e", c.worst);
    if (!c.passed) os << " (" << c.detail << ")";
    os << '\n';
  }
  for (const auto& w : report.warnings) os << "WARN " << w << '\n';
  os << (report.passed() ? "validation passed" : "validation FAILED") << " on "
     << report.n_scenarios << " scenario(s)\n";
}

}  // namespace rsma
