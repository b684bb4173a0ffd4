/**
 * @file harness.hpp
 * @brief End-to-end trials, baseline schemes, Monte-Carlo sweeps and the
 * invariant battery behind the command-line tool.
 *
 * Schemes:
 *   FRS-ABS     bisection matching + annealed RS selection
 *   RS-ABS      bisection matching, every user decodes the common stream
 *   SDMA-ABS    bisection matching, no common stream (P_0 = 0)
 *   FRS-Random  uniformly random matching + annealed RS selection
 */
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rsma/config.hpp"
#include "rsma/precoding.hpp"
#include "rsma/rate_engine.hpp"
#include "rsma/scenario.hpp"

namespace rsma {

enum class Scheme { kFrsAbs, kRsAbs, kSdmaAbs, kFrsRandom };

inline constexpr std::array<Scheme, 4> kAllSchemes = {Scheme::kFrsAbs, Scheme::kRsAbs,
                                                      Scheme::kSdmaAbs, Scheme::kFrsRandom};

std::string_view scheme_name(Scheme s);
/// Throws std::invalid_argument on an unknown name.
Scheme parse_scheme(std::string_view name);

struct TrialRecord {
  std::string scheme;
  std::uint64_t seed = 0;
  std::string config_digest;
  double axis_value = std::numeric_limits<double>::quiet_NaN();  // set by sweeps
  double sum_device_rate = 0.0;
  std::vector<double> user_rates;
  std::uint64_t selection_mask = 0;
  std::vector<int> matching;  // beam of each device
  int iterations = 0;         // outer allocator iterations, summed over every run
  double wall_time_s = 0.0;
  bool feasible = false;
  std::string note;            // why an infeasible trial failed
  int scenario_redraws = 0;    // rank-deficient draws skipped
  RateReport report;           // of the returned allocation when feasible
};

/// Channel draw used by a trial. Rank-deficient user channels are redrawn
/// from derived seeds; `redraws` counts them.
struct TrialScenario {
  Scenario scenario;
  PrecoderSet precoders;
  GainTable gains;
  int redraws = 0;
};
TrialScenario draw_trial_scenario(const SystemConfig& cfg, std::uint64_t seed);

/// One end-to-end run. Infeasible instances come back flagged, not thrown.
TrialRecord run_trial(const SystemConfig& cfg, std::uint64_t seed, Scheme scheme);

enum class SweepAxis { kMinRate, kUsers };

/// Throws std::invalid_argument on anything but "r_th" or "n_users".
SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);

/// The configuration at one sweep point. Sweeping the user count caps the
/// device count at K, since each private beam carries at most one device.
SystemConfig config_at(const SystemConfig& base, SweepAxis axis, double value);

struct SweepPoint {
  double axis_value = 0.0;
  std::string scheme;
  int n_trials = 0;
  int n_infeasible = 0;
  double mean = 0.0;        // over feasible trials; NaN when there are none
  double std_error = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> trials;  // value-major, then scheme, then seed
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  int n_trials = 100;
  std::uint64_t base_seed = 1;  // trial i uses base_seed + i at every point
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  int n_threads = 0;  // 0 uses every hardware thread
};

SweepResult sweep(const SystemConfig& base, SweepAxis axis, const std::vector<double>& values,
                  const SweepOptions& opts);

/// Mean and standard error of the feasible records, in input order.
SweepPoint summarize(const std::vector<TrialRecord>& records);

/// Columns: scheme, seed, axis_value, sum_rate_bps_hz, feasible, iters,
/// wall_time_s. Wall time is written as 0 unless `with_timing`, so that
/// reruns are byte-identical.
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records,
                      bool with_timing = false);
void write_summary_csv(std::ostream& os, const std::vector<SweepPoint>& points);

struct ConvergenceTrace {
  std::vector<double> anneal_best;  // best-so-far sum rate after each annealing step
  struct Inner {
    std::uint64_t selection_mask = 0;
    std::vector<double> objective;  // empty when that selection was infeasible
  };
  std::vector<Inner> inner;  // every allocator run, in evaluation order
  double final_rate = 0.0;
};

/// FRS-ABS on the scenario of `seed`, keeping every trace. Throws
/// AllInfeasible when no visited selection admits an allocation.
ConvergenceTrace convergence_trace(const SystemConfig& cfg, std::uint64_t seed);

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace);

struct ZfCheck {
  double max_leakage = 0.0;     // max over i != k of |h_i^H p_k| / |h_i|
  double max_norm_error = 0.0;  // max over all beams of | |p| - 1 |
};
ZfCheck zf_check(const PrecoderSet& precoders, const std::vector<ChannelVector>& user_channels);

struct CheckResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // largest violation measure seen
  int runs = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  int n_scenarios = 0;
  std::vector<std::string> warnings;
  [[nodiscard]] bool passed() const;
};

/// Runs the invariant battery on one scenario with the given beams and
/// merges the outcome into `report`.
void validate_scenario(const SystemConfig& cfg, const Scenario& scenario,
                       const PrecoderSet& precoders, std::uint64_t seed,
                       ValidationReport& report);

/// The battery on n scenarios seeded cfg.seed + i. n = 0 passes with a warning.
ValidationReport validate_suite(const SystemConfig& cfg, int n);

void write_validation_report(std::ostream& os, const ValidationReport& report);

}  // namespace rsma
