// Command-line front end: single trials, parameter sweeps, convergence
// traces and the invariant battery.
//
// Exit codes: 0 success, 1 validation failure or runtime error, 2 bad
// configuration or usage.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsma/config.hpp"
#include "rsma/harness.hpp"
#include "rsma/rs_selector.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitBadConfig = 2;

struct Common {
  std::string config_path;
  std::string out_path;
};

rsma::SystemConfig load(const Common& c) {
  if (c.config_path.empty()) return rsma::reference_config();
  return rsma::load_config(c.config_path);
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw rsma::ConfigError("bad sweep value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw rsma::ConfigError("--values needs at least one number");
  return out;
}

// Name lookups fail as usage errors.
template <typename F>
auto parsed(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw rsma::ConfigError(e.what());
  }
}

void add_config_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON configuration (default: reference deployment)");
  cmd->add_option("--out", c.out_path, "output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible rate-splitting simulator for near-field devices on preconfigured beams"};
  app.require_subcommand(1);

  Common common;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string scheme = "FRS-ABS";
  bool timing = false;

  auto* run = app.add_subcommand("run", "one trial of one scheme, as a CSV row");
  add_config_options(run, common);
  run->add_option("--seed", seed, "scenario seed")->each([&](const std::string&) { seed_given = true; });
  run->add_option("--scheme", scheme, "FRS-ABS, RS-ABS, SDMA-ABS or FRS-Random");
  run->add_flag("--timing", timing, "write measured wall time instead of 0");

  std::string axis = "r_th";
  std::string values;
  int trials = 100;
  int threads = 0;
  std::string schemes_list;
  std::string summary_path;
  auto* sw = app.add_subcommand("sweep", "Monte-Carlo sweep over one parameter");
  add_config_options(sw, common);
  sw->add_option("--axis", axis, "r_th or n_users");
  sw->add_option("--values", values, "comma-separated axis values")->required();
  sw->add_option("--trials", trials, "trials per point and scheme")->check(CLI::NonNegativeNumber);
  sw->add_option("--seed", seed, "first trial seed (trial i uses seed + i)")
      ->each([&](const std::string&) { seed_given = true; });
  sw->add_option("--schemes", schemes_list, "comma-separated subset of schemes");
  sw->add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sw->add_option("--summary", summary_path, "also write per-point means to this file");
  sw->add_flag("--timing", timing, "write measured wall times instead of 0");

  auto* tr = app.add_subcommand("trace", "best-so-far and inner objective traces of one FRS-ABS run");
  add_config_options(tr, common);
  tr->add_option("--seed", seed, "scenario seed")->each([&](const std::string&) { seed_given = true; });

  int n_scenarios = 20;
  auto* val = app.add_subcommand("validate", "invariant battery on seeded scenarios");
  add_config_options(val, common);
  val->add_option("--n", n_scenarios, "number of scenarios")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  try {
    const rsma::SystemConfig cfg = load(common);
    if (!seed_given) seed = cfg.seed;
    Output out(common.out_path);

    if (*run) {
      const rsma::TrialRecord rec = rsma::run_trial(cfg, seed, parsed([&] { return rsma::parse_scheme(scheme); }));
      rsma::write_trials_csv(out.stream(), {rec}, timing);
      return 0;
    }
    if (*sw) {
      rsma::SweepOptions opts;
      opts.n_trials = trials;
      opts.base_seed = seed;
      opts.n_threads = threads;
      if (!schemes_list.empty()) {
        opts.schemes.clear();
        std::stringstream ss(schemes_list);
        std::string item;
        while (std::getline(ss, item, ',')) opts.schemes.push_back(parsed([&] { return rsma::parse_scheme(item); }));
      }
      const rsma::SweepAxis sweep_axis = parsed([&] { return rsma::parse_axis(axis); });
      const rsma::SweepResult res = rsma::sweep(cfg, sweep_axis, parse_values(values), opts);
      rsma::write_trials_csv(out.stream(), res.trials, timing);
      if (!summary_path.empty()) {
        Output summary(summary_path);
        rsma::write_summary_csv(summary.stream(), res.points);
      } else {
        rsma::write_summary_csv(std::cerr, res.points);
      }
      return 0;
    }
    if (*tr) {
      rsma::write_trace_csv(out.stream(), rsma::convergence_trace(cfg, seed));
      return 0;
    }
    if (*val) {
      const rsma::ValidationReport rep = rsma::validate_suite(cfg, n_scenarios);
      rsma::write_validation_report(out.stream(), rep);
      return rep.passed() ? 0 : kExitFailure;
    }
  } catch (const rsma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const rsma::AllInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
