#include "rsma/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace rsma {

namespace {

template <typename T>
T required(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw ConfigError(std::string("missing required key '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T optional(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n_antennas",      "n_users",        "n_devices",     "carrier_freq_hz",
      "antenna_spacing_m", "p_max_dbm",    "noise_dbm",     "r_th_bps_hz",
      "coverage_radius_m", "anneal_init",  "anneal_decay",  "abs_tolerance",
      "inner_tol",       "outer_tol",      "max_iters_abs", "max_iters_alt",
      "max_iters_anneal", "seed"};
  return keys;
}

}  // namespace

double dbm_to_watt(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

double watt_to_dbm(double p_w) { return 10.0 * std::log10(p_w) + 30.0; }

SystemConfig reference_config() {
  SystemConfig cfg;
  cfg.n_antennas = 127;
  cfg.n_users = 8;
  cfg.n_devices = 8;
  cfg.carrier_freq_hz = 30e9;
  cfg.wavelength_m = kSpeedOfLight / cfg.carrier_freq_hz;
  cfg.antenna_spacing_m = cfg.wavelength_m / 2.0;
  cfg.max_power_w = dbm_to_watt(30.0);
  cfg.noise_power_w = dbm_to_watt(-80.0);
  cfg.min_rate_bps_hz = 0.8;
  cfg.coverage_radius_m = 120.0;
  cfg.anneal_init = 20.0;
  cfg.anneal_decay = 0.9;
  return cfg;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (n_antennas <= 0 || n_antennas % 2 == 0) fail("n_antennas must be an odd positive integer");
  if (n_users <= 0) fail("n_users must be positive");
  if (n_devices < 0) fail("n_devices must be non-negative");
  if (n_devices > n_users) fail("n_devices must not exceed n_users");
  if (n_users > n_antennas) fail("n_users must not exceed n_antennas");
  for (auto [name, v] : {std::pair{"carrier_freq_hz", carrier_freq_hz},
                         std::pair{"wavelength_m", wavelength_m},
                         std::pair{"antenna_spacing_m", antenna_spacing_m},
                         std::pair{"max_power_w", max_power_w},
                         std::pair{"noise_power_w", noise_power_w},
                         std::pair{"coverage_radius_m", coverage_radius_m},
                         std::pair{"abs_tolerance", abs_tolerance},
                         std::pair{"inner_tol", inner_tol},
                         std::pair{"outer_tol", outer_tol}}) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be positive");
  }
  if (!(min_rate_bps_hz >= 0.0) || !std::isfinite(min_rate_bps_hz)) {
    fail("r_th_bps_hz must be non-negative");
  }
  if (std::abs(wavelength_m * carrier_freq_hz - kSpeedOfLight) > 1e-6 * kSpeedOfLight) {
    fail("wavelength and carrier frequency disagree");
  }
  if (!(anneal_init > 0.0)) fail("anneal_init must be positive");
  if (!(anneal_decay > 0.0 && anneal_decay < 1.0)) fail("anneal_decay must lie in (0, 1)");
  if (max_iters_abs <= 0 || max_iters_alt <= 0 || max_iters_anneal < 0) {
    fail("iteration caps must be positive");
  }
}

SystemConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  SystemConfig cfg;
  cfg.n_antennas = required<int>(doc, "n_antennas");
  cfg.n_users = required<int>(doc, "n_users");
  cfg.n_devices = required<int>(doc, "n_devices");
  cfg.carrier_freq_hz = required<double>(doc, "carrier_freq_hz");
  cfg.wavelength_m = kSpeedOfLight / cfg.carrier_freq_hz;
  cfg.antenna_spacing_m = required<double>(doc, "antenna_spacing_m");
  cfg.max_power_w = dbm_to_watt(required<double>(doc, "p_max_dbm"));
  cfg.noise_power_w = dbm_to_watt(required<double>(doc, "noise_dbm"));
  cfg.min_rate_bps_hz = required<double>(doc, "r_th_bps_hz");
  cfg.coverage_radius_m = required<double>(doc, "coverage_radius_m");

  const SystemConfig defaults;
  cfg.anneal_init = optional(doc, "anneal_init", defaults.anneal_init);
  cfg.anneal_decay = optional(doc, "anneal_decay", defaults.anneal_decay);
  cfg.abs_tolerance = optional(doc, "abs_tolerance", defaults.abs_tolerance);
  cfg.inner_tol = optional(doc, "inner_tol", defaults.inner_tol);
  cfg.outer_tol = optional(doc, "outer_tol", defaults.outer_tol);
  cfg.max_iters_abs = optional(doc, "max_iters_abs", defaults.max_iters_abs);
  cfg.max_iters_alt = optional(doc, "max_iters_alt", defaults.max_iters_alt);
  cfg.max_iters_anneal = optional(doc, "max_iters_anneal", defaults.max_iters_anneal);
  cfg.seed = optional<std::uint64_t>(doc, "seed", defaults.seed);
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json config_to_json(const SystemConfig& cfg) {
  return nlohmann::json{
      {"n_antennas", cfg.n_antennas},
      {"n_users", cfg.n_users},
      {"n_devices", cfg.n_devices},
      {"carrier_freq_hz", cfg.carrier_freq_hz},
      {"antenna_spacing_m", cfg.antenna_spacing_m},
      {"p_max_dbm", watt_to_dbm(cfg.max_power_w)},
      {"noise_dbm", watt_to_dbm(cfg.noise_power_w)},
      {"r_th_bps_hz", cfg.min_rate_bps_hz},
      {"coverage_radius_m", cfg.coverage_radius_m},
      {"anneal_init", cfg.anneal_init},
      {"anneal_decay", cfg.anneal_decay},
      {"abs_tolerance", cfg.abs_tolerance},
      {"inner_tol", cfg.inner_tol},
      {"outer_tol", cfg.outer_tol},
      {"max_iters_abs", cfg.max_iters_abs},
      {"max_iters_alt", cfg.max_iters_alt},
      {"max_iters_anneal", cfg.max_iters_anneal},
      {"seed", cfg.seed},
  };
}

std::string config_digest(const SystemConfig& cfg) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rsma
