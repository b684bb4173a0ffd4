/**
 * @file config.hpp
 * @brief System parameters, unit conversion and JSON ingestion.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace rsma {

// 30 GHz maps to a 1 cm wavelength.
inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

/// Raised for any malformed or out-of-range configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemConfig {
  int n_antennas = 127;
  int n_users = 8;
  int n_devices = 8;
  double carrier_freq_hz = 30e9;
  double wavelength_m = 0.01;
  double antenna_spacing_m = 0.005;
  double max_power_w = 1.0;
  double noise_power_w = 1e-11;
  double min_rate_bps_hz = 0.8;
  double coverage_radius_m = 120.0;

  // Annealing schedule for the RS-user selection.
  double anneal_init = 20.0;
  double anneal_decay = 0.9;

  // Bisection tolerance, applied on the max-normalized gain matrix.
  double abs_tolerance = 1e-4;
  // Target duality gap of the inner barrier solve (bps/Hz).
  double inner_tol = 1e-9;
  // Outer stopping threshold of the alternating optimization (bps/Hz).
  double outer_tol = 1e-5;

  int max_iters_abs = 64;
  int max_iters_alt = 50;
  // 0 selects the default of 4 * n_users.
  int max_iters_anneal = 0;

  std::uint64_t seed = 1;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  [[nodiscard]] int anneal_steps() const {
    return max_iters_anneal > 0 ? max_iters_anneal : 4 * n_users;
  }
  [[nodiscard]] double aperture_m() const {
    return (n_antennas - 1) * antenna_spacing_m;
  }
};

/// Parameter set of the reference deployment (127-element ULA at 30 GHz).
SystemConfig reference_config();

double dbm_to_watt(double p_dbm);
double watt_to_dbm(double p_w);

/// Reads the flat JSON schema. Wavelength is always derived from the carrier.
SystemConfig config_from_json(const nlohmann::json& doc);
SystemConfig load_config(const std::string& path);
nlohmann::json config_to_json(const SystemConfig& cfg);

/// Stable 64-bit FNV-1a digest of the canonical JSON form, as 16 hex digits.
std::string config_digest(const SystemConfig& cfg);

}  // namespace rsma
