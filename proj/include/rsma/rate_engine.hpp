/**
 * @file rate_engine.hpp
 * @brief SINRs, achievable rates and constraint residuals of the RSMA downlink.
 *
 * Users in the RS set decode the common stream first and cancel it before
 * decoding their private stream; the others treat it as noise. A device rides
 * one private beam, shares that beam's gain with the owning user, and treats
 * every other stream as noise. Rates are in bps/Hz (log base 2).
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsma/config.hpp"
#include "rsma/precoding.hpp"

namespace rsma {

inline constexpr int kUnassigned = -1;

class Unassigned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Device -> private beam (1..K) map; beam 0 never carries a device.
struct BeamAssignment {
  std::vector<int> beam_of;

  [[nodiscard]] int n_devices() const { return static_cast<int>(beam_of.size()); }
  [[nodiscard]] bool assigned(int m) const { return beam_of[m] != kUnassigned; }
  /// Device riding private beam `beam`, or kUnassigned.
  [[nodiscard]] int device_on(int beam) const;
  /// Every device on a distinct beam in 1..n_beams.
  [[nodiscard]] bool is_injective(int n_beams) const;
};

/// s_u = 1 puts user u in the RS set (decodes the common stream).
struct RSSelection {
  std::vector<std::uint8_t> s;

  static RSSelection all(int n_users, bool value) {
    return {std::vector<std::uint8_t>(n_users, value ? 1 : 0)};
  }
  static RSSelection from_mask(int n_users, std::uint64_t mask);

  [[nodiscard]] int n_users() const { return static_cast<int>(s.size()); }
  [[nodiscard]] bool in_rs_set(int u) const { return s[u] != 0; }
  [[nodiscard]] bool any() const;
  /// Bit u set when s_u = 1.
  [[nodiscard]] std::uint64_t mask() const;
};

struct Allocation {
  double p_common = 0.0;      // P_0, W
  Eigen::VectorXd p_private;  // P_u, W
  Eigen::VectorXd p_device;   // P_{k,m} of device m on its beam, W
  Eigen::VectorXd r_common;   // R_{u,c}, bps/Hz

  static Allocation zeros(int n_users, int n_devices);
  /// P_i of stream i in 0..K.
  [[nodiscard]] double stream_power(int beam) const {
    return beam == 0 ? p_common : p_private(beam - 1);
  }
  [[nodiscard]] double total_power() const {
    return p_common + p_private.sum() + p_device.sum();
  }
};

/// Numerator and interference-plus-noise of one SINR.
struct SinrTerms {
  double signal = 0.0;
  double denominator = 0.0;
  [[nodiscard]] double sinr() const { return signal / denominator; }
};

/// Everything a SINR needs, by reference.
struct LinkState {
  const GainTable& gains;
  const BeamAssignment& assignment;
  const RSSelection& selection;
  const Allocation& alloc;
  double noise_power;
};

SinrTerms common_terms(int u, const LinkState& st);
SinrTerms private_terms(int u, const LinkState& st);
/// Throws Unassigned when the device has no beam.
SinrTerms device_terms(int m, const LinkState& st);

double common_sinr(int u, const LinkState& st);
double private_sinr(int u, const LinkState& st);
double device_sinr(int m, const LinkState& st);

inline double rate_of(double sinr) { return std::log1p(sinr) / std::numbers::ln2; }

struct Residual {
  std::string name;
  double value = 0.0;  // > tolerance means violated
  double tolerance = 0.0;
  [[nodiscard]] bool ok() const { return value <= tolerance; }
};

struct RateReport {
  Eigen::VectorXd common_rates;   // log2(1 + gamma_{u,c}); 0 outside the RS set
  Eigen::VectorXd private_rates;  // log2(1 + gamma_{u,p})
  Eigen::VectorXd user_rates;     // s_u R_{u,c} + private
  Eigen::VectorXd device_rates;
  double common_cap = std::numeric_limits<double>::infinity();  // R_c
  double sum_device_rate = 0.0;

  // Carried for constraint checking.
  double total_power = 0.0;
  Eigen::VectorXd r_common;
  RSSelection selection;
  BeamAssignment assignment;
  int n_beams = 0;
};

RateReport evaluate(const GainTable& gains, const BeamAssignment& assignment,
                    const RSSelection& selection, const Allocation& alloc,
                    const SystemConfig& cfg);

inline constexpr double kRateTolerance = 1e-6;
inline constexpr double kPowerTolerance = 1e-9;  // relative to P_max

struct ConstraintCheck {
  std::vector<Residual> residuals;  // budget, min_rate, common_split, common_nonneg, matching, binary
  [[nodiscard]] bool passed() const;
  [[nodiscard]] const Residual& get(const std::string& name) const;
  [[nodiscard]] std::string describe() const;
};

ConstraintCheck verify_constraints(const RateReport& report, const SystemConfig& cfg);

}  // namespace rsma
