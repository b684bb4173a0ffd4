/**
 * @file precoding.hpp
 * @brief Zero-forcing private beams, the common beam and effective gains.
 *
 * Beams are numbered 0..K: beam 0 carries the common stream and beam u+1 is
 * the private beam of user u (users are 0-based).
 */
#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rsma/channel.hpp"
#include "rsma/scenario.hpp"

namespace rsma {

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int beam_of_user(int user) { return user + 1; }
inline constexpr int user_of_beam(int beam) { return beam - 1; }

/// Gram matrices with a larger condition number are treated as singular.
inline constexpr double kMaxGramCondition = 1e12;

struct PrecoderSet {
  ChannelVector common;        // p_0, unit norm
  Eigen::MatrixXcd priv;       // N x K, column u is the beam of user u
  Eigen::VectorXd normalizer;  // F_uu = [(H^H H)^-1]_uu^(-1/2)

  [[nodiscard]] int n_users() const { return static_cast<int>(priv.cols()); }
  /// Beam i in 0..K.
  [[nodiscard]] ChannelVector beam(int i) const {
    return i == 0 ? common : ChannelVector(priv.col(i - 1));
  }
};

/// Private part only: columns of H (H^H H)^-1 F computed from a QR
/// factorization of H. Throws RankDeficient when K > N or the Gram matrix is
/// numerically singular.
PrecoderSet zf_precoders(const std::vector<ChannelVector>& user_channels);

/// Unit-norm copy of the weakest user's channel (lowest index on ties).
ChannelVector common_precoder(const std::vector<ChannelVector>& user_channels);

/// Private and common beams together.
PrecoderSet build_precoders(const std::vector<ChannelVector>& user_channels);

/// |h^H p|^2 for every channel/beam pair.
struct GainTable {
  Eigen::MatrixXd user;    // K x (K+1): user(u, i) = |h_u^H p_i|^2
  Eigen::MatrixXd device;  // (K+1) x M: device(i, m) = |g_m^H p_i|^2

  [[nodiscard]] int n_users() const { return static_cast<int>(user.rows()); }
  [[nodiscard]] int n_devices() const { return static_cast<int>(device.cols()); }

  /// h_{u,0}
  [[nodiscard]] double user_common(int u) const { return user(u, 0); }
  /// h_{u,u}
  [[nodiscard]] double user_own(int u) const { return user(u, beam_of_user(u)); }
};

GainTable gain_tables(const Scenario& scenario, const PrecoderSet& precoders);

/// Beam-major K x M matrix of device gains on the private beams only.
Eigen::MatrixXd private_device_gains(const GainTable& gains);

}  // namespace rsma
