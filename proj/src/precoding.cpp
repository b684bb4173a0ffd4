#include "rsma/precoding.hpp"

#include <cmath>

namespace rsma {

namespace {

Eigen::MatrixXcd stack(const std::vector<ChannelVector>& channels) {
  const auto n = channels.front().size();
  Eigen::MatrixXcd h(n, static_cast<Eigen::Index>(channels.size()));
  for (std::size_t u = 0; u < channels.size(); ++u) {
    if (channels[u].size() != n) throw std::invalid_argument("channel lengths differ");
    h.col(static_cast<Eigen::Index>(u)) = channels[u];
  }
  return h;
}

}  // namespace

PrecoderSet zf_precoders(const std::vector<ChannelVector>& user_channels) {
  if (user_channels.empty()) throw std::invalid_argument("no user channels");
  const Eigen::MatrixXcd h = stack(user_channels);
  const auto n = h.rows();
  const auto k = h.cols();
  if (k > n) throw RankDeficient("more users than antennas");

  // H = Q R, so H^H H = R^H R and H (H^H H)^-1 = Q R^-H.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(h);
  const Eigen::MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(r).singularValues();
  const double smax = sv(0);
  const double smin = sv(k - 1);
  if (!(smin > 0.0) || (smax / smin) * (smax / smin) > kMaxGramCondition) {
    throw RankDeficient("user channel Gram matrix is numerically singular");
  }

  // R^-H by triangular solve, then Q R^-H.
  const Eigen::MatrixXcd r_inv_h = r.adjoint().triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXcd::Identity(k, k));
  Eigen::MatrixXcd thin_q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
  Eigen::MatrixXcd unnormalized = thin_q * r_inv_h;

  // [(H^H H)^-1]_uu is the squared norm of column u of R^-H.
  PrecoderSet set;
  set.normalizer.resize(k);
  for (Eigen::Index u = 0; u < k; ++u) {
    set.normalizer(u) = 1.0 / r_inv_h.col(u).norm();
  }
  set.priv = unnormalized * set.normalizer.asDiagonal();
  return set;
}

ChannelVector common_precoder(const std::vector<ChannelVector>& user_channels) {
  if (user_channels.empty()) throw std::invalid_argument("no user channels");
  std::size_t weakest = 0;
  double weakest_norm = user_channels[0].norm();
  for (std::size_t u = 1; u < user_channels.size(); ++u) {
    const double nrm = user_channels[u].norm();
    if (nrm < weakest_norm) {
      weakest = u;
      weakest_norm = nrm;
    }
  }
  return user_channels[weakest] / weakest_norm;
}

PrecoderSet build_precoders(const std::vector<ChannelVector>& user_channels) {
  PrecoderSet set = zf_precoders(user_channels);
  set.common = common_precoder(user_channels);
  return set;
}

GainTable gain_tables(const Scenario& scenario, const PrecoderSet& precoders) {
  const int k = precoders.n_users();
  const int m = static_cast<int>(scenario.device_channels.size());
  if (static_cast<int>(scenario.user_channels.size()) != k) {
    throw std::invalid_argument("precoder set does not match the user count");
  }
  GainTable g;
  g.user.resize(k, k + 1);
  g.device.resize(k + 1, m);
  for (int i = 0; i <= k; ++i) {
    const ChannelVector p = precoders.beam(i);
    for (int u = 0; u < k; ++u) {
      g.user(u, i) = std::norm(scenario.user_channels[u].dot(p));
    }
    for (int d = 0; d < m; ++d) {
      g.device(i, d) = std::norm(scenario.device_channels[d].dot(p));
    }
  }
  return g;
}

Eigen::MatrixXd private_device_gains(const GainTable& gains) {
  return gains.device.bottomRows(gains.n_users());
}

}  // namespace rsma
