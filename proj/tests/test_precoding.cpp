#include <cmath>

#include "doctest.h"
#include "rsma/precoding.hpp"
#include "rsma/scenario.hpp"

using namespace rsma;

namespace {

ChannelVector basis(int n, int i, cplx scale) {
  ChannelVector v = ChannelVector::Zero(n);
  v(i) = scale;
  return v;
}

}  // namespace

TEST_CASE("orthogonal channels give matched-filter beams") {
  const std::vector<ChannelVector> h = {basis(4, 0, {2.0, 1.0}), basis(4, 2, {0.0, -3.0})};
  const PrecoderSet p = zf_precoders(h);
  for (int k = 0; k < 2; ++k) {
    CHECK((p.priv.col(k) - h[k] / h[k].norm()).norm() < 1e-14);
  }
}

TEST_CASE("zero forcing on a sampled scenario") {
  const SystemConfig cfg = reference_config();
  const Scenario sc = sample_scenario(cfg, 7);
  const PrecoderSet p = build_precoders(sc.user_channels);
  const int k = 8;
  Eigen::MatrixXcd h(cfg.n_antennas, k);
  for (int i = 0; i < k; ++i) h.col(i) = sc.user_channels[i];
  const Eigen::MatrixXcd cross = h.adjoint() * p.priv;
  const Eigen::MatrixXcd gram_inv = (h.adjoint() * h).inverse();
  for (int i = 0; i < k; ++i) {
    CHECK(std::abs(p.priv.col(i).norm() - 1.0) < 1e-9);
    for (int j = 0; j < k; ++j) {
      if (i != j) CHECK(std::abs(cross(i, j)) < 1e-9 * h.col(i).norm());
    }
    // |h_k^H p_k|^2 = 1 / [(H^H H)^-1]_kk
    CHECK(std::norm(cross(i, i)) == doctest::Approx(1.0 / gram_inv(i, i).real()).epsilon(1e-9));
  }
  const GainTable g = gain_tables(sc, p);
  for (int i = 0; i < k; ++i) {
    CHECK(g.user_own(i) == doctest::Approx(p.normalizer(i) * p.normalizer(i)).epsilon(1e-9));
  }
}

TEST_CASE("common beam follows the weakest user") {
  const std::vector<ChannelVector> one = {basis(3, 1, {0.0, 5.0})};
  CHECK((common_precoder(one) - one[0] / 5.0).norm() < 1e-15);

  const std::vector<ChannelVector> h = {basis(3, 0, 3.0), basis(3, 1, 1.0), basis(3, 2, 2.0)};
  CHECK((common_precoder(h) - h[1]).norm() < 1e-15);
}

TEST_CASE("rank-deficient user channels") {
  const std::vector<ChannelVector> dup = {basis(3, 0, 1.0), basis(3, 0, 2.0)};
  CHECK_THROWS_AS(zf_precoders(dup), RankDeficient);
  const std::vector<ChannelVector> wide = {basis(1, 0, 1.0), basis(1, 0, 2.0)};
  CHECK_THROWS_AS(zf_precoders(wide), RankDeficient);
}

TEST_CASE("co-located device sees the user's gains") {
  const SystemConfig cfg = reference_config();
  std::vector<PolarLocation> users = {{12.0, -0.4}, {30.0, 0.1}, {55.0, 0.7}};
  std::vector<PolarLocation> devices = {users[1], {90.0, 0.2}};
  SystemConfig c3 = cfg;
  c3.n_users = 3;
  c3.n_devices = 2;
  const Scenario sc = scenario_from_locations(c3, users, devices);
  const GainTable g = gain_tables(sc, build_precoders(sc.user_channels));
  CHECK(g.device(beam_of_user(1), 0) == doctest::Approx(g.user_own(1)).epsilon(1e-12));
  CHECK(g.device(0, 0) == doctest::Approx(g.user_common(1)).epsilon(1e-12));
  const Eigen::MatrixXd priv = private_device_gains(g);
  CHECK(priv.rows() == 3);
  CHECK(priv.cols() == 2);
  CHECK(priv(1, 0) == g.device(2, 0));
}
