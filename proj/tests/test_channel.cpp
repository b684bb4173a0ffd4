#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rsma/channel.hpp"
#include "rsma/scenario.hpp"

using namespace rsma;

TEST_CASE("element distance") {
  const SystemConfig cfg = reference_config();
  // Element 64 is the centre of 127; element 127 sits 63 * 5 mm = 0.315 m off it.
  CHECK(element_distance({7.3, 0.0}, 64, cfg) == doctest::Approx(7.3).epsilon(1e-15));
  CHECK(element_distance({10.0, 0.0}, 127, cfg) == doctest::Approx(std::sqrt(100.099225)).epsilon(1e-14));
  CHECK(element_distance({10.0, std::numbers::pi / 2}, 127, cfg) ==
        doctest::Approx(9.685).epsilon(1e-13));
}

TEST_CASE("free-space amplitude") {
  const SystemConfig cfg = reference_config();
  CHECK(path_loss(10.0, cfg) == doctest::Approx(7.9577e-5).epsilon(1e-4));
  CHECK(path_loss(10.0, cfg) == doctest::Approx(3e8 / (4 * std::numbers::pi * 3e10 * 10)).epsilon(1e-14));
}

TEST_CASE("steering vectors have unit-modulus entries") {
  const SystemConfig cfg = reference_config();
  for (const PolarLocation loc : {PolarLocation{3.0, 0.4}, PolarLocation{60.0, -1.2}}) {
    const ChannelVector h = nf_response(loc, cfg);
    REQUIRE(h.size() == 127);
    const double beta = path_loss(loc.distance_m, cfg);
    CHECK(h.norm() / beta == doctest::Approx(std::sqrt(127.0)).epsilon(1e-12));
    for (int n = 0; n < h.size(); ++n) CHECK(std::abs(h(n)) == doctest::Approx(beta).epsilon(1e-12));
  }
}

TEST_CASE("planar response") {
  const SystemConfig cfg = reference_config();
  const ChannelVector broadside = ff_response({50.0, 0.0}, cfg);
  for (int n = 1; n < broadside.size(); ++n) CHECK(std::abs(broadside(n) - broadside(0)) < 1e-18);

  const double far = 100.0 * rayleigh_distance(cfg);
  double worst = 0.0;
  for (double theta : {-1.3, -0.5, 0.2, 0.9, 1.4}) {
    const ChannelVector nf = nf_response({far, theta}, cfg);
    const ChannelVector ff = ff_response({far, theta}, cfg);
    for (int n = 0; n < nf.size(); ++n) worst = std::max(worst, std::abs(std::arg(nf(n) / ff(n))));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("near/far branch of device channels") {
  const SystemConfig cfg = reference_config();
  const double z = rayleigh_distance(cfg);
  const PolarLocation at_z{z, 0.3};
  CHECK((device_channel(at_z, cfg) - nf_response(at_z, cfg)).norm() == 0.0);
  const PolarLocation beyond{120.0, -0.7};
  CHECK((device_channel(beyond, cfg) - ff_response(beyond, cfg)).norm() == 0.0);
  CHECK((device_channel(beyond, cfg) - nf_response(beyond, cfg)).norm() > 0.0);
  const PolarLocation close{10.0, 1.0};
  CHECK((device_channel(close, cfg) - nf_response(close, cfg)).norm() == 0.0);
}

TEST_CASE("Rayleigh distance") {
  const SystemConfig cfg = reference_config();
  CHECK(rayleigh_distance(cfg) == doctest::Approx(79.38).epsilon(1e-12));
  SystemConfig small = cfg;
  small.n_antennas = 3;
  small.antenna_spacing_m = cfg.wavelength_m / 2;
  CHECK(rayleigh_distance(small) == doctest::Approx(2 * cfg.wavelength_m).epsilon(1e-12));
}

TEST_CASE("scenario sampling") {
  const SystemConfig cfg = reference_config();
  const Scenario a = sample_scenario(cfg, 42);
  const Scenario b = sample_scenario(cfg, 42);
  REQUIRE(a.user_channels.size() == 8);
  REQUIRE(a.device_channels.size() == 8);
  for (int k = 0; k < 8; ++k) {
    CHECK(a.user_locations[k].distance_m == b.user_locations[k].distance_m);
    CHECK(a.user_locations[k].angle_rad == b.user_locations[k].angle_rad);
    CHECK((a.user_channels[k] - b.user_channels[k]).norm() == 0.0);
    CHECK((a.device_channels[k] - b.device_channels[k]).norm() == 0.0);
  }
  const Scenario c = sample_scenario(cfg, 43);
  CHECK(c.user_locations[0].distance_m != a.user_locations[0].distance_m);

  const double z = rayleigh_distance(cfg);
  int far = 0;
  int total = 0;
  for (std::uint64_t seed = 1; seed <= 1250; ++seed) {
    const Scenario s = sample_scenario(cfg, seed);
    for (const auto& loc : s.user_locations) {
      CHECK(loc.distance_m <= z);
      CHECK(loc.distance_m >= kMinPlacementDistance);
      CHECK(std::abs(loc.angle_rad) < std::numbers::pi / 2);
    }
    for (const auto& loc : s.device_locations) {
      far += loc.distance_m > z;
      ++total;
      CHECK(loc.distance_m <= cfg.coverage_radius_m);
    }
  }
  REQUIRE(total == 10000);
  const double expected = (120.0 * 120.0 - z * z) / (120.0 * 120.0 - 1.0);
  CHECK(std::abs(static_cast<double>(far) / total - expected) < 0.02);
}
