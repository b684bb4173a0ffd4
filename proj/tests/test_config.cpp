#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "rsma/config.hpp"

using namespace rsma;

TEST_CASE("dBm conversion") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_watt(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(dbm_to_watt(-80.0) == doctest::Approx(1e-11).epsilon(1e-12));
  CHECK(watt_to_dbm(dbm_to_watt(17.5)) == doctest::Approx(17.5).epsilon(1e-14));
}

TEST_CASE("reference deployment parameters") {
  const SystemConfig cfg = reference_config();
  CHECK(cfg.n_antennas == 127);
  CHECK(cfg.n_users == 8);
  CHECK(cfg.n_devices == 8);
  CHECK(cfg.wavelength_m == doctest::Approx(0.01));
  CHECK(cfg.antenna_spacing_m == doctest::Approx(0.005));
  CHECK(cfg.max_power_w == doctest::Approx(1.0));
  CHECK(cfg.noise_power_w == doctest::Approx(1e-11));
  CHECK(cfg.min_rate_bps_hz == doctest::Approx(0.8));
  CHECK(cfg.coverage_radius_m == doctest::Approx(120.0));
  CHECK(cfg.anneal_steps() == 32);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("JSON round trip and digest") {
  SystemConfig cfg = reference_config();
  cfg.n_antennas = 33;
  cfg.min_rate_bps_hz = 1.1;
  const SystemConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.n_antennas == 33);
  CHECK(back.min_rate_bps_hz == doctest::Approx(1.1));
  CHECK(config_digest(back) == config_digest(cfg));
  CHECK(config_digest(cfg) != config_digest(reference_config()));
  CHECK(config_digest(cfg).size() == 16);
}

TEST_CASE("invalid configurations are rejected") {
  SystemConfig cfg = reference_config();
  SUBCASE("more devices than beams") {
    cfg.n_devices = 9;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("more users than antennas") {
    cfg.n_antennas = 4;
    cfg.n_users = 5;
    cfg.n_devices = 5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("non-positive noise") {
    cfg.noise_power_w = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("decay outside (0,1)") {
    cfg.anneal_decay = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_CASE("malformed files") {
  CHECK_THROWS_AS(load_config("/nonexistent/rsma.json"), ConfigError);
  const char* path = "rsma_bad_config.json";
  {
    std::ofstream f(path);
    f << "{ \"n_users\": \"eight\" }";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::remove(path);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"n_antenas", 3}}), ConfigError);
}
