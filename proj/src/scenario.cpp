#include "rsma/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rsma/random.hpp"

namespace rsma {

namespace {

// Uniform by area over {r_min <= r <= r_max, |theta| < pi/2}.
PolarLocation sample_sector(Rng& rng, double r_min, double r_max) {
  const double u = uniform01(rng);
  const double r = std::sqrt(r_min * r_min + u * (r_max * r_max - r_min * r_min));
  double theta = 0.0;
  do {
    theta = (uniform01(rng) - 0.5) * std::numbers::pi;
  } while (theta <= -std::numbers::pi / 2);
  return {std::min(r, r_max), theta};
}

}  // namespace

Scenario scenario_from_locations(const SystemConfig& cfg, std::vector<PolarLocation> users,
                                 std::vector<PolarLocation> devices, std::uint64_t seed) {
  Scenario sc;
  sc.rng_seed = seed;
  sc.user_locations = std::move(users);
  sc.device_locations = std::move(devices);
  sc.user_channels.reserve(sc.user_locations.size());
  for (const auto& loc : sc.user_locations) sc.user_channels.push_back(nf_response(loc, cfg));
  sc.device_channels.reserve(sc.device_locations.size());
  for (const auto& loc : sc.device_locations) {
    sc.device_channels.push_back(device_channel(loc, cfg));
  }
  return sc;
}

Scenario sample_scenario(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const double user_max = std::min(rayleigh_distance(cfg), cfg.coverage_radius_m);
  if (user_max < kMinPlacementDistance) {
    throw ConfigError("near-field region is smaller than the minimum placement distance");
  }
  if (cfg.coverage_radius_m < kMinPlacementDistance) {
    throw ConfigError("coverage radius is smaller than the minimum placement distance");
  }
  Rng rng(seed);
  std::vector<PolarLocation> users;
  users.reserve(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    users.push_back(sample_sector(rng, kMinPlacementDistance, user_max));
  }
  std::vector<PolarLocation> devices;
  devices.reserve(cfg.n_devices);
  for (int m = 0; m < cfg.n_devices; ++m) {
    devices.push_back(sample_sector(rng, kMinPlacementDistance, cfg.coverage_radius_m));
  }
  return scenario_from_locations(cfg, std::move(users), std::move(devices), seed);
}

}  // namespace rsma
