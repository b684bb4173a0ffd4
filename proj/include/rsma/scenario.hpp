#pragma once

#include <cstdint>
#include <vector>

#include "rsma/channel.hpp"
#include "rsma/config.hpp"

namespace rsma {

inline constexpr double kMinPlacementDistance = 1.0;  // m

struct Scenario {
  std::vector<PolarLocation> user_locations;
  std::vector<PolarLocation> device_locations;
  std::vector<ChannelVector> user_channels;
  std::vector<ChannelVector> device_channels;
  std::uint64_t rng_seed = 0;
};

/// Users are placed uniformly by area in the near-field part of the coverage
/// sector, devices anywhere in it. Pure function of (cfg, seed).
Scenario sample_scenario(const SystemConfig& cfg, std::uint64_t seed);

/// Rebuilds a scenario with channels synthesized from explicit locations.
Scenario scenario_from_locations(const SystemConfig& cfg, std::vector<PolarLocation> users,
                                 std::vector<PolarLocation> devices, std::uint64_t seed = 0);

}  // namespace rsma
