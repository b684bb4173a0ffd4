#include "rsma/channel.hpp"

#include <cmath>
#include <numbers>

namespace rsma {

namespace {

double centered_index(int n, const SystemConfig& cfg) {
  return n - (cfg.n_antennas + 1) / 2.0;
}

}  // namespace

double rayleigh_distance(const SystemConfig& cfg) {
  const double aperture = cfg.aperture_m();
  return 2.0 * aperture * aperture / cfg.wavelength_m;
}

double element_distance(const PolarLocation& loc, int n, const SystemConfig& cfg) {
  const double offset = centered_index(n, cfg) * cfg.antenna_spacing_m;
  const double r = loc.distance_m;
  return std::sqrt(r * r + offset * offset - 2.0 * offset * r * std::sin(loc.angle_rad));
}

double path_loss(double distance_m, const SystemConfig& cfg) {
  return kSpeedOfLight / (4.0 * std::numbers::pi * cfg.carrier_freq_hz * distance_m);
}

ChannelVector nf_response(const PolarLocation& loc, const SystemConfig& cfg) {
  const double beta = path_loss(loc.distance_m, cfg);
  const double k = 2.0 * std::numbers::pi / cfg.wavelength_m;
  ChannelVector h(cfg.n_antennas);
  for (int n = 1; n <= cfg.n_antennas; ++n) {
    h(n - 1) = beta * std::polar(1.0, -k * element_distance(loc, n, cfg));
  }
  return h;
}

ChannelVector ff_response(const PolarLocation& loc, const SystemConfig& cfg) {
  const double k = 2.0 * std::numbers::pi / cfg.wavelength_m;
  const cplx beta = path_loss(loc.distance_m, cfg) * std::polar(1.0, -k * loc.distance_m);
  const double s = std::sin(loc.angle_rad);
  ChannelVector h(cfg.n_antennas);
  for (int n = 1; n <= cfg.n_antennas; ++n) {
    h(n - 1) = beta * std::polar(1.0, k * centered_index(n, cfg) * cfg.antenna_spacing_m * s);
  }
  return h;
}

ChannelVector device_channel(const PolarLocation& loc, const SystemConfig& cfg) {
  if (loc.distance_m <= rayleigh_distance(cfg)) return nf_response(loc, cfg);
  return ff_response(loc, cfg);
}

}  // namespace rsma
