/**
 * @file channel.hpp
 * @brief Spherical-wave (near-field) and planar-wave (far-field) ULA channels.
 *
 * The array lies on the y-axis centred at the origin; element n (1-based) sits
 * at (0, (n - (N+1)/2) d). A receiver at polar location (r, theta) sits at
 * (r cos theta, r sin theta).
 */
#pragma once

#include <complex>

#include <Eigen/Dense>

#include "rsma/config.hpp"

namespace rsma {

using cplx = std::complex<double>;
using ChannelVector = Eigen::VectorXcd;

struct PolarLocation {
  double distance_m = 1.0;
  double angle_rad = 0.0;  // open interval (-pi/2, pi/2)
};

/// Boundary between near and far field, 2 D^2 / lambda with D = (N-1) d.
double rayleigh_distance(const SystemConfig& cfg);

/// Distance from element n (1-based) to the receiver.
double element_distance(const PolarLocation& loc, int n, const SystemConfig& cfg);

/// Free-space amplitude c / (4 pi f r).
double path_loss(double distance_m, const SystemConfig& cfg);

/// Exact spherical-wave response: entry n = beta exp(-j 2 pi d_n / lambda).
ChannelVector nf_response(const PolarLocation& loc, const SystemConfig& cfg);

/// Linear-phase response from the first-order expansion d_n ~ r - n~ d sin(theta),
/// keeping the global phase exp(-j 2 pi r / lambda) in the complex gain.
ChannelVector ff_response(const PolarLocation& loc, const SystemConfig& cfg);

/// Near-field model up to and including the Rayleigh distance, far-field beyond.
ChannelVector device_channel(const PolarLocation& loc, const SystemConfig& cfg);

}  // namespace rsma
