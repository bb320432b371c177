#include "mimosim/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mimosim/errors.hpp"

namespace mimosim {

double large_scale_gain(const LinkGeometry& geometry) {
  if (!(geometry.carrier_hz > 0.0)) {
    throw InvalidParameter("f_c: carrier frequency must be positive");
  }
  if (!(geometry.distance_m >= kReferenceDistance)) {
    throw InvalidParameter("distance: must be at least the 1 m reference, got " +
                           std::to_string(geometry.distance_m));
  }
  if (!(geometry.path_loss_exponent >= 2.0)) {
    throw InvalidParameter("path_loss_exponent: must be >= 2");
  }
  const double anchor = kSpeedOfLight /
                        (4.0 * std::numbers::pi * geometry.carrier_hz * kReferenceDistance);
  return anchor * anchor *
         std::pow(kReferenceDistance / geometry.distance_m,
                  geometry.path_loss_exponent);
}

CMatrix sample_raw_channel(int n_r, int n_t, RandomStream& rng) {
  CMatrix h(n_r, n_t);
  // Column-major fill order fixes the draw sequence.
  for (int c = 0; c < n_t; ++c) {
    for (int r = 0; r < n_r; ++r) {
      h(r, c) = rng.complex_normal(1.0);
    }
  }
  return h;
}

CMatrix sample_channel(int n_r, int n_t, RandomStream& rng) {
  if (n_r < 1 || n_t < 1) {
    throw InvalidParameter("sample_channel: antenna counts must be >= 1");
  }
  CMatrix h = sample_raw_channel(n_r, n_t, rng);
  const double norm = h.norm();
  h *= std::sqrt(static_cast<double>(n_r) * n_t) / norm;
  return h;
}

CVector sample_noise(int n_r, double sigma2, RandomStream& rng) {
  if (sigma2 < 0.0) {
    throw InvalidParameter("noise_power: must be non-negative");
  }
  CVector n(n_r);
  for (int r = 0; r < n_r; ++r) {
    n(r) = rng.complex_normal(sigma2);
  }
  return n;
}

CVector apply_channel(const ChannelRealization& channel, const CVector& x,
                      RandomStream& rng) {
  if (x.size() != channel.h.cols()) {
    throw ShapeError("apply_channel: x has length " + std::to_string(x.size()) +
                     ", channel expects " + std::to_string(channel.h.cols()));
  }
  CVector y = std::sqrt(channel.gain) * (channel.h * x);
  y += sample_noise(channel.n_r(), channel.noise_power, rng);
  return y;
}

CMatrix apply_channel(const ChannelRealization& channel, const CMatrix& xs,
                      RandomStream& rng) {
  if (xs.rows() != channel.h.cols()) {
    throw ShapeError("apply_channel: x has " + std::to_string(xs.rows()) +
                     " rows, channel expects " + std::to_string(channel.h.cols()));
  }
  CMatrix ys(channel.n_r(), xs.cols());
  for (Eigen::Index u = 0; u < xs.cols(); ++u) {
    ys.col(u) = apply_channel(channel, CVector(xs.col(u)), rng);
  }
  return ys;
}

} // namespace mimosim
