#ifndef MIMOSIM_CHANNEL_HPP
#define MIMOSIM_CHANNEL_HPP

#include "mimosim/random.hpp"
#include "mimosim/types.hpp"

namespace mimosim {

inline constexpr double kSpeedOfLight = 2.99792458e8; // m/s
inline constexpr double kReferenceDistance = 1.0;     // m

struct LinkGeometry {
  double carrier_hz = 1.8e9;
  double distance_m = 100.0;
  double path_loss_exponent = 3.0;
  double bandwidth_hz = 180e3;
  double noise_density_w_per_hz = 0.0;

  /// sigma_n^2 = N0 * B.
  double noise_power() const noexcept {
    return noise_density_w_per_hz * bandwidth_hz;
  }
};

/// Log-distance path gain anchored at free-space loss at 1 m:
///   G = (c / (4 pi f_c d_ref))^2 * (d_ref / d)^eta.
/// Throws InvalidParameter when the geometry is out of range.
double large_scale_gain(const LinkGeometry& geometry);

/// One block-fading realization of y = sqrt(G) H x + n.
struct ChannelRealization {
  CMatrix h;            // N_r x N_t, ||H||_F^2 = N_r N_t
  double gain = 1.0;    // G, linear
  double noise_power = 0.0; // sigma_n^2

  int n_r() const noexcept { return static_cast<int>(h.rows()); }
  int n_t() const noexcept { return static_cast<int>(h.cols()); }
};

/// i.i.d. CN(0,1) entries without normalization.
CMatrix sample_raw_channel(int n_r, int n_t, RandomStream& rng);

/// Rayleigh draw rescaled so that ||H||_F^2 = N_r N_t exactly.
CMatrix sample_channel(int n_r, int n_t, RandomStream& rng);

/// Length-n_r vector with i.i.d. CN(0, sigma2) entries.
CVector sample_noise(int n_r, double sigma2, RandomStream& rng);

/// y = sqrt(G) H x + n with fresh noise. Throws ShapeError on mismatch.
CVector apply_channel(const ChannelRealization& channel, const CVector& x,
                      RandomStream& rng);

/// Column-wise apply_channel: each column of xs is one channel use.
CMatrix apply_channel(const ChannelRealization& channel, const CMatrix& xs,
                      RandomStream& rng);

} // namespace mimosim

#endif // MIMOSIM_CHANNEL_HPP
