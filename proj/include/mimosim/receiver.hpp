#ifndef MIMOSIM_RECEIVER_HPP
#define MIMOSIM_RECEIVER_HPP

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "mimosim/constellation.hpp"
#include "mimosim/types.hpp"

namespace mimosim {

enum class EqualizerKind { ZF, LMMSE };

EqualizerKind parse_equalizer(std::string_view name);
std::string_view to_string(EqualizerKind kind);

struct EqualizedSymbols {
  CVector s_hat; // one entry per transmit stream
  EqualizerKind equalizer = EqualizerKind::ZF;
};

/// W with s_hat = W y:  W = (1/sqrt(G)) (H^H H)^{-1} H^H.
/// Throws SingularMatrix if H_hat lacks full column rank or N_r < N_t.
CMatrix zf_equalizer(const CMatrix& h_hat, double gain);

/// W = sqrt(G) (G H^H H + sigma2 N_t I)^{-1} H^H.
CMatrix lmmse_equalizer(const CMatrix& h_hat, double gain, double sigma2);

EqualizedSymbols equalize_zf(const CMatrix& h_hat, double gain, const CVector& y);
EqualizedSymbols equalize_lmmse(const CMatrix& h_hat, double gain,
                                double sigma2, const CVector& y);

struct DetectionResult {
  IndexVector indices;
  std::vector<Complex> points;
};

/// Nearest constellation point per symbol, ties to the lowest index.
/// The batch is split across OpenMP threads; output order follows input.
DetectionResult detect_ml(std::span<const Complex> s_hat,
                          const ConstellationTable& table);

/// Single-threaded reference of detect_ml.
DetectionResult detect_ml_serial(std::span<const Complex> s_hat,
                                 const ConstellationTable& table);

/// A received symbol in the I/Q plane, [s_I, s_Q].
using IqPoint = std::array<double, 2>;

std::vector<IqPoint> to_iq_points(std::span<const Complex> symbols);

/// K-means assignment step against centroids frozen at the constellation
/// points. No centroid update is performed.
DetectionResult detect_kmeans(std::span<const IqPoint> batch,
                              const ConstellationTable& table);

DetectionResult detect_kmeans_serial(std::span<const IqPoint> batch,
                                     const ConstellationTable& table);

} // namespace mimosim

#endif // MIMOSIM_RECEIVER_HPP
