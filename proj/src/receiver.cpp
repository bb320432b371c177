#include "mimosim/receiver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mimosim/errors.hpp"

namespace mimosim {

namespace {

constexpr std::ptrdiff_t kParallelThreshold = 2048;

// Both detectors use this exact expression so that their decisions agree
// bit for bit.
inline double squared_distance(double ax, double ay, double bx, double by) {
  const double dx = ax - bx;
  const double dy = ay - by;
  return dx * dx + dy * dy;
}

inline SymbolIndex nearest(double x, double y, std::span<const IqPoint> centroids) {
  SymbolIndex best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < centroids.size(); ++m) {
    const double d = squared_distance(x, y, centroids[m][0], centroids[m][1]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<SymbolIndex>(m);
    }
  }
  return best;
}

std::vector<IqPoint> centroids_of(const ConstellationTable& table) {
  return to_iq_points(table.points());
}

DetectionResult make_result(IndexVector indices, const ConstellationTable& table) {
  DetectionResult out;
  out.points.reserve(indices.size());
  for (SymbolIndex m : indices) out.points.push_back(table.point(m));
  out.indices = std::move(indices);
  return out;
}

} // namespace

EqualizerKind parse_equalizer(std::string_view name) {
  if (name == "zf") return EqualizerKind::ZF;
  if (name == "lmmse") return EqualizerKind::LMMSE;
  throw InvalidParameter("equalizer: unknown '" + std::string(name) +
                         "' (expected zf or lmmse)");
}

std::string_view to_string(EqualizerKind kind) {
  return kind == EqualizerKind::ZF ? "zf" : "lmmse";
}

CMatrix zf_equalizer(const CMatrix& h_hat, double gain) {
  if (!(gain > 0.0)) throw InvalidParameter("G: large-scale gain must be positive");
  if (h_hat.rows() < h_hat.cols()) {
    throw SingularMatrix("zf_equalizer: N_r < N_t, no left inverse");
  }
  if (!h_hat.allFinite()) {
    throw SingularMatrix("zf_equalizer: non-finite channel estimate");
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(h_hat);
  if (qr.rank() < h_hat.cols()) {
    throw SingularMatrix("zf_equalizer: channel estimate is rank deficient");
  }
  // Least-squares solve against the identity yields the left pseudo-inverse.
  const CMatrix pinv = qr.solve(CMatrix::Identity(h_hat.rows(), h_hat.rows()));
  return pinv / std::sqrt(gain);
}

CMatrix lmmse_equalizer(const CMatrix& h_hat, double gain, double sigma2) {
  if (!(gain > 0.0)) throw InvalidParameter("G: large-scale gain must be positive");
  if (sigma2 < 0.0) throw InvalidParameter("noise_power: must be non-negative");
  const auto n_t = h_hat.cols();
  const CMatrix a = gain * (h_hat.adjoint() * h_hat) +
                    (sigma2 * static_cast<double>(n_t)) * CMatrix::Identity(n_t, n_t);
  Eigen::FullPivLU<CMatrix> lu(a);
  if (!lu.isInvertible()) {
    throw SingularMatrix("lmmse_equalizer: regularized Gram matrix is singular");
  }
  return std::sqrt(gain) * lu.solve(h_hat.adjoint());
}

EqualizedSymbols equalize_zf(const CMatrix& h_hat, double gain, const CVector& y) {
  if (y.size() != h_hat.rows()) throw ShapeError("equalize_zf: y length != N_r");
  return {zf_equalizer(h_hat, gain) * y, EqualizerKind::ZF};
}

EqualizedSymbols equalize_lmmse(const CMatrix& h_hat, double gain,
                                double sigma2, const CVector& y) {
  if (y.size() != h_hat.rows()) throw ShapeError("equalize_lmmse: y length != N_r");
  return {lmmse_equalizer(h_hat, gain, sigma2) * y, EqualizerKind::LMMSE};
}

std::vector<IqPoint> to_iq_points(std::span<const Complex> symbols) {
  std::vector<IqPoint> out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    out[i] = {symbols[i].real(), symbols[i].imag()};
  }
  return out;
}

DetectionResult detect_ml_serial(std::span<const Complex> s_hat,
                                 const ConstellationTable& table) {
  const auto& pts = table.points();
  IndexVector idx(s_hat.size());
  for (std::size_t i = 0; i < s_hat.size(); ++i) {
    SymbolIndex best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < pts.size(); ++m) {
      const double d = squared_distance(s_hat[i].real(), s_hat[i].imag(),
                                        pts[m].real(), pts[m].imag());
      if (d < best_d) {
        best_d = d;
        best = static_cast<SymbolIndex>(m);
      }
    }
    idx[i] = best;
  }
  return make_result(std::move(idx), table);
}

DetectionResult detect_ml(std::span<const Complex> s_hat,
                          const ConstellationTable& table) {
  const auto& pts = table.points();
  const auto n = static_cast<std::ptrdiff_t>(s_hat.size());
  IndexVector idx(s_hat.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double x = s_hat[i].real();
    const double y = s_hat[i].imag();
    SymbolIndex best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < pts.size(); ++m) {
      const double d = squared_distance(x, y, pts[m].real(), pts[m].imag());
      if (d < best_d) {
        best_d = d;
        best = static_cast<SymbolIndex>(m);
      }
    }
    idx[i] = best;
  }
  return make_result(std::move(idx), table);
}

DetectionResult detect_kmeans_serial(std::span<const IqPoint> batch,
                                     const ConstellationTable& table) {
  const auto centroids = centroids_of(table);
  IndexVector idx(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    idx[i] = nearest(batch[i][0], batch[i][1], centroids);
  }
  return make_result(std::move(idx), table);
}

DetectionResult detect_kmeans(std::span<const IqPoint> batch,
                              const ConstellationTable& table) {
  const auto centroids = centroids_of(table);
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
  IndexVector idx(batch.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    idx[i] = nearest(batch[i][0], batch[i][1], centroids);
  }
  return make_result(std::move(idx), table);
}

} // namespace mimosim
