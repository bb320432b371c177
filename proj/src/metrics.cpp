#include "mimosim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimosim/errors.hpp"

namespace mimosim {

CVector error_vector(const CMatrix& h, const CMatrix& h_hat) {
  if (h.rows() != h_hat.rows() || h.cols() != h_hat.cols()) {
    throw ShapeError("error_vector: H and H_hat shapes differ");
  }
  const CMatrix diff = h - h_hat;
  return diff.reshaped(); // Eigen storage is column-major
}

double estimation_mse(const CVector& e, int n_r, int n_t) {
  if (e.size() != static_cast<Eigen::Index>(n_r) * n_t) {
    throw ShapeError("estimation_mse: error vector length " +
                     std::to_string(e.size()) + " != N_r N_t");
  }
  return e.squaredNorm() / (static_cast<double>(n_r) * n_t);
}

double tx_snr_db(double sigma2, int n_t) {
  if (!(sigma2 > 0.0)) throw InvalidParameter("noise_power: must be positive");
  if (n_t < 1) throw InvalidParameter("N_t: must be >= 1");
  return -10.0 * std::log10(sigma2 * n_t);
}

double tx_ebn0_db(double sigma2, int n_t, int k) {
  if (!(sigma2 > 0.0)) throw InvalidParameter("noise_power: must be positive");
  if (n_t < 1) throw InvalidParameter("N_t: must be >= 1");
  if (k < 1) throw InvalidParameter("k: must be >= 1");
  return -10.0 * std::log10(k * sigma2 * n_t);
}

double bler(const std::vector<bool>& crc_ok) {
  if (crc_ok.empty()) throw UndefinedMeasure("bler: no blocks received");
  const auto failed = std::count(crc_ok.begin(), crc_ok.end(), false);
  return static_cast<double>(failed) / static_cast<double>(crc_ok.size());
}

double classification_error(std::span<const SymbolIndex> y_true,
                            std::span<const SymbolIndex> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ShapeError("classification_error: length mismatch");
  }
  if (y_true.empty()) throw UndefinedMeasure("classification_error: empty input");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) wrong += y_true[i] != y_pred[i];
  return static_cast<double>(wrong) / static_cast<double>(y_true.size());
}

} // namespace mimosim
