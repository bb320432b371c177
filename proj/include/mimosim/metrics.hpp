#ifndef MIMOSIM_METRICS_HPP
#define MIMOSIM_METRICS_HPP

#include <span>
#include <vector>

#include "mimosim/types.hpp"

namespace mimosim {

/// Per-run radio measures. The dB quantities are transmit-side ratios under
/// unit-power normalization, labeled dBm by convention.
struct RadioMeasures {
  CVector error_vector;
  double estimation_mse = 0.0;
  double tx_snr_db = 0.0;
  double tx_ebn0_db = 0.0;
  double bler = 0.0;
  double ser = 0.0;
  double ber = 0.0;
};

/// vec(H) - vec(H_hat), column-major. Throws ShapeError on mismatch.
CVector error_vector(const CMatrix& h, const CMatrix& h_hat);

/// ||e||^2 / (N_r N_t).
double estimation_mse(const CVector& e, int n_r, int n_t);

/// -10 log10(sigma2 N_t).
double tx_snr_db(double sigma2, int n_t);

/// -10 log10(k sigma2 N_t).
double tx_ebn0_db(double sigma2, int n_t, int k);

/// Fraction of blocks whose CRC failed. Throws UndefinedMeasure when empty.
double bler(const std::vector<bool>& crc_ok);

/// Mean of [y_true != y_pred]; accuracy is 1 minus this.
double classification_error(std::span<const SymbolIndex> y_true,
                            std::span<const SymbolIndex> y_pred);

} // namespace mimosim

#endif // MIMOSIM_METRICS_HPP
