#ifndef MIMOSIM_CONSTELLATION_HPP
#define MIMOSIM_CONSTELLATION_HPP

#include <span>
#include <string_view>
#include <vector>

#include "mimosim/types.hpp"

namespace mimosim {

enum class Scheme { QPSK, QAM };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme);

/// Gray-labeled square constellation normalized to unit average energy.
///
/// Points are ordered by label: index m carries the k-bit label whose
/// integer value is m. The upper k/2 bits select the in-phase level and
/// the lower k/2 bits the quadrature level, each through a binary
/// reflected Gray code over the odd integer grid {-L+1, ..., L-1},
/// L = sqrt(M).
class ConstellationTable {
public:
  Scheme scheme() const noexcept { return scheme_; }
  int size() const noexcept { return m_; }
  int bits_per_symbol() const noexcept { return k_; }
  double scale() const noexcept { return scale_; }

  const std::vector<Complex>& points() const noexcept { return points_; }
  Complex point(SymbolIndex m) const { return points_.at(m); }

  /// Label of index m as a k-bit word (MSB is the first transmitted bit).
  std::uint32_t label(SymbolIndex m) const { return labels_.at(m); }
  BitVector label_bits(SymbolIndex m) const;

  /// Inverse of label(): index carrying the given k-bit word.
  SymbolIndex index_of_label(std::uint32_t word) const {
    return index_of_label_.at(word);
  }

  /// Unnormalized per-axis level of index m, e.g. {-3,-1,1,3} for 16-QAM.
  int raw_in_phase(SymbolIndex m) const { return raw_i_.at(m); }
  int raw_quadrature(SymbolIndex m) const { return raw_q_.at(m); }

private:
  friend ConstellationTable build_constellation(Scheme scheme, int m);

  Scheme scheme_ = Scheme::QAM;
  int m_ = 0;
  int k_ = 0;
  double scale_ = 1.0;
  std::vector<Complex> points_;
  std::vector<std::uint32_t> labels_;
  std::vector<SymbolIndex> index_of_label_;
  std::vector<int> raw_i_;
  std::vector<int> raw_q_;
};

/// Throws InvalidParameter for M outside {4, 16, 64, 256} or QPSK with M != 4.
ConstellationTable build_constellation(Scheme scheme, int m);

/// Groups consecutive k-bit words into symbol indices.
/// Throws FramingError when bits.size() is not a multiple of k.
IndexVector map_bits_to_symbols(std::span<const std::uint8_t> bits,
                                const ConstellationTable& table);

/// Concatenated labels. Throws InvalidParameter for an index >= M.
BitVector symbols_to_bits(std::span<const SymbolIndex> indices,
                          const ConstellationTable& table);

} // namespace mimosim

#endif // MIMOSIM_CONSTELLATION_HPP
