#include "mimosim/constellation.hpp"

#include <cmath>
#include <string>

#include "mimosim/errors.hpp"

namespace mimosim {

namespace {

std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

} // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "QPSK" || name == "qpsk") return Scheme::QPSK;
  if (name == "QAM" || name == "qam") return Scheme::QAM;
  throw InvalidParameter("constellation: unknown scheme '" + std::string(name) +
                         "' (expected QPSK or QAM)");
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::QPSK ? "QPSK" : "QAM";
}

ConstellationTable build_constellation(Scheme scheme, int m) {
  if (m != 4 && m != 16 && m != 64 && m != 256) {
    throw InvalidParameter("M_constellation: unsupported size " +
                           std::to_string(m) + " (expected 4, 16, 64 or 256)");
  }
  if (scheme == Scheme::QPSK && m != 4) {
    throw InvalidParameter("M_constellation: QPSK requires M = 4, got " +
                           std::to_string(m));
  }

  ConstellationTable t;
  t.scheme_ = scheme;
  t.m_ = m;
  t.k_ = static_cast<int>(std::lround(std::log2(m)));
  const int half = t.k_ / 2;
  const int levels = 1 << half;

  // level_of_gray[g] = position on the axis of the level labeled g.
  std::vector<int> level_of_gray(levels);
  for (int pos = 0; pos < levels; ++pos) {
    level_of_gray[gray_encode(static_cast<std::uint32_t>(pos))] = pos;
  }

  double energy = 0.0;
  for (int idx = 0; idx < m; ++idx) {
    const auto word = static_cast<std::uint32_t>(idx);
    const int i_pos = level_of_gray[word >> half];
    const int q_pos = level_of_gray[word & ((1u << half) - 1)];
    const int raw_i = -levels + 1 + 2 * i_pos;
    const int raw_q = -levels + 1 + 2 * q_pos;
    t.raw_i_.push_back(raw_i);
    t.raw_q_.push_back(raw_q);
    t.labels_.push_back(word);
    energy += static_cast<double>(raw_i * raw_i + raw_q * raw_q);
  }
  t.scale_ = 1.0 / std::sqrt(energy / m);

  t.points_.reserve(m);
  t.index_of_label_.assign(m, 0);
  for (int idx = 0; idx < m; ++idx) {
    t.points_.emplace_back(t.scale_ * t.raw_i_[idx], t.scale_ * t.raw_q_[idx]);
    t.index_of_label_[t.labels_[idx]] = static_cast<SymbolIndex>(idx);
  }
  return t;
}

BitVector ConstellationTable::label_bits(SymbolIndex m) const {
  const std::uint32_t word = label(m);
  BitVector bits(k_);
  for (int b = 0; b < k_; ++b) {
    bits[b] = static_cast<std::uint8_t>((word >> (k_ - 1 - b)) & 1u);
  }
  return bits;
}

IndexVector map_bits_to_symbols(std::span<const std::uint8_t> bits,
                                const ConstellationTable& table) {
  const auto k = static_cast<std::size_t>(table.bits_per_symbol());
  if (bits.size() % k != 0) {
    throw FramingError("map_bits_to_symbols: " + std::to_string(bits.size()) +
                       " bits is not a multiple of k = " + std::to_string(k));
  }
  IndexVector out(bits.size() / k);
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::uint32_t word = 0;
    for (std::size_t b = 0; b < k; ++b) {
      word = (word << 1) | (bits[s * k + b] & 1u);
    }
    out[s] = table.index_of_label(word);
  }
  return out;
}

BitVector symbols_to_bits(std::span<const SymbolIndex> indices,
                          const ConstellationTable& table) {
  const int k = table.bits_per_symbol();
  BitVector bits;
  bits.reserve(indices.size() * k);
  for (SymbolIndex m : indices) {
    if (m >= static_cast<SymbolIndex>(table.size())) {
      throw InvalidParameter("symbols_to_bits: index " + std::to_string(m) +
                             " out of range for M = " +
                             std::to_string(table.size()));
    }
    const std::uint32_t word = table.label(m);
    for (int b = k - 1; b >= 0; --b) {
      bits.push_back(static_cast<std::uint8_t>((word >> b) & 1u));
    }
  }
  return bits;
}

} // namespace mimosim
