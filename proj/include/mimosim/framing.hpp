#ifndef MIMOSIM_FRAMING_HPP
#define MIMOSIM_FRAMING_HPP

#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mimosim/types.hpp"

namespace mimosim {

/// CRC generator stored MSB-first with every coefficient explicit, so
/// "111" is x^2 + x + 1 and the CRC length is generator.size() - 1.
class CrcSpec {
public:
  /// Throws InvalidParameter unless the string is binary, at least two
  /// bits long, and both the leading and trailing coefficients are 1.
  explicit CrcSpec(std::string_view generator_bits);

  /// Default generator for a given CRC length (x^2+x+1 for length 2).
  static CrcSpec default_for_length(int crc_length);

  int length() const noexcept { return static_cast<int>(generator_.size()) - 1; }
  const BitVector& generator() const noexcept { return generator_; }

private:
  BitVector generator_;
};

/// Reads a file as a byte stream, MSB first within each byte.
BitVector load_payload_bits(const std::filesystem::path& path);

/// Remainder of bits(x) * x^r modulo the generator over GF(2): zero initial
/// register, no reflection, no final XOR.
BitVector crc_compute(std::span<const std::uint8_t> bits, const CrcSpec& spec);

/// Throws FramingError if crc_bits.size() differs from the CRC length.
bool crc_verify(std::span<const std::uint8_t> payload_bits,
                std::span<const std::uint8_t> crc_bits, const CrcSpec& spec);

/// Block layout is [payload | zero padding | crc]; the CRC covers the
/// payload only and total_bits is the least multiple of k * N_t that fits.
struct TransportBlock {
  BitVector payload_bits;
  BitVector crc_bits;
  std::size_t pad_bits = 0;
  std::size_t block_index = 0;

  std::size_t total_bits() const noexcept {
    return payload_bits.size() + pad_bits + crc_bits.size();
  }
  std::size_t symbols_per_block(int k) const noexcept {
    return total_bits() / static_cast<std::size_t>(k);
  }
  /// The serialized on-air bit sequence.
  BitVector bits() const;
};

/// Total on-air length of one block for the given sizes.
std::size_t transport_block_bits(std::size_t codeword_size, int crc_length,
                                 int k, int n_t);

std::vector<TransportBlock> build_transport_blocks(
    std::span<const std::uint8_t> bits, std::size_t codeword_size,
    const CrcSpec& spec, int k, int n_t);

/// Single-block helper: payload must be exactly codeword_size bits.
TransportBlock make_transport_block(std::span<const std::uint8_t> payload,
                                    const CrcSpec& spec, int k, int n_t,
                                    std::size_t block_index = 0);

struct ExtractedBlock {
  BitVector payload_bits;
  bool crc_ok = false;
};

/// Inverse of the block layout. Throws FramingError on a wrong length.
ExtractedBlock extract_and_check(std::span<const std::uint8_t> received_bits,
                                 std::size_t codeword_size, const CrcSpec& spec,
                                 int k, int n_t);

} // namespace mimosim

#endif // MIMOSIM_FRAMING_HPP
