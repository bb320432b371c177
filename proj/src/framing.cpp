#include "mimosim/framing.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

#include "mimosim/errors.hpp"

namespace mimosim {

CrcSpec::CrcSpec(std::string_view generator_bits) {
  if (generator_bits.size() < 2) {
    throw InvalidParameter("crc_generator: need at least 2 bits, got '" +
                           std::string(generator_bits) + "'");
  }
  for (char c : generator_bits) {
    if (c != '0' && c != '1') {
      throw InvalidParameter("crc_generator: not a binary string '" +
                             std::string(generator_bits) + "'");
    }
    generator_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (generator_.front() != 1 || generator_.back() != 1) {
    throw InvalidParameter("crc_generator: leading and trailing coefficients "
                           "must be 1, got '" + std::string(generator_bits) + "'");
  }
}

CrcSpec CrcSpec::default_for_length(int crc_length) {
  // Common low-degree generators; x^2+x+1 is the only primitive quadratic.
  switch (crc_length) {
    case 1: return CrcSpec("11");
    case 2: return CrcSpec("111");
    case 3: return CrcSpec("1011");
    case 4: return CrcSpec("10011");
    case 5: return CrcSpec("100101");
    case 6: return CrcSpec("1000011");
    case 7: return CrcSpec("10001001");
    case 8: return CrcSpec("100000111");
    case 16: return CrcSpec("10001000000100001");
    case 24: return CrcSpec("1100001100100110011111011");
    default:
      throw InvalidParameter("crc_length: no default generator for length " +
                             std::to_string(crc_length) +
                             "; set crc_generator explicitly");
  }
}

BitVector load_payload_bits(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open payload file '" + path.string() + "'");
  }
  const std::vector<char> bytes{std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>()};
  if (in.bad()) {
    throw IoError("error reading payload file '" + path.string() + "'");
  }
  BitVector bits;
  bits.reserve(bytes.size() * 8);
  for (char c : bytes) {
    const auto byte = static_cast<unsigned char>(c);
    for (int b = 7; b >= 0; --b) {
      bits.push_back(static_cast<std::uint8_t>((byte >> b) & 1u));
    }
  }
  return bits;
}

BitVector crc_compute(std::span<const std::uint8_t> bits, const CrcSpec& spec) {
  const auto& g = spec.generator();
  const std::size_t r = static_cast<std::size_t>(spec.length());

  if (r < 64) {
    std::uint64_t poly = 0;
    for (std::size_t i = 1; i <= r; ++i) poly = (poly << 1) | g[i];
    const std::uint64_t mask = r == 63 ? ~0ULL >> 1 : (1ULL << r) - 1;
    std::uint64_t acc = 0;
    auto shift_in = [&](std::uint64_t in) {
      const std::uint64_t top = (acc >> (r - 1)) & 1u;
      acc = ((acc << 1) | in) & mask;
      if (top) acc ^= poly;
    };
    for (std::uint8_t b : bits) shift_in(b & 1u);
    for (std::size_t i = 0; i < r; ++i) shift_in(0);
    BitVector out(r);
    for (std::size_t i = 0; i < r; ++i) out[i] = (acc >> (r - 1 - i)) & 1u;
    return out;
  }

  // Long division of bits * x^r, keeping the r-bit remainder register.
  BitVector reg(r, 0);
  auto step = [&](std::uint8_t in) {
    const std::uint8_t top = reg.front();
    std::rotate(reg.begin(), reg.begin() + 1, reg.end());
    reg.back() = in;
    if (top) {
      for (std::size_t i = 0; i < r; ++i) reg[i] ^= g[i + 1];
    }
  };
  for (std::uint8_t b : bits) step(b & 1u);
  for (std::size_t i = 0; i < r; ++i) step(0);
  return reg;
}

bool crc_verify(std::span<const std::uint8_t> payload_bits,
                std::span<const std::uint8_t> crc_bits, const CrcSpec& spec) {
  if (crc_bits.size() != static_cast<std::size_t>(spec.length())) {
    throw FramingError("crc_verify: expected " + std::to_string(spec.length()) +
                       " CRC bits, got " + std::to_string(crc_bits.size()));
  }
  const BitVector fresh = crc_compute(payload_bits, spec);
  return std::equal(fresh.begin(), fresh.end(), crc_bits.begin());
}

BitVector TransportBlock::bits() const {
  BitVector out;
  out.reserve(total_bits());
  out.insert(out.end(), payload_bits.begin(), payload_bits.end());
  out.insert(out.end(), pad_bits, 0);
  out.insert(out.end(), crc_bits.begin(), crc_bits.end());
  return out;
}

std::size_t transport_block_bits(std::size_t codeword_size, int crc_length,
                                 int k, int n_t) {
  const auto grid = static_cast<std::size_t>(k) * static_cast<std::size_t>(n_t);
  const std::size_t used = codeword_size + static_cast<std::size_t>(crc_length);
  return (used + grid - 1) / grid * grid;
}

TransportBlock make_transport_block(std::span<const std::uint8_t> payload,
                                    const CrcSpec& spec, int k, int n_t,
                                    std::size_t block_index) {
  TransportBlock block;
  block.payload_bits.assign(payload.begin(), payload.end());
  block.crc_bits = crc_compute(payload, spec);
  block.pad_bits = transport_block_bits(payload.size(), spec.length(), k, n_t) -
                   payload.size() - static_cast<std::size_t>(spec.length());
  block.block_index = block_index;
  return block;
}

std::vector<TransportBlock> build_transport_blocks(
    std::span<const std::uint8_t> bits, std::size_t codeword_size,
    const CrcSpec& spec, int k, int n_t) {
  if (codeword_size == 0) {
    throw InvalidParameter("codeword_size: must be at least 1");
  }
  std::vector<TransportBlock> blocks;
  BitVector chunk(codeword_size);
  for (std::size_t start = 0; start < bits.size(); start += codeword_size) {
    const std::size_t n = std::min(codeword_size, bits.size() - start);
    std::fill(chunk.begin(), chunk.end(), 0);
    std::copy_n(bits.begin() + static_cast<std::ptrdiff_t>(start), n, chunk.begin());
    blocks.push_back(make_transport_block(chunk, spec, k, n_t, blocks.size()));
  }
  return blocks;
}

ExtractedBlock extract_and_check(std::span<const std::uint8_t> received_bits,
                                 std::size_t codeword_size, const CrcSpec& spec,
                                 int k, int n_t) {
  const std::size_t expected =
      transport_block_bits(codeword_size, spec.length(), k, n_t);
  if (received_bits.size() != expected) {
    throw FramingError("extract_and_check: expected " + std::to_string(expected) +
                       " bits, got " + std::to_string(received_bits.size()));
  }
  ExtractedBlock out;
  out.payload_bits.assign(received_bits.begin(),
                          received_bits.begin() + static_cast<std::ptrdiff_t>(codeword_size));
  const auto crc = received_bits.last(static_cast<std::size_t>(spec.length()));
  out.crc_ok = crc_verify(out.payload_bits, crc, spec);
  return out;
}

} // namespace mimosim
