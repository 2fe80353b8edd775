#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hsrc {

// LSB-first bit packing: bit i of a stream lives in byte i/8 at position
// i%8. This is the one serialization convention used everywhere (object
// striping and fragment payloads).
class BitWriter {
 public:
  void put(std::uint32_t value, int nbits) {
    const std::size_t need = (bits_ + nbits + 7) / 8;
    if (bytes_.size() < need) bytes_.resize(need, 0);
    for (int b = 0; b < nbits; ++b, ++bits_) {
      if ((value >> b) & 1u) bytes_[bits_ / 8] |= static_cast<std::uint8_t>(1u << (bits_ % 8));
    }
  }

  std::size_t bit_count() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

// Reads past the declared bit count as zeros, which is exactly the padding
// rule for partial trailing stripes.
class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_count)
      : bytes_(bytes), bit_count_(bit_count) {}

  std::uint32_t get(int nbits) {
    std::uint32_t v = 0;
    for (int b = 0; b < nbits; ++b, ++pos_) {
      if (pos_ < bit_count_ && ((bytes_[pos_ / 8] >> (pos_ % 8)) & 1u)) v |= 1u << b;
    }
    return v;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t bit_count_;
  std::size_t pos_ = 0;
};

}  // namespace hsrc
