#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace hsrc {

// On-disk fragment layout (all integers little-endian):
//   magic "HSRC" | version u8 = 1 | m u8 | modulus u32 | k u8 | n u16 |
//   index u16 | point u32 | object length in bytes u64 | stripe count u32 |
//   payload: stripe values packed m bits each, LSB-first, zero-padded to a
//   byte boundary.
struct FragmentFileHeader {
  std::uint8_t version = 1;
  std::uint8_t degree = 0;  // m
  std::uint32_t modulus = 0;
  std::uint8_t k = 0;
  std::uint16_t n = 0;
  std::uint16_t index = 0;
  std::uint32_t point = 0;
  std::uint64_t object_bytes = 0;
  std::uint32_t stripe_count = 0;
};

inline constexpr std::size_t kFragmentHeaderSize = 31;
inline constexpr char kFragmentMagic[4] = {'H', 'S', 'R', 'C'};

void write_fragment_file(const std::filesystem::path& path, const FragmentFileHeader& header,
                         const std::vector<std::uint32_t>& values);

// Throws FormatError on malformed or self-inconsistent files.
std::pair<FragmentFileHeader, std::vector<std::uint32_t>> read_fragment_file(
    const std::filesystem::path& path);

}  // namespace hsrc
