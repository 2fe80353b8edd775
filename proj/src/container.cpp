#include "hsrc/container.hpp"

#include <cstring>
#include <fstream>

#include "hsrc/bits.hpp"
#include "hsrc/errors.hpp"

namespace hsrc {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& what) {
  throw FormatError("malformed fragment file " + path.string() + ": " + what);
}

}  // namespace

void write_fragment_file(const std::filesystem::path& path, const FragmentFileHeader& header,
                         const std::vector<std::uint32_t>& values) {
  if (values.size() != header.stripe_count) {
    throw std::invalid_argument("stripe count does not match value count");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kFragmentHeaderSize + (values.size() * header.degree + 7) / 8);
  out.insert(out.end(), kFragmentMagic, kFragmentMagic + 4);
  out.push_back(header.version);
  out.push_back(header.degree);
  put_u32(out, header.modulus);
  out.push_back(header.k);
  put_u16(out, header.n);
  put_u16(out, header.index);
  put_u32(out, header.point);
  put_u64(out, header.object_bytes);
  put_u32(out, header.stripe_count);

  BitWriter payload;
  for (std::uint32_t v : values) payload.put(v, header.degree);
  const auto& bytes = payload.bytes();
  out.insert(out.end(), bytes.begin(), bytes.end());

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw FormatError("cannot open " + path.string() + " for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw FormatError("short write to " + path.string());
}

std::pair<FragmentFileHeader, std::vector<std::uint32_t>> read_fragment_file(
    const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(file)),
                                 std::istreambuf_iterator<char>());

  if (data.size() < kFragmentHeaderSize) malformed(path, "truncated header");
  if (std::memcmp(data.data(), kFragmentMagic, 4) != 0) malformed(path, "bad magic");

  FragmentFileHeader h;
  h.version = data[4];
  h.degree = data[5];
  h.modulus = static_cast<std::uint32_t>(get_le(&data[6], 4));
  h.k = data[10];
  h.n = static_cast<std::uint16_t>(get_le(&data[11], 2));
  h.index = static_cast<std::uint16_t>(get_le(&data[13], 2));
  h.point = static_cast<std::uint32_t>(get_le(&data[15], 4));
  h.object_bytes = get_le(&data[19], 8);
  h.stripe_count = static_cast<std::uint32_t>(get_le(&data[27], 4));

  if (h.version != 1) malformed(path, "unsupported version " + std::to_string(h.version));
  if (h.degree < 2 || h.degree > 20) malformed(path, "field degree out of range");
  if ((h.modulus >> h.degree) != 1u) malformed(path, "modulus degree mismatch");
  if (h.k < 2) malformed(path, "k out of range");
  if (h.index < 1 || h.index > h.n) malformed(path, "fragment index out of range");
  if (h.point == 0 || (h.point >> h.degree) != 0) malformed(path, "evaluation point out of range");

  const std::size_t payload_bytes =
      (static_cast<std::size_t>(h.stripe_count) * h.degree + 7) / 8;
  if (data.size() != kFragmentHeaderSize + payload_bytes) {
    malformed(path, "payload length does not match stripe count");
  }

  BitReader reader(std::span<const std::uint8_t>(data).subspan(kFragmentHeaderSize),
                   payload_bytes * 8);
  std::vector<std::uint32_t> values;
  values.reserve(h.stripe_count);
  for (std::uint32_t s = 0; s < h.stripe_count; ++s) values.push_back(reader.get(h.degree));
  return {h, std::move(values)};
}

}  // namespace hsrc
