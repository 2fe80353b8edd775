#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>

namespace hsrc::gf2 {

// Incremental row basis over GF(2) for vectors of at most 32 bits.
// Rows are kept in echelon form by leading bit.
class Basis32 {
 public:
  // Residual of v after elimination against the stored rows.
  std::uint32_t reduce(std::uint32_t v) const {
    while (v != 0) {
      const int lead = std::bit_width(v) - 1;
      if (rows_[lead] == 0) break;
      v ^= rows_[lead];
    }
    return v;
  }

  bool contains(std::uint32_t v) const { return reduce(v) == 0; }

  // Returns true when v was independent of the rows already stored.
  bool insert(std::uint32_t v) {
    v = reduce(v);
    if (v == 0) return false;
    rows_[std::bit_width(v) - 1] = v;
    ++size_;
    return true;
  }

  int size() const { return size_; }

 private:
  std::array<std::uint32_t, 32> rows_{};
  int size_ = 0;
};

inline int rank(std::span<const std::uint32_t> rows) {
  Basis32 b;
  for (std::uint32_t r : rows) b.insert(r);
  return b.size();
}

}  // namespace hsrc::gf2
