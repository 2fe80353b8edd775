#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace hsrc {

class Field;

// One element of a binary extension field, stored as its coordinate bits in
// the polynomial basis {1, w, ..., w^{m-1}} (bit j is the coefficient of
// w^j). Elements borrow their field; the Field must outlive them.
class Element {
 public:
  Element(const Field& field, std::uint32_t bits);

  std::uint32_t bits() const { return bits_; }
  const Field& field() const { return *field_; }
  bool is_zero() const { return bits_ == 0; }

  Element inverse() const;
  Element pow(std::uint64_t exponent) const;

  Element& operator+=(const Element& rhs);
  Element& operator*=(const Element& rhs);
  friend Element operator+(Element lhs, const Element& rhs) { return lhs += rhs; }
  friend Element operator*(Element lhs, const Element& rhs) { return lhs *= rhs; }

  friend bool operator==(const Element& a, const Element& b);
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

 private:
  const Field* field_;
  std::uint32_t bits_;
};

// GF(2^m) with an explicit monic irreducible modulus and a multiplicative
// generator. Construction verifies irreducibility (trial division) and that
// the generator's order is exactly 2^m - 1; both stay sub-second for m <= 20.
// Log/antilog tables back multiplication when m <= 16.
//
// Immutable after construction; all operations are pure and safe to call
// concurrently.
class Field {
 public:
  static constexpr int kMinDegree = 2;
  static constexpr int kMaxDegree = 20;

  Field(int degree, std::uint32_t modulus, std::uint32_t generator = 2);

  // Built-in primitive modulus for m in {2, 4, 8, 16}; nullopt otherwise.
  static std::optional<std::uint32_t> default_modulus(int degree);
  static Field with_default_modulus(int degree);

  int degree() const { return degree_; }            // m
  std::uint64_t size() const { return order_ + 1; } // q = 2^m
  std::uint64_t order() const { return order_; }    // q - 1
  std::uint32_t modulus() const { return modulus_; }

  Element element(std::uint32_t bits) const;
  Element zero() const { return Element(*this, 0); }
  Element one() const { return Element(*this, 1); }
  Element generator() const { return Element(*this, generator_); }

  // Same field up to representation: equal degree and modulus.
  bool same_as(const Field& other) const {
    return degree_ == other.degree_ && modulus_ == other.modulus_;
  }

  // Raw-coordinate arithmetic for hot paths.
  std::uint32_t add_bits(std::uint32_t a, std::uint32_t b) const { return a ^ b; }
  std::uint32_t mul_bits(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t pow_bits(std::uint32_t base, std::uint64_t exponent) const;
  std::uint32_t inv_bits(std::uint32_t a) const;

 private:
  std::uint32_t clmul_mod(std::uint32_t a, std::uint32_t b) const;

  int degree_;
  std::uint32_t modulus_;
  std::uint32_t generator_;
  std::uint64_t order_;
  std::vector<std::uint16_t> log_;  // index: element bits, valid for bits != 0
  std::vector<std::uint16_t> exp_;  // doubled so log sums index directly
};

// The 2^d - 1 nonzero GF(2)-combinations of d independent basis elements, in
// binary-counting order of the coefficient vector (bit j of the counter
// selects basis[j]). Throws on a dependent basis.
std::vector<Element> subspace_points(const std::vector<Element>& basis);

}  // namespace hsrc
