#include "hsrc/field.hpp"

#include <bit>
#include <cstdio>
#include <stdexcept>

#include "hsrc/gf2.hpp"

namespace hsrc {

namespace {

std::string hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

int poly_degree(std::uint64_t p) { return p == 0 ? -1 : std::bit_width(p) - 1; }

// Remainder of a / b in GF(2)[x].
std::uint64_t poly_mod(std::uint64_t a, std::uint64_t b) {
  const int db = poly_degree(b);
  while (poly_degree(a) >= db) a ^= b << (poly_degree(a) - db);
  return a;
}

void check_same_field(const Field& a, const Field& b) {
  if (!a.same_as(b)) {
    throw std::invalid_argument("field mismatch: GF(2^" + std::to_string(a.degree()) + ")/" +
                                hex(a.modulus()) + " vs GF(2^" + std::to_string(b.degree()) +
                                ")/" + hex(b.modulus()));
  }
}

}  // namespace

Element::Element(const Field& field, std::uint32_t bits) : field_(&field), bits_(bits) {
  if (bits >= field.size()) {
    throw std::invalid_argument("element " + hex(bits) + " out of range for GF(2^" +
                                std::to_string(field.degree()) + ")");
  }
}

Element Element::inverse() const { return Element(*field_, field_->inv_bits(bits_)); }

Element Element::pow(std::uint64_t exponent) const {
  return Element(*field_, field_->pow_bits(bits_, exponent));
}

Element& Element::operator+=(const Element& rhs) {
  check_same_field(*field_, *rhs.field_);
  bits_ ^= rhs.bits_;
  return *this;
}

Element& Element::operator*=(const Element& rhs) {
  check_same_field(*field_, *rhs.field_);
  bits_ = field_->mul_bits(bits_, rhs.bits_);
  return *this;
}

bool operator==(const Element& a, const Element& b) {
  return a.field_->same_as(*b.field_) && a.bits_ == b.bits_;
}

Field::Field(int degree, std::uint32_t modulus, std::uint32_t generator)
    : degree_(degree), modulus_(modulus), generator_(generator) {
  if (degree < kMinDegree || degree > kMaxDegree) {
    throw std::invalid_argument("field degree must be in [" + std::to_string(kMinDegree) +
                                ", " + std::to_string(kMaxDegree) + "], got " +
                                std::to_string(degree));
  }
  const std::uint64_t q = 1ull << degree;
  order_ = q - 1;
  if (modulus >> degree != 1u) {
    throw std::invalid_argument("modulus " + hex(modulus) +
                                " is not monic of degree " + std::to_string(degree));
  }
  // Trial division against everything of degree <= m/2; the first (and thus
  // lowest-degree) divisor found is irreducible itself.
  for (std::uint64_t g = 2; g < (1ull << (degree / 2 + 1)); ++g) {
    if (poly_mod(modulus, g) == 0) {
      throw std::invalid_argument("modulus " + hex(modulus) + " is reducible: divisible by " +
                                  hex(g));
    }
  }
  if (generator == 0 || generator >= q) {
    throw std::invalid_argument("generator " + hex(generator) + " out of range");
  }

  if (degree <= 16) {
    exp_.resize(2 * order_);
    log_.assign(q, 0);
    std::uint32_t cur = 1;
    for (std::uint64_t e = 0; e < order_; ++e) {
      if (cur == 1 && e > 0) {
        throw std::invalid_argument("generator " + hex(generator) +
                                    " is not primitive: order " + std::to_string(e));
      }
      exp_[e] = static_cast<std::uint16_t>(cur);
      log_[cur] = static_cast<std::uint16_t>(e);
      cur = clmul_mod(cur, generator);
    }
    if (cur != 1) throw std::logic_error("generator walk did not close");
    for (std::uint64_t e = 0; e < order_; ++e) exp_[order_ + e] = exp_[e];
  } else {
    std::uint32_t cur = generator;
    std::uint64_t ord = 1;
    while (cur != 1) {
      cur = clmul_mod(cur, generator);
      if (++ord > order_) throw std::logic_error("generator walk did not close");
    }
    if (ord != order_) {
      throw std::invalid_argument("generator " + hex(generator) + " is not primitive: order " +
                                  std::to_string(ord));
    }
  }
}

std::optional<std::uint32_t> Field::default_modulus(int degree) {
  switch (degree) {
    case 2: return 0x7u;        // x^2+x+1
    case 4: return 0x13u;       // x^4+x+1
    case 8: return 0x11Du;      // x^8+x^4+x^3+x^2+1
    case 16: return 0x1100Bu;   // x^16+x^12+x^3+x+1
    default: return std::nullopt;
  }
}

Field Field::with_default_modulus(int degree) {
  const auto mod = default_modulus(degree);
  if (!mod) {
    throw std::invalid_argument("no built-in modulus for m=" + std::to_string(degree) +
                                "; pass one explicitly");
  }
  return Field(degree, *mod);
}

Element Field::element(std::uint32_t bits) const { return Element(*this, bits); }

std::uint32_t Field::clmul_mod(std::uint32_t a, std::uint32_t b) const {
  std::uint64_t acc = 0;
  std::uint64_t aa = a;
  for (std::uint32_t bb = b; bb != 0; bb >>= 1, aa <<= 1) {
    if (bb & 1u) acc ^= aa;
  }
  while (acc >> degree_) {
    const int d = std::bit_width(acc) - 1;
    acc ^= static_cast<std::uint64_t>(modulus_) << (d - degree_);
  }
  return static_cast<std::uint32_t>(acc);
}

std::uint32_t Field::mul_bits(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  if (!exp_.empty()) return exp_[static_cast<std::size_t>(log_[a]) + log_[b]];
  return clmul_mod(a, b);
}

std::uint32_t Field::pow_bits(std::uint32_t base, std::uint64_t exponent) const {
  if (base == 0) {
    if (exponent == 0) throw std::domain_error("pow(0, 0) is undefined");
    return 0;
  }
  const std::uint64_t e = exponent % order_;
  if (!exp_.empty()) return exp_[log_[base] * e % order_];
  std::uint32_t result = 1;
  std::uint32_t b = base;
  for (std::uint64_t ee = e; ee != 0; ee >>= 1) {
    if (ee & 1u) result = clmul_mod(result, b);
    b = clmul_mod(b, b);
  }
  return result;
}

std::uint32_t Field::inv_bits(std::uint32_t a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  if (!exp_.empty()) return exp_[(order_ - log_[a]) % order_];
  return pow_bits(a, order_ - 1);
}

std::vector<Element> subspace_points(const std::vector<Element>& basis) {
  if (basis.empty()) throw std::invalid_argument("empty basis");
  const Field& f = basis.front().field();
  gf2::Basis32 span;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    check_same_field(f, basis[i].field());
    if (!span.insert(basis[i].bits())) {
      throw std::invalid_argument("dependent basis: element " + std::to_string(i) +
                                  " lies in the span of the previous ones");
    }
  }
  const int d = static_cast<int>(basis.size());
  std::vector<Element> points;
  points.reserve((1u << d) - 1);
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    std::uint32_t bits = 0;
    for (int j = 0; j < d; ++j) {
      if ((mask >> j) & 1u) bits ^= basis[j].bits();
    }
    points.push_back(f.element(bits));
  }
  return points;
}

}  // namespace hsrc
