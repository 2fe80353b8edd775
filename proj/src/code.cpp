#include "hsrc/code.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_set>

#include "hsrc/bits.hpp"
#include "hsrc/errors.hpp"
#include "hsrc/gf2.hpp"

namespace hsrc {

namespace {

void require_field(const Field& expected, const Element& e, const char* what) {
  if (!expected.same_as(e.field())) {
    throw std::invalid_argument(std::string("field mismatch in ") + what);
  }
}

int parity64(const std::vector<std::uint64_t>& row, const std::vector<std::uint64_t>& v) {
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < v.size(); ++w) acc ^= row[w] & v[w];
  return std::popcount(acc) & 1;
}

}  // namespace

LinearizedPoly::LinearizedPoly(std::vector<Element> coeffs, unsigned step)
    : coeffs_(std::move(coeffs)), step_(step) {
  if (coeffs_.size() < 2) throw std::invalid_argument("need at least 2 coefficients");
  if (step_ < 2 || !std::has_single_bit(step_)) {
    throw std::invalid_argument("step must be a power of two >= 2");
  }
  const Field& f = coeffs_.front().field();
  for (const Element& c : coeffs_) require_field(f, c, "polynomial coefficients");
  const int l = std::bit_width(step_) - 1;
  if (l > 1 && f.degree() % l != 0) {
    throw std::invalid_argument("step 2^" + std::to_string(l) + " requires " +
                                std::to_string(l) + " to divide m=" +
                                std::to_string(f.degree()));
  }
}

Element LinearizedPoly::operator()(const Element& x) const {
  const Field& f = coeffs_.front().field();
  require_field(f, x, "polynomial evaluation");
  Element acc = f.zero();
  Element cur = x;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    acc += coeffs_[i] * cur;
    if (i + 1 < coeffs_.size()) cur = cur.pow(step_);
  }
  return acc;
}

Code::Code(std::shared_ptr<const Field> field, int k, std::vector<Element> points,
           std::vector<Element> basis)
    : field_(std::move(field)), k_(k), points_(std::move(points)), basis_(std::move(basis)) {
  const int n = static_cast<int>(points_.size());
  if (k_ < 2) throw std::invalid_argument("k must be at least 2");
  if (k_ >= n) throw std::invalid_argument("k=" + std::to_string(k_) +
                                           " must be smaller than n=" + std::to_string(n));
  const std::uint64_t nmax = field_->order();
  if (static_cast<std::uint64_t>(n) > nmax) {
    throw std::invalid_argument("n=" + std::to_string(n) + " exceeds 2^m-1=" +
                                std::to_string(nmax));
  }
  // 2^{k-1} + 1 evaluation points must exist for interpolation.
  if (k_ - 1 >= 63 || (1ull << (k_ - 1)) + 1 > nmax) {
    const std::string lhs = k_ - 1 < 63 ? std::to_string((1ull << (k_ - 1)) + 1)
                                        : ("2^" + std::to_string(k_ - 1) + "+1");
    throw std::invalid_argument(lhs + " exceeds 2^m-1=" + std::to_string(nmax));
  }
  for (int i = 0; i < n; ++i) {
    require_field(*field_, points_[i], "evaluation points");
    if (points_[i].is_zero()) throw std::invalid_argument("evaluation points must be nonzero");
    if (!index_.emplace(points_[i].bits(), i + 1).second) {
      throw std::invalid_argument("duplicate evaluation point");
    }
  }
}

Code Code::subspace(Field field, int k, int dimension) {
  auto fp = std::make_shared<const Field>(std::move(field));
  if (dimension < 1 || dimension > fp->degree()) {
    throw std::invalid_argument("subspace dimension must be in [1, m]");
  }
  std::vector<Element> basis;
  basis.reserve(dimension);
  for (int j = 0; j < dimension; ++j) basis.push_back(fp->element(1u << j));
  std::vector<Element> points = subspace_points(basis);
  return Code(std::move(fp), k, std::move(points), std::move(basis));
}

Code Code::from_points(Field field, int k, const std::vector<std::uint32_t>& point_bits) {
  auto fp = std::make_shared<const Field>(std::move(field));
  std::vector<Element> points;
  points.reserve(point_bits.size());
  for (std::uint32_t b : point_bits) points.push_back(fp->element(b));

  // Detect full punctured-subspace structure under the given order.
  gf2::Basis32 span;
  std::vector<Element> basis;
  std::unordered_set<std::uint32_t> seen;
  for (const Element& p : points) {
    if (span.insert(p.bits())) basis.push_back(p);
    seen.insert(p.bits());
  }
  bool is_subspace = points.size() + 1 == (1u << basis.size());
  if (is_subspace) {
    for (std::uint32_t mask = 1; mask < (1u << basis.size()) && is_subspace; ++mask) {
      std::uint32_t bits = 0;
      for (std::size_t j = 0; j < basis.size(); ++j) {
        if ((mask >> j) & 1u) bits ^= basis[j].bits();
      }
      is_subspace = seen.count(bits) != 0;
    }
  }
  if (!is_subspace) basis.clear();
  return Code(std::move(fp), k, std::move(points), std::move(basis));
}

const Element& Code::point(int index) const {
  if (index < 1 || index > n()) throw std::invalid_argument("fragment index out of range");
  return points_[index - 1];
}

std::optional<int> Code::index_of(std::uint32_t point_bits) const {
  const auto it = index_.find(point_bits);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<ObjectStripe> split_object(std::span<const std::uint8_t> bytes,
                                       std::size_t bit_count, int k, const Field& field) {
  if (bit_count > bytes.size() * 8) throw std::invalid_argument("bit_count exceeds input");
  const int m = field.degree();
  const std::size_t stripe_bits = static_cast<std::size_t>(k) * m;
  const std::size_t stripes = bit_count == 0 ? 0 : (bit_count + stripe_bits - 1) / stripe_bits;
  std::vector<ObjectStripe> out;
  out.reserve(stripes);
  BitReader reader(bytes, bit_count);
  for (std::size_t s = 0; s < stripes; ++s) {
    ObjectStripe stripe;
    stripe.reserve(k);
    for (int j = 0; j < k; ++j) stripe.push_back(field.element(reader.get(m)));
    out.push_back(std::move(stripe));
  }
  return out;
}

std::vector<std::uint8_t> join_stripes(const std::vector<ObjectStripe>& stripes,
                                       std::size_t byte_count) {
  BitWriter writer;
  for (const ObjectStripe& stripe : stripes) {
    for (const Element& e : stripe) writer.put(e.bits(), e.field().degree());
  }
  if (writer.bit_count() < byte_count * 8) {
    throw std::invalid_argument("stripes hold fewer bits than requested");
  }
  std::vector<std::uint8_t> bytes = writer.take();
  bytes.resize(byte_count);
  return bytes;
}

std::vector<Element> encode(const ObjectStripe& stripe, const Code& code) {
  if (static_cast<int>(stripe.size()) != code.k()) {
    throw std::invalid_argument("stripe must hold exactly k symbols");
  }
  LinearizedPoly poly(stripe);
  std::vector<Element> values;
  values.reserve(code.n());
  for (const Element& point : code.points()) values.push_back(poly(point));
  return values;
}

std::vector<Fragment> encode_object(std::span<const std::uint8_t> bytes, const Code& code) {
  const Field& f = code.field();
  const int m = f.degree();
  const int k = code.k();
  const int n = code.n();
  const std::size_t bit_count = bytes.size() * 8;
  const std::size_t stripe_bits = static_cast<std::size_t>(k) * m;
  const std::size_t stripes = bit_count == 0 ? 0 : (bit_count + stripe_bits - 1) / stripe_bits;

  // value_i = sum_j stripe[j] * alpha_i^(2^j); the point powers are fixed.
  std::vector<std::uint32_t> powers(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      powers[static_cast<std::size_t>(i) * k + j] =
          f.pow_bits(code.points()[i].bits(), 1ull << j);
    }
  }

  std::vector<Fragment> fragments;
  fragments.reserve(n);
  for (int i = 0; i < n; ++i) {
    Fragment frag{i + 1, code.points()[i], {}};
    frag.values.reserve(stripes);
    fragments.push_back(std::move(frag));
  }

  BitReader reader(bytes, bit_count);
  std::vector<std::uint32_t> symbols(k);
  for (std::size_t s = 0; s < stripes; ++s) {
    for (int j = 0; j < k; ++j) symbols[j] = reader.get(m);
    for (int i = 0; i < n; ++i) {
      std::uint32_t v = 0;
      for (int j = 0; j < k; ++j) {
        v ^= f.mul_bits(symbols[j], powers[static_cast<std::size_t>(i) * k + j]);
      }
      fragments[i].values.push_back(v);
    }
  }
  return fragments;
}

std::vector<std::uint8_t> decode_object(const std::vector<Fragment>& available,
                                        const Code& code, std::size_t byte_count) {
  if (available.empty()) throw UnrecoverableError(0, code.k());
  if (byte_count == 0) return {};
  const std::size_t stripes = available.front().values.size();
  std::vector<Element> points;
  points.reserve(available.size());
  for (const Fragment& frag : available) {
    if (frag.values.size() != stripes) {
      throw std::invalid_argument("fragments disagree on stripe count");
    }
    points.push_back(frag.point);
  }
  LinearDecoder decoder(code, points);
  BitWriter writer;
  std::vector<std::uint32_t> values(available.size());
  for (std::size_t s = 0; s < stripes; ++s) {
    for (std::size_t i = 0; i < available.size(); ++i) values[i] = available[i].values[s];
    const ObjectStripe stripe = decoder.solve(values);
    for (const Element& e : stripe) writer.put(e.bits(), code.field().degree());
  }
  if (writer.bit_count() < byte_count * 8) {
    throw std::invalid_argument("object length exceeds decoded payload");
  }
  std::vector<std::uint8_t> bytes = writer.take();
  bytes.resize(byte_count);
  return bytes;
}

std::vector<std::pair<Element, Element>> expand_span(const std::vector<Fragment>& available,
                                                     std::size_t stripe) {
  if (available.empty()) return {};
  const Field& f = available.front().point.field();
  gf2::Basis32 span;
  std::vector<const Fragment*> independent;
  std::unordered_set<std::uint32_t> seen;
  for (const Fragment& frag : available) {
    require_field(f, frag.point, "expand_span");
    if (!seen.insert(frag.point.bits()).second) {
      throw std::invalid_argument("duplicate fragment points");
    }
    if (stripe >= frag.values.size()) throw std::invalid_argument("stripe index out of range");
    if (span.insert(frag.point.bits())) independent.push_back(&frag);
  }
  const int r = static_cast<int>(independent.size());
  std::vector<std::pair<Element, Element>> pairs;
  pairs.reserve((1u << r) - 1);
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    std::uint32_t point_bits = 0;
    std::uint32_t value_bits = 0;
    for (int j = 0; j < r; ++j) {
      if ((mask >> j) & 1u) {
        point_bits ^= independent[j]->point.bits();
        value_bits ^= independent[j]->values[stripe];
      }
    }
    pairs.emplace_back(f.element(point_bits), f.element(value_bits));
  }
  return pairs;
}

LinearDecoder::LinearDecoder(const Code& code, const std::vector<Element>& points)
    : field_(code.field_ptr()), k_(code.k()), m_(field_->degree()), x_(points.size()) {
  std::vector<std::uint32_t> point_bits;
  point_bits.reserve(x_);
  for (const Element& p : points) {
    require_field(*field_, p, "decoder points");
    point_bits.push_back(p.bits());
  }
  point_rank_ = gf2::rank(point_bits);
  if (point_rank_ < k_) throw UnrecoverableError(point_rank_, k_);

  // Bit-level system: fragment value bits are GF(2)-linear in the k*m object
  // bits. Augment with an identity to record the elimination, then Jordan-
  // reduce; the k independent points make the coefficient block full rank.
  const std::size_t unknowns = static_cast<std::size_t>(k_) * m_;
  const std::size_t equations = x_ * m_;
  const std::size_t width = unknowns + equations;
  const std::size_t words = (width + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows(equations,
                                               std::vector<std::uint64_t>(words, 0));
  for (std::size_t fidx = 0; fidx < x_; ++fidx) {
    for (int i = 0; i < k_; ++i) {
      const std::uint32_t alpha_pow = field_->pow_bits(point_bits[fidx], 1ull << i);
      for (int t = 0; t < m_; ++t) {
        const std::uint32_t g = field_->mul_bits(1u << t, alpha_pow);
        for (int b = 0; b < m_; ++b) {
          if ((g >> b) & 1u) {
            const std::size_t row = fidx * m_ + b;
            const std::size_t col = static_cast<std::size_t>(i) * m_ + t;
            rows[row][col / 64] ^= 1ull << (col % 64);
          }
        }
      }
    }
    for (int b = 0; b < m_; ++b) {
      const std::size_t row = fidx * m_ + b;
      const std::size_t col = unknowns + row;
      rows[row][col / 64] ^= 1ull << (col % 64);
    }
  }

  auto get_bit = [&](const std::vector<std::uint64_t>& row, std::size_t c) {
    return (row[c / 64] >> (c % 64)) & 1ull;
  };
  std::size_t cursor = 0;
  for (std::size_t c = 0; c < unknowns; ++c) {
    std::size_t pivot = cursor;
    while (pivot < equations && !get_bit(rows[pivot], c)) ++pivot;
    if (pivot == equations) throw std::logic_error("decoder system lost rank");
    std::swap(rows[cursor], rows[pivot]);
    for (std::size_t r = 0; r < equations; ++r) {
      if (r != cursor && get_bit(rows[r], c)) {
        for (std::size_t w = 0; w < words; ++w) rows[r][w] ^= rows[cursor][w];
      }
    }
    ++cursor;
  }

  // Row c now expresses unknown c through the value bits; rows past the
  // pivots are pure consistency constraints.
  const std::size_t value_words = (equations + 63) / 64;
  auto value_mask = [&](const std::vector<std::uint64_t>& row) {
    std::vector<std::uint64_t> mask(value_words, 0);
    for (std::size_t c = 0; c < equations; ++c) {
      if (get_bit(row, unknowns + c)) mask[c / 64] |= 1ull << (c % 64);
    }
    return mask;
  };
  solution_.reserve(unknowns);
  for (std::size_t c = 0; c < unknowns; ++c) solution_.push_back(value_mask(rows[c]));
  for (std::size_t r = unknowns; r < equations; ++r) checks_.push_back(value_mask(rows[r]));
}

ObjectStripe LinearDecoder::solve(std::span<const std::uint32_t> values) const {
  if (values.size() != x_) throw std::invalid_argument("value count does not match points");
  const std::size_t equations = x_ * m_;
  std::vector<std::uint64_t> v((equations + 63) / 64, 0);
  for (std::size_t f = 0; f < x_; ++f) {
    if (values[f] >= field_->size()) throw std::invalid_argument("value out of field range");
    for (int b = 0; b < m_; ++b) {
      if ((values[f] >> b) & 1u) {
        const std::size_t pos = f * m_ + b;
        v[pos / 64] |= 1ull << (pos % 64);
      }
    }
  }
  for (const auto& check : checks_) {
    if (parity64(check, v)) {
      throw CorruptFragmentsError("values are inconsistent with every encodable stripe");
    }
  }
  ObjectStripe stripe;
  stripe.reserve(k_);
  for (int i = 0; i < k_; ++i) {
    std::uint32_t bits = 0;
    for (int t = 0; t < m_; ++t) {
      if (parity64(solution_[static_cast<std::size_t>(i) * m_ + t], v)) bits |= 1u << t;
    }
    stripe.push_back(field_->element(bits));
  }
  return stripe;
}

namespace {

std::vector<Element> stripe_points(const std::vector<Fragment>& available, const Code& code,
                                   std::size_t stripe) {
  std::vector<Element> points;
  points.reserve(available.size());
  for (const Fragment& frag : available) {
    const auto idx = code.index_of(frag.point.bits());
    if (!idx || *idx != frag.index) {
      throw std::invalid_argument("fragment point/index does not belong to the code");
    }
    if (stripe >= frag.values.size()) throw std::invalid_argument("stripe index out of range");
    points.push_back(frag.point);
  }
  return points;
}

}  // namespace

ObjectStripe decode_linear(const std::vector<Fragment>& available, const Code& code,
                           std::size_t stripe) {
  if (available.empty()) throw UnrecoverableError(0, code.k());
  const std::vector<Element> points = stripe_points(available, code, stripe);
  LinearDecoder decoder(code, points);
  std::vector<std::uint32_t> values;
  values.reserve(available.size());
  for (const Fragment& frag : available) values.push_back(frag.values[stripe]);
  return decoder.solve(values);
}

ObjectStripe decode_interpolate(const std::vector<Fragment>& available, const Code& code,
                                std::size_t stripe) {
  const Field& f = code.field();
  const int k = code.k();
  if (available.empty()) throw UnrecoverableError(0, code.k());
  stripe_points(available, code, stripe);

  {
    std::vector<std::uint32_t> bits;
    for (const Fragment& frag : available) bits.push_back(frag.point.bits());
    const int rank = gf2::rank(bits);
    if (rank < k) throw UnrecoverableError(rank, k);
  }

  // Expand the whole span and interpolate through 2^{k-1}+1 of its points.
  // Points of single fragments come first: sampling more than k independent
  // directions is what lets the coefficient check catch corrupt values.
  std::vector<std::pair<Element, Element>> expanded = expand_span(available, stripe);
  std::vector<std::pair<Element, Element>> samples;
  std::vector<std::pair<Element, Element>> combos;
  for (std::size_t mask = 1; mask <= expanded.size(); ++mask) {
    if (std::has_single_bit(mask)) {
      samples.push_back(expanded[mask - 1]);
    } else {
      combos.push_back(expanded[mask - 1]);
    }
  }
  std::sort(combos.begin(), combos.end(), [](const auto& a, const auto& b) {
    return a.first.bits() < b.first.bits();
  });
  const std::size_t needed = (1ull << (k - 1)) + 1;
  for (std::size_t i = 0; samples.size() < needed; ++i) samples.push_back(combos[i]);
  samples.erase(samples.begin() + static_cast<std::ptrdiff_t>(
                    std::min(needed, samples.size())),
                samples.end());

  // Lagrange through the selected points; characteristic 2, so subtraction
  // is addition throughout.
  std::vector<std::uint32_t> master(needed + 1, 0);  // prod (X + x_j)
  master[0] = 1;
  std::size_t deg = 0;
  for (const auto& [x, y] : samples) {
    (void)y;
    std::vector<std::uint32_t> next(deg + 2, 0);
    for (std::size_t i = 0; i <= deg; ++i) {
      next[i + 1] ^= master[i];
      next[i] ^= f.mul_bits(master[i], x.bits());
    }
    for (std::size_t i = 0; i <= deg + 1; ++i) master[i] = next[i];
    ++deg;
  }

  std::vector<std::uint32_t> coeffs(needed, 0);
  std::vector<std::uint32_t> quotient(needed, 0);
  for (const auto& [x, y] : samples) {
    // quotient = master / (X + x_j), by synthetic division.
    std::uint32_t carry = 0;
    for (std::size_t i = needed; i-- > 0;) {
      carry = master[i + 1] ^ f.mul_bits(carry, x.bits());
      quotient[i] = carry;
    }
    // Evaluate quotient at x_j (Horner).
    std::uint32_t denom = 0;
    for (std::size_t i = needed; i-- > 0;) denom = f.mul_bits(denom, x.bits()) ^ quotient[i];
    const std::uint32_t scale = f.mul_bits(y.bits(), f.inv_bits(denom));
    for (std::size_t i = 0; i < needed; ++i) coeffs[i] ^= f.mul_bits(scale, quotient[i]);
  }

  ObjectStripe stripe_out;
  stripe_out.reserve(k);
  for (int i = 0; i < k; ++i) stripe_out.push_back(f.element(coeffs[1ull << i]));
  for (std::size_t degree = 0; degree < needed; ++degree) {
    if (coeffs[degree] != 0 && !(std::has_single_bit(degree) && degree <= (1ull << (k - 1)))) {
      throw CorruptFragmentsError("nonzero coefficient at degree " + std::to_string(degree));
    }
  }
  return stripe_out;
}

}  // namespace hsrc
