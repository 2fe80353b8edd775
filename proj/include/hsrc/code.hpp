#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hsrc/field.hpp"

namespace hsrc {

// A stripe is the k field symbols of one k*m-bit slice of the object.
using ObjectStripe = std::vector<Element>;

// p(X) = sum_i coeffs[i] * X^{s^i} with step s = 2^l. Evaluation is
// GF(2)-linear in X; for l > 1 (which requires l | m) it is linear over the
// subfield of size s.
class LinearizedPoly {
 public:
  explicit LinearizedPoly(std::vector<Element> coeffs, unsigned step = 2);

  Element operator()(const Element& x) const;

  const std::vector<Element>& coeffs() const { return coeffs_; }
  unsigned step() const { return step_; }

 private:
  std::vector<Element> coeffs_;
  unsigned step_;
};

// Parameters of one code instance: the field, the number of data symbols k,
// and the n distinct nonzero evaluation points. When the points are exactly
// the nonzero elements of a d-dimensional subspace (n = 2^d - 1) the basis is
// kept, which is what enables pairwise self-repair.
class Code {
 public:
  // Points are the full punctured subspace spanned by {1, w, ..., w^{d-1}},
  // indexed in binary-counting order.
  static Code subspace(Field field, int k, int dimension);
  // Explicit evaluation points, in the given order. Subspace structure is
  // detected automatically.
  static Code from_points(Field field, int k, const std::vector<std::uint32_t>& point_bits);

  const Field& field() const { return *field_; }
  std::shared_ptr<const Field> field_ptr() const { return field_; }
  int k() const { return k_; }
  int n() const { return static_cast<int>(points_.size()); }

  const std::vector<Element>& points() const { return points_; }
  const Element& point(int index) const;  // 1-based
  std::optional<int> index_of(std::uint32_t point_bits) const;

  bool is_subspace() const { return !basis_.empty(); }
  int dimension() const { return static_cast<int>(basis_.size()); }
  const std::vector<Element>& basis() const { return basis_; }

 private:
  Code(std::shared_ptr<const Field> field, int k, std::vector<Element> points,
       std::vector<Element> basis);

  std::shared_ptr<const Field> field_;
  int k_;
  std::vector<Element> points_;
  std::vector<Element> basis_;
  std::unordered_map<std::uint32_t, int> index_;
};

// One stored unit: which evaluation point it belongs to and the evaluated
// payload, one m-bit value per stripe of the object.
struct Fragment {
  int index = 0;  // 1-based position in the code's point list
  Element point;
  std::vector<std::uint32_t> values;
};

// Cut a bit string into stripes of k field symbols; the final partial stripe
// is zero-padded. bit_count bits of `bytes` are consumed, LSB-first.
std::vector<ObjectStripe> split_object(std::span<const std::uint8_t> bytes,
                                       std::size_t bit_count, int k, const Field& field);

// Inverse of split_object up to the zero padding; truncates to byte_count.
std::vector<std::uint8_t> join_stripes(const std::vector<ObjectStripe>& stripes,
                                       std::size_t byte_count);

// Evaluate the stripe's polynomial at every code point.
std::vector<Element> encode(const ObjectStripe& stripe, const Code& code);

// Whole-object encode: stripes the bytes and returns n fragments carrying one
// value per stripe. Stripes are independent; this runs them in order.
std::vector<Fragment> encode_object(std::span<const std::uint8_t> bytes, const Code& code);

// Whole-object decode via the linear decoder; throws UnrecoverableError /
// CorruptFragmentsError as decode_linear does.
std::vector<std::uint8_t> decode_object(const std::vector<Fragment>& available,
                                        const Code& code, std::size_t byte_count);

// All 2^r - 1 nonzero combinations of a maximal independent subset of the
// available fragments, as (point, value) pairs for one stripe.
std::vector<std::pair<Element, Element>> expand_span(const std::vector<Fragment>& available,
                                                     std::size_t stripe = 0);

// Solves for the object bits by GF(2) elimination over the bit-level linear
// system relating fragment values to object bits. Built once per point set,
// then applied per stripe.
class LinearDecoder {
 public:
  LinearDecoder(const Code& code, const std::vector<Element>& points);

  ObjectStripe solve(std::span<const std::uint32_t> values) const;
  int point_rank() const { return point_rank_; }

 private:
  std::shared_ptr<const Field> field_;
  int k_;
  int m_;
  std::size_t x_;                                     // number of points
  std::vector<std::vector<std::uint64_t>> solution_;  // k*m rows of x*m-bit masks
  std::vector<std::vector<std::uint64_t>> checks_;    // consistency rows
  int point_rank_;
};

// Primary decoder: succeeds iff the available points have GF(2)-rank >= k.
ObjectStripe decode_linear(const std::vector<Fragment>& available, const Code& code,
                           std::size_t stripe = 0);

// Independent cross-check decoder: expands the span of k independent
// fragments, Lagrange-interpolates through 2^{k-1}+1 points and reads the
// coefficients at the power-of-two degrees. All other coefficients must be
// zero.
ObjectStripe decode_interpolate(const std::vector<Fragment>& available, const Code& code,
                                std::size_t stripe = 0);

}  // namespace hsrc
