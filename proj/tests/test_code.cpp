#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "hsrc/code.hpp"
#include "hsrc/errors.hpp"
#include "hsrc/field.hpp"
#include "hsrc/rng.hpp"
#include "support/oracles.hpp"

using hsrc::Code;
using hsrc::CorruptFragmentsError;
using hsrc::Element;
using hsrc::Field;
using hsrc::Fragment;
using hsrc::LinearizedPoly;
using hsrc::ObjectStripe;
using hsrc::SplitMix64;
using hsrc::UnrecoverableError;

namespace {

ObjectStripe random_stripe(const Code& code, SplitMix64& rng) {
  ObjectStripe stripe;
  for (int j = 0; j < code.k(); ++j) {
    stripe.push_back(code.field().element(
        static_cast<std::uint32_t>(rng.next_below(code.field().size()))));
  }
  return stripe;
}

// Single-stripe fragments for the points selected by `mask` (bit i selects
// index i+1).
std::vector<Fragment> fragments_for(const Code& code, const std::vector<Element>& codeword,
                                    std::uint32_t mask) {
  std::vector<Fragment> out;
  for (int i = 0; i < code.n(); ++i) {
    if ((mask >> i) & 1u) {
      out.push_back(Fragment{i + 1, code.points()[i], {codeword[i].bits()}});
    }
  }
  return out;
}

int point_rank(const std::vector<Fragment>& frags) {
  std::vector<std::uint32_t> bits;
  for (const Fragment& f : frags) bits.push_back(f.point.bits());
  return oracle::rank_u32(bits);
}

}  // namespace

TEST_CASE("code construction") {
  SUBCASE("GF(16), k=3, d=3 gives the n=7 subspace") {
    const Code code = Code::subspace(Field(4, 0x13), 3, 3);
    CHECK(code.n() == 7);
    CHECK(code.is_subspace());
    CHECK(code.dimension() == 3);
    std::set<std::uint32_t> got;
    for (const Element& p : code.points()) got.insert(p.bits());
    CHECK(got == std::set<std::uint32_t>{1, 2, 3, 4, 5, 6, 7});
  }
  SUBCASE("GF(16), k=3, d=4 gives n=15") {
    const Code code = Code::subspace(Field(4, 0x13), 3, 4);
    CHECK(code.n() == 15);
  }
  SUBCASE("k=5 over GF(16) violates the interpolation bound") {
    try {
      Code::subspace(Field(4, 0x13), 5, 4);
      FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
  }
  SUBCASE("k >= n is rejected") {
    CHECK_THROWS_AS(Code::subspace(Field(4, 0x13), 3, 2), std::invalid_argument);
  }
  SUBCASE("duplicate and zero points are rejected") {
    CHECK_THROWS_AS(Code::from_points(Field(4, 0x13), 2, {1, 2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Code::from_points(Field(4, 0x13), 2, {1, 2, 0}), std::invalid_argument);
  }
  SUBCASE("subspace detection on explicit points") {
    // The paper-ordered n=7 set is a subspace however it is listed.
    const Code code = Code::from_points(Field(4, 0x13), 3, {1, 2, 4, 3, 6, 5, 7});
    CHECK(code.is_subspace());
    CHECK(code.dimension() == 3);
    CHECK(*code.index_of(4) == 3);
    const Code sparse = Code::from_points(Field(4, 0x13), 2, {1, 2, 4});
    CHECK(!sparse.is_subspace());
  }
}

TEST_CASE("split_object") {
  const Field f(4, 0x13);
  SUBCASE("12 bits, k=3, m=4 make one stripe") {
    const std::uint8_t bytes[2] = {0xB4, 0x06};  // bits lsb-first: 0010 1101 0110
    const auto stripes = hsrc::split_object(std::span(bytes, 2), 12, 3, f);
    REQUIRE(stripes.size() == 1);
    CHECK(stripes[0][0].bits() == 0x4u);
    CHECK(stripes[0][1].bits() == 0xBu);
    CHECK(stripes[0][2].bits() == 0x6u);
  }
  SUBCASE("empty input") { CHECK(hsrc::split_object({}, 0, 3, f).empty()); }
  SUBCASE("13 bits pad into a second stripe") {
    const std::uint8_t bytes[2] = {0x00, 0x10};  // bit 12 set
    const auto stripes = hsrc::split_object(std::span(bytes, 2), 13, 3, f);
    REQUIRE(stripes.size() == 2);
    for (const Element& e : stripes[0]) CHECK(e.is_zero());
    CHECK(stripes[1][0].bits() == 0x1u);  // bit 12 lands in bit 0 of symbol 0
    CHECK(stripes[1][1].is_zero());
    CHECK(stripes[1][2].is_zero());
  }
}

TEST_CASE("linearized polynomial evaluation over GF(4)") {
  const Field f(2, 0x7);
  const Element w = f.generator();
  const LinearizedPoly p({f.one(), w});  // X + w X^2
  CHECK(p(f.one()) == f.one() + w);
  CHECK(p(w) == w + w * w * w);
  CHECK(p(w).bits() == 0b11u);  // w + 1
  CHECK(p(f.zero()).is_zero());
}

TEST_CASE("linearized polynomial step validation") {
  const Field f16(4, 0x13);
  CHECK_NOTHROW(LinearizedPoly({f16.one(), f16.generator()}, 4));  // l=2 divides 4
  CHECK_THROWS_AS(LinearizedPoly({f16.one(), f16.generator()}, 3), std::invalid_argument);
  CHECK_THROWS_AS(LinearizedPoly({f16.one()}, 2), std::invalid_argument);
  const Field f8(3, 0xB);
  CHECK_THROWS_AS(LinearizedPoly({f8.one(), f8.generator()}, 4), std::invalid_argument);
}

TEST_CASE("evaluation matches the reference oracle") {
  const Field f(4, 0x13);
  SplitMix64 rng(0xE7A1);
  for (int i = 0; i < 300; ++i) {
    std::vector<Element> coeffs;
    std::vector<std::uint32_t> raw;
    for (int j = 0; j < 3; ++j) {
      const auto b = static_cast<std::uint32_t>(rng.next_below(16));
      coeffs.push_back(f.element(b));
      raw.push_back(b);
    }
    const LinearizedPoly p(coeffs);
    const auto x = static_cast<std::uint32_t>(rng.next_below(16));
    CHECK(p(f.element(x)).bits() == oracle::eval_ref(raw, x, 0x13, 4));
  }
}

TEST_CASE("encode") {
  SUBCASE("GF(4), k=2, points {1, w, w^2}") {
    const Field f(2, 0x7);
    const Code code = Code::from_points(f, 2, {1, 2, 3});
    const ObjectStripe stripe{code.field().one(), code.field().generator()};
    const auto values = encode(stripe, code);
    REQUIRE(values.size() == 3);
    CHECK(values[0].bits() == 0b11u);  // 1 + w
    CHECK(values[1].bits() == 0b11u);  // w + 1
    CHECK(values[2].is_zero());        // p(w^2) = p(1) + p(w)
  }
  SUBCASE("zero stripe gives the zero codeword") {
    const Code code = Code::subspace(Field(4, 0x13), 3, 3);
    const ObjectStripe zero(3, code.field().zero());
    for (const Element& v : encode(zero, code)) CHECK(v.is_zero());
  }
  SUBCASE("codeword homomorphism: p(w^5) = p(w^2) + p(w)") {
    const Code code = Code::subspace(Field(4, 0x13), 3, 3);
    const Element w = code.field().generator();
    SplitMix64 rng(0x900D);
    for (int i = 0; i < 50; ++i) {
      const auto values = encode(random_stripe(code, rng), code);
      const auto at = [&](const Element& pt) { return values[*code.index_of(pt.bits()) - 1]; };
      CHECK(at(w.pow(5)) == at(w.pow(2)) + at(w));
    }
  }
}

TEST_CASE("homomorphism of evaluation (1000 random cases)") {
  const Field f(4, 0x13);
  SplitMix64 rng(0x1E44A);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Element> coeffs;
    for (int j = 0; j < 3; ++j) {
      coeffs.push_back(f.element(static_cast<std::uint32_t>(rng.next_below(16))));
    }
    const LinearizedPoly p(coeffs);
    const Element a = f.element(static_cast<std::uint32_t>(rng.next_below(16)));
    const Element b = f.element(static_cast<std::uint32_t>(rng.next_below(16)));
    CHECK(p(a + b) == p(a) + p(b));
  }
}

TEST_CASE("subfield linearity for step 4") {
  // u, v range over the 4-element subfield {x : x^4 = x}.
  const Field f(4, 0x13);
  std::vector<Element> subfield;
  for (std::uint32_t b = 0; b < 16; ++b) {
    const Element x = f.element(b);
    if (b == 0 || x.pow(4) == x) subfield.push_back(x);
  }
  REQUIRE(subfield.size() == 4);
  SplitMix64 rng(0x5F1E1D);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Element> coeffs;
    for (int j = 0; j < 2; ++j) {
      coeffs.push_back(f.element(static_cast<std::uint32_t>(rng.next_below(16))));
    }
    const LinearizedPoly p(coeffs, 4);
    const Element a = f.element(static_cast<std::uint32_t>(rng.next_below(16)));
    const Element b = f.element(static_cast<std::uint32_t>(rng.next_below(16)));
    const Element u = subfield[rng.next_below(4)];
    const Element v = subfield[rng.next_below(4)];
    CHECK(p(u * a + v * b) == u * p(a) + v * p(b));
  }
}

TEST_CASE("expand_span") {
  const Code code = Code::subspace(Field(4, 0x13), 3, 4);
  SplitMix64 rng(0xE59A);
  const auto values = encode(random_stripe(code, rng), code);
  const Element w = code.field().generator();

  SUBCASE("three independent fragments expand to 7 pairs") {
    std::uint32_t mask = 0;
    for (const int e : {1, 2, 3}) mask |= 1u << (*code.index_of(w.pow(e).bits()) - 1);
    const auto frags = fragments_for(code, values, mask);
    const auto pairs = hsrc::expand_span(frags);
    CHECK(pairs.size() == 7);
    const Element sum_point = w + w * w;
    bool found = false;
    for (const auto& [pt, val] : pairs) {
      if (pt == sum_point) {
        found = true;
        const auto at = [&](const Element& p) { return values[*code.index_of(p.bits()) - 1]; };
        CHECK(val == at(w) + at(w * w));
      }
    }
    CHECK(found);
  }
  SUBCASE("single fragment expands to itself") {
    const auto frags = fragments_for(code, values, 1u << 1);
    const auto pairs = hsrc::expand_span(frags);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].first == code.points()[1]);
  }
  SUBCASE("dependent fragments expand to 2^rank - 1") {
    // {w, w^2, w + w^2} has rank 2.
    std::uint32_t mask = 0;
    for (const std::uint32_t bits : {2u, 4u, 6u}) mask |= 1u << (*code.index_of(bits) - 1);
    const auto frags = fragments_for(code, values, mask);
    CHECK(hsrc::expand_span(frags).size() == 3);
  }
  SUBCASE("duplicate points are rejected") {
    auto frags = fragments_for(code, values, 0b11);
    frags.push_back(frags.front());
    CHECK_THROWS_AS(hsrc::expand_span(frags), std::invalid_argument);
  }
}

TEST_CASE("decode_linear succeeds exactly when point rank reaches k") {
  const Code code = Code::subspace(Field(4, 0x13), 3, 3);
  SplitMix64 rng(0xDECD);
  const ObjectStripe stripe = random_stripe(code, rng);
  const auto values = encode(stripe, code);
  for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
    const auto frags = fragments_for(code, values, mask);
    if (point_rank(frags) >= 3) {
      CHECK(decode_linear(frags, code) == stripe);
    } else {
      CHECK_THROWS_AS(decode_linear(frags, code), UnrecoverableError);
    }
  }
}

TEST_CASE("unrecoverable reports the achieved rank") {
  // {1, w, w^4} has rank 2 because w^4 = w + 1.
  const Code code = Code::subspace(Field(4, 0x13), 3, 3);
  SplitMix64 rng(0xBAD);
  const auto values = encode(random_stripe(code, rng), code);
  const Element w = code.field().generator();
  std::uint32_t mask = 0;
  for (const int e : {0, 1, 4}) mask |= 1u << (*code.index_of(w.pow(e).bits()) - 1);
  try {
    decode_linear(fragments_for(code, values, mask), code);
    FAIL("expected UnrecoverableError");
  } catch (const UnrecoverableError& e) {
    CHECK(e.rank() == 2);
    CHECK(std::string(e.what()) == "unrecoverable: rank 2 < k=3");
  }
}

TEST_CASE("decoders agree on every decodable subset (n=7, exhaustive)") {
  const Code code = Code::subspace(Field(4, 0x13), 3, 3);
  SplitMix64 rng(0xA9EE);
  const ObjectStripe stripe = random_stripe(code, rng);
  const auto values = encode(stripe, code);
  for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
    const auto frags = fragments_for(code, values, mask);
    if (point_rank(frags) < 3) continue;
    CHECK(decode_interpolate(frags, code) == stripe);
    CHECK(decode_interpolate(frags, code) == decode_linear(frags, code));
  }
}

TEST_CASE("decodability criterion is exhaustive at n=15") {
  const Code code = Code::subspace(Field(4, 0x13), 3, 4);
  SplitMix64 rng(0xDEC15);
  const ObjectStripe stripe = random_stripe(code, rng);
  const auto values = encode(stripe, code);
  int decodable = 0;
  for (std::uint32_t mask = 0; mask < (1u << 15); ++mask) {
    const auto frags = fragments_for(code, values, mask);
    const bool expect = point_rank(frags) >= 3;
    try {
      if (!(decode_linear(frags, code) == stripe)) {
        FAIL("wrong stripe at mask ", mask);
      }
      if (!expect) FAIL("decode succeeded below rank k at mask ", mask);
      ++decodable;
    } catch (const UnrecoverableError&) {
      if (expect) FAIL("decode failed on a decodable subset at mask ", mask);
    }
  }
  CHECK(decodable > 0);
}

TEST_CASE("decoders agree on random subsets (n=15)") {
  const Code code = Code::subspace(Field(4, 0x13), 3, 4);
  SplitMix64 rng(0xA95F);
  for (int round = 0; round < 100; ++round) {
    const ObjectStripe stripe = random_stripe(code, rng);
    const auto values = encode(stripe, code);
    const auto mask = static_cast<std::uint32_t>(rng.next_below(1u << 15));
    const auto frags = fragments_for(code, values, mask);
    if (point_rank(frags) < 3) {
      CHECK_THROWS_AS(decode_linear(frags, code), UnrecoverableError);
      CHECK_THROWS_AS(decode_interpolate(frags, code), UnrecoverableError);
    } else {
      CHECK(decode_linear(frags, code) == stripe);
      CHECK(decode_interpolate(frags, code) == stripe);
    }
  }
}

TEST_CASE("decode_interpolate over GF(4) with k=2") {
  const Field f(2, 0x7);
  const Code code = Code::from_points(f, 2, {1, 2, 3});
  SplitMix64 rng(0x9F4);
  const ObjectStripe stripe = random_stripe(code, rng);
  const auto values = encode(stripe, code);
  const auto frags = fragments_for(code, values, 0b011);  // points {1, w}
  CHECK(decode_interpolate(frags, code) == stripe);

  const ObjectStripe zero(2, f.zero());
  const auto zero_frags = fragments_for(code, encode(zero, code), 0b011);
  CHECK(decode_interpolate(zero_frags, code) == zero);
}

TEST_CASE("corrupt payloads are detected") {
  SplitMix64 rng(0xC0442);

  SUBCASE("decode_linear rejects a flipped bit (n=7, all fragments)") {
    const Code code = Code::subspace(Field(4, 0x13), 3, 3);
    const auto values = encode(random_stripe(code, rng), code);
    auto frags = fragments_for(code, values, 0x7F);
    frags[0].values[0] ^= 0b0100;
    CHECK_THROWS_AS(decode_linear(frags, code), CorruptFragmentsError);
  }

  SUBCASE("both decoders reject a flipped bit when rank exceeds k (n=15)") {
    const Code code = Code::subspace(Field(4, 0x13), 3, 4);
    const auto values = encode(random_stripe(code, rng), code);
    auto frags = fragments_for(code, values, 0x7FFF);
    frags[0].values[0] ^= 0b0100;  // fragment at point 1, an independent direction
    CHECK_THROWS_AS(decode_linear(frags, code), CorruptFragmentsError);
    CHECK_THROWS_AS(decode_interpolate(frags, code), CorruptFragmentsError);
  }

  SUBCASE("at rank exactly k the corruption mimics another stripe") {
    // Evaluation at k independent points is onto, so interpolation through
    // their span cannot flag the flip; it decodes a different stripe.
    const Code code = Code::subspace(Field(4, 0x13), 3, 3);
    const ObjectStripe stripe = random_stripe(code, rng);
    const auto values = encode(stripe, code);
    auto frags = fragments_for(code, values, 0x7F);
    frags[0].values[0] ^= 0b0100;
    CHECK(decode_interpolate(frags, code) != stripe);
  }
}

TEST_CASE("object round trip through encode_object/decode_object") {
  const Code code = Code::subspace(Field(4, 0x13), 3, 3);
  SplitMix64 rng(0x0B7EC7);
  for (const std::size_t size :
       {std::size_t{0}, std::size_t{1}, std::size_t{5}, std::size_t{300}}) {
    std::vector<std::uint8_t> bytes(size);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next());
    const auto fragments = encode_object(bytes, code);
    REQUIRE(fragments.size() == 7);
    // Any rank-3 subset suffices; indices {1, 2, 4} are the basis points.
    const std::vector<Fragment> subset{fragments[0], fragments[1], fragments[3]};
    CHECK(decode_object(subset, code, size) == bytes);
  }
}
