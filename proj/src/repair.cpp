#include "hsrc/repair.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "hsrc/errors.hpp"
#include "hsrc/gf2.hpp"

namespace hsrc {

PairTable pair_table(const Element& target, const Code& code) {
  if (!code.is_subspace()) {
    throw std::invalid_argument("pair table requires subspace evaluation points");
  }
  const auto target_index = code.index_of(target.bits());
  if (!target_index) throw std::invalid_argument("target is not an evaluation point");

  PairTable table{target, {}};
  for (const Element& beta : code.points()) {
    if (beta.bits() == target.bits()) continue;
    const std::uint32_t partner_bits = target.bits() ^ beta.bits();
    const auto beta_index = code.index_of(beta.bits());
    const auto partner_index = code.index_of(partner_bits);
    if (!partner_index) throw std::logic_error("subspace not closed under addition");
    if (*beta_index < *partner_index) {
      table.pairs.emplace_back(beta, code.point(*partner_index));
    }
  }
  return table;
}

namespace {

// Lexicographically first subset of `size` points (ascending positions in
// `bits`) XORing to `residual`. suffix[j] spans bits[j..]; pruning on it
// keeps the exhaustive walk cheap at the n this is used for.
bool pick_lex_subset(std::size_t pos, int remaining, std::uint32_t residual,
                     const std::vector<std::uint32_t>& bits,
                     const std::vector<gf2::Basis32>& suffix, std::vector<std::size_t>& chosen) {
  if (remaining == 0) return residual == 0;
  if (residual == 0) return false;  // fewer points would do; sizes are probed in order
  if (bits.size() - pos < static_cast<std::size_t>(remaining)) return false;
  if (suffix[pos].reduce(residual) != 0) return false;
  chosen.push_back(pos);
  if (pick_lex_subset(pos + 1, remaining - 1, residual ^ bits[pos], bits, suffix, chosen)) {
    return true;
  }
  chosen.pop_back();
  return pick_lex_subset(pos + 1, remaining, residual, bits, suffix, chosen);
}

}  // namespace

std::vector<int> find_repair_set(const Element& target, const std::vector<int>& available,
                                 const Code& code) {
  if (!code.index_of(target.bits())) {
    throw std::invalid_argument("target is not an evaluation point");
  }
  std::vector<int> indices(available);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

  std::vector<std::uint32_t> bits;
  bits.reserve(indices.size());
  std::unordered_map<std::uint32_t, int> by_bits;
  for (int idx : indices) {
    const std::uint32_t b = code.point(idx).bits();
    bits.push_back(b);
    by_bits.emplace(b, idx);
  }
  if (by_bits.count(target.bits())) {
    throw std::invalid_argument("target fragment is already available");
  }

  // Pair check first: one scan against the complement.
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto it = by_bits.find(target.bits() ^ bits[i]);
    if (it != by_bits.end() && it->second > indices[i]) return {indices[i], it->second};
  }

  gf2::Basis32 span;
  for (std::uint32_t b : bits) span.insert(b);
  if (span.reduce(target.bits()) != 0) {
    throw IrreparableError("fragment at point " + std::to_string(target.bits()) +
                           " is outside the span of the available fragments");
  }

  std::vector<gf2::Basis32> suffix(bits.size() + 1);
  for (std::size_t j = bits.size(); j-- > 0;) {
    suffix[j] = suffix[j + 1];
    suffix[j].insert(bits[j]);
  }
  for (int size = 3; size <= span.size(); ++size) {
    std::vector<std::size_t> chosen;
    if (pick_lex_subset(0, size, target.bits(), bits, suffix, chosen)) {
      std::vector<int> result;
      result.reserve(chosen.size());
      for (std::size_t pos : chosen) result.push_back(indices[pos]);
      return result;
    }
  }
  throw std::logic_error("span membership held but no subset was found");
}

Fragment repair_fragment(const Element& target, const std::vector<Fragment>& donors,
                         const Code& code) {
  if (donors.empty()) throw std::invalid_argument("no donors");
  const auto index = code.index_of(target.bits());
  if (!index) throw std::invalid_argument("target is not an evaluation point");

  const std::size_t stripes = donors.front().values.size();
  std::uint32_t point_sum = 0;
  for (const Fragment& donor : donors) {
    const auto donor_index = code.index_of(donor.point.bits());
    if (!donor_index || *donor_index != donor.index) {
      throw std::invalid_argument("donor does not belong to the code");
    }
    if (donor.values.size() != stripes) {
      throw std::invalid_argument("donors disagree on stripe count");
    }
    point_sum ^= donor.point.bits();
  }
  if (point_sum != target.bits()) {
    throw std::invalid_argument("donor points do not sum to the target point");
  }

  Fragment repaired{*index, code.point(*index), std::vector<std::uint32_t>(stripes, 0)};
  for (const Fragment& donor : donors) {
    for (std::size_t s = 0; s < stripes; ++s) repaired.values[s] ^= donor.values[s];
  }
  return repaired;
}

}  // namespace hsrc
