#pragma once

#include <utility>
#include <vector>

#include "hsrc/code.hpp"

namespace hsrc {

// The (n-1)/2 disjoint two-fragment repair options for one target point:
// every non-target point appears in exactly one pair, and each pair XORs to
// the target.
struct PairTable {
  Element target;
  std::vector<std::pair<Element, Element>> pairs;
};

// Requires subspace structure. Pairs are listed by ascending index of their
// lower-indexed member, members ordered low index first.
PairTable pair_table(const Element& target, const Code& code);

// Minimum-cardinality subset of the available fragments whose points XOR to
// the target; smallest size first, ties broken lexicographically by index.
// Throws IrreparableError when the target is outside the span.
std::vector<int> find_repair_set(const Element& target, const std::vector<int>& available,
                                 const Code& code);

// XOR the donor payloads into the fragment at the target point. Donor points
// must XOR to the target.
Fragment repair_fragment(const Element& target, const std::vector<Fragment>& donors,
                         const Code& code);

}  // namespace hsrc
