#include "hsrc/scheduler.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "hsrc/errors.hpp"
#include "hsrc/gf2.hpp"
#include "hsrc/repair.hpp"
#include "hsrc/rng.hpp"

namespace hsrc {

namespace {

void validate_state(const Code& code, const ClusterState& state) {
  std::set<int> seen;
  for (int idx : state.available) {
    if (idx < 1 || idx > code.n()) throw std::invalid_argument("available index out of range");
    if (!seen.insert(idx).second) throw std::invalid_argument("duplicate fragment index");
  }
  for (int idx : state.missing) {
    if (idx < 1 || idx > code.n()) throw std::invalid_argument("missing index out of range");
    if (!seen.insert(idx).second) {
      throw std::invalid_argument("fragment is both available and missing");
    }
  }
}

// Kuhn's augmenting-path matching. Newcomers are tried in index order and
// donors in index order, which fixes the schedule deterministically.
struct Matcher {
  const std::vector<std::vector<int>>& adjacency;  // newcomer -> donor positions
  std::vector<int> donor_match;                    // donor position -> newcomer position
  std::vector<char> visited;

  explicit Matcher(const std::vector<std::vector<int>>& adj, std::size_t donors)
      : adjacency(adj), donor_match(donors, -1) {}

  bool augment(int nc) {
    for (int donor : adjacency[nc]) {
      if (visited[donor]) continue;
      visited[donor] = 1;
      if (donor_match[donor] < 0 || augment(donor_match[donor])) {
        donor_match[donor] = nc;
        return true;
      }
    }
    return false;
  }

  void run(std::size_t newcomers) {
    for (std::size_t nc = 0; nc < newcomers; ++nc) {
      visited.assign(donor_match.size(), 0);
      augment(static_cast<int>(nc));
    }
  }
};

struct Newcomer {
  int target = 0;              // fragment index being rebuilt
  std::vector<int> plan;       // donor fragment indices, ascending
  std::set<int> received;
  int completed_slot = -1;     // slot in which the plan finished, -1 if not yet
};

}  // namespace

RepairSchedule plan_repairs(const Code& code, const ClusterState& state) {
  validate_state(code, state);
  std::vector<int> available(state.available);
  std::sort(available.begin(), available.end());
  std::vector<int> missing(state.missing);
  std::sort(missing.begin(), missing.end());

  gf2::Basis32 span;
  for (int idx : available) span.insert(code.point(idx).bits());
  for (int idx : missing) {
    if (span.reduce(code.point(idx).bits()) != 0) {
      throw IrreparableError("irreparable set: fragment " + std::to_string(idx) +
                             " is outside the span of the available fragments");
    }
  }

  const std::set<int> available_set(available.begin(), available.end());
  std::map<int, int> upload_load;  // planned demand per donor fragment

  // Donor plans. Fully available pairs come first, chosen to spread upload
  // load (ties by index); then pairs whose second half is rebuilt by an
  // earlier newcomer; minimal XOR sets over the available fragments last.
  std::vector<Newcomer> newcomers;
  newcomers.reserve(missing.size());
  std::set<int> planned_missing;
  for (int target : missing) {
    const Element target_point = code.point(target);
    Newcomer nc;
    nc.target = target;

    std::vector<std::pair<int, int>> full_pairs;
    std::vector<std::pair<int, int>> half_pairs;  // (available half, missing half)
    if (code.is_subspace()) {
      for (const auto& [a, b] : pair_table(target_point, code).pairs) {
        const int ia = *code.index_of(a.bits());
        const int ib = *code.index_of(b.bits());
        const bool have_a = available_set.count(ia) != 0;
        const bool have_b = available_set.count(ib) != 0;
        if (have_a && have_b) {
          full_pairs.emplace_back(std::min(ia, ib), std::max(ia, ib));
        } else if (have_a && planned_missing.count(ib)) {
          half_pairs.emplace_back(ia, ib);
        } else if (have_b && planned_missing.count(ia)) {
          half_pairs.emplace_back(ib, ia);
        }
      }
    }
    auto load_of = [&](int idx) {
      const auto it = upload_load.find(idx);
      return it == upload_load.end() ? 0 : it->second;
    };
    if (!full_pairs.empty()) {
      auto better = [&](const std::pair<int, int>& p, const std::pair<int, int>& q) {
        const auto key = [&](const std::pair<int, int>& pr) {
          return std::tuple(std::max(load_of(pr.first), load_of(pr.second)),
                            load_of(pr.first) + load_of(pr.second), pr.first, pr.second);
        };
        return key(p) < key(q);
      };
      const auto pick = *std::min_element(full_pairs.begin(), full_pairs.end(), better);
      nc.plan = {pick.first, pick.second};
    } else if (!half_pairs.empty()) {
      auto better = [&](const std::pair<int, int>& p, const std::pair<int, int>& q) {
        return std::tuple(load_of(p.first), p.first, p.second) <
               std::tuple(load_of(q.first), q.first, q.second);
      };
      const auto pick = *std::min_element(half_pairs.begin(), half_pairs.end(), better);
      nc.plan = {pick.first, pick.second};
      std::sort(nc.plan.begin(), nc.plan.end());
    } else {
      nc.plan = find_repair_set(target_point, available, code);
    }
    for (int idx : nc.plan) ++upload_load[idx];
    planned_missing.insert(target);
    newcomers.push_back(std::move(nc));
  }

  // Slot loop: an uploader serves one transfer per slot, a newcomer receives
  // one, and a repaired fragment starts uploading the following slot.
  std::map<int, std::size_t> newcomer_at;  // fragment index -> position
  for (std::size_t i = 0; i < newcomers.size(); ++i) newcomer_at[newcomers[i].target] = i;

  RepairSchedule schedule;
  const int slot_cap = 4 * (code.n() + static_cast<int>(missing.size())) + 8;
  while (true) {
    const int slot = static_cast<int>(schedule.slots.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < newcomers.size(); ++i) {
      if (newcomers[i].completed_slot < 0) pending.push_back(i);
    }
    if (pending.empty()) break;
    if (slot > slot_cap) throw std::logic_error("repair schedule failed to converge");

    auto active_source = [&](int frag) {
      if (available_set.count(frag)) return true;
      const auto it = newcomer_at.find(frag);
      return it != newcomer_at.end() && newcomers[it->second].completed_slot >= 0 &&
             newcomers[it->second].completed_slot < slot;
    };

    // Donor universe for this slot: every fragment some pending newcomer
    // still needs and whose holder can upload now.
    std::vector<int> donors;
    std::map<int, int> donor_pos;
    std::vector<std::vector<int>> adjacency(pending.size());
    for (std::size_t p = 0; p < pending.size(); ++p) {
      const Newcomer& nc = newcomers[pending[p]];
      for (int frag : nc.plan) {
        if (nc.received.count(frag) || !active_source(frag)) continue;
        auto [it, fresh] = donor_pos.try_emplace(frag, static_cast<int>(donors.size()));
        if (fresh) donors.push_back(frag);
        adjacency[p].push_back(it->second);
      }
    }

    Matcher matcher(adjacency, donors.size());
    matcher.run(pending.size());

    std::vector<Transfer> transfers;
    for (std::size_t d = 0; d < donors.size(); ++d) {
      if (matcher.donor_match[d] < 0) continue;
      Newcomer& nc = newcomers[pending[matcher.donor_match[d]]];
      transfers.push_back(Transfer{donors[d], donors[d], nc.target});
      nc.received.insert(donors[d]);
      if (nc.received.size() == nc.plan.size()) nc.completed_slot = slot;
    }
    std::sort(transfers.begin(), transfers.end(),
              [](const Transfer& a, const Transfer& b) { return a.dst < b.dst; });

    if (transfers.empty()) {
      // Nothing movable: a waited-on newcomer chain stalled. Re-plan the
      // stragglers against what is uploadable right now.
      bool changed = false;
      for (std::size_t i : pending) {
        Newcomer& nc = newcomers[i];
        std::uint32_t residual = code.point(nc.target).bits();
        std::vector<int> sources;
        for (int idx : available) sources.push_back(idx);
        for (const Newcomer& other : newcomers) {
          if (other.completed_slot >= 0 && other.completed_slot < slot) {
            sources.push_back(other.target);
          }
        }
        std::vector<int> usable;
        for (int idx : sources) {
          if (!nc.received.count(idx)) usable.push_back(idx);
        }
        for (int idx : nc.received) residual ^= code.point(idx).bits();
        if (residual == 0) {
          nc.completed_slot = slot - 1 >= 0 ? slot - 1 : 0;
          changed = true;
          continue;
        }
        std::vector<int> extra;
        const auto direct = code.index_of(residual);
        if (direct &&
            std::find(usable.begin(), usable.end(), *direct) != usable.end()) {
          extra = {*direct};
        } else {
          extra = find_repair_set(code.field().element(residual), usable, code);
        }
        std::vector<int> plan(nc.received.begin(), nc.received.end());
        plan.insert(plan.end(), extra.begin(), extra.end());
        std::sort(plan.begin(), plan.end());
        nc.plan = std::move(plan);
        changed = true;
      }
      if (!changed) throw std::logic_error("repair schedule stalled");
      continue;
    }
    schedule.slots.push_back(std::move(transfers));
  }
  schedule.makespan = static_cast<int>(schedule.slots.size());
  return schedule;
}

namespace {

// Row basis carrying the combination that produced each row, so a target can
// be decomposed into an explicit subset of the inserted vectors.
class TaggedBasis {
 public:
  explicit TaggedBasis(std::size_t tag_words) : words_(tag_words) {}

  void insert(std::uint32_t v, std::size_t position) {
    std::vector<std::uint64_t> tag(words_, 0);
    tag[position / 64] |= 1ull << (position % 64);
    while (v != 0) {
      const int lead = std::bit_width(v) - 1;
      if (rows_[lead].first == 0) {
        rows_[lead] = {v, std::move(tag)};
        return;
      }
      v ^= rows_[lead].first;
      for (std::size_t w = 0; w < words_; ++w) tag[w] ^= rows_[lead].second[w];
    }
  }

  // Combination of inserted positions XORing to v, if v is in the span.
  std::optional<std::vector<std::uint64_t>> decompose(std::uint32_t v) const {
    std::vector<std::uint64_t> tag(words_, 0);
    while (v != 0) {
      const int lead = std::bit_width(v) - 1;
      if (rows_[lead].first == 0) return std::nullopt;
      v ^= rows_[lead].first;
      for (std::size_t w = 0; w < words_; ++w) tag[w] ^= rows_[lead].second[w];
    }
    return tag;
  }

 private:
  std::size_t words_;
  std::array<std::pair<std::uint32_t, std::vector<std::uint64_t>>, 32> rows_{};
};

bool fail(std::string* why, const std::string& message) {
  if (why != nullptr) *why = message;
  return false;
}

}  // namespace

bool verify_schedule(const Code& code, const ClusterState& state,
                     const RepairSchedule& schedule, std::string* why,
                     std::uint64_t payload_seed) {
  validate_state(code, state);
  const std::set<int> available_set(state.available.begin(), state.available.end());
  const std::set<int> missing_set(state.missing.begin(), state.missing.end());

  // Random payloads (a few stripes) to re-execute the XOR repairs against.
  constexpr int kStripes = 4;
  SplitMix64 rng(payload_seed);
  std::vector<ObjectStripe> stripes;
  std::vector<std::vector<Element>> encoded;  // per stripe, values by index-1
  for (int s = 0; s < kStripes; ++s) {
    ObjectStripe stripe;
    for (int j = 0; j < code.k(); ++j) {
      stripe.push_back(code.field().element(
          static_cast<std::uint32_t>(rng.next_below(code.field().size()))));
    }
    encoded.push_back(encode(stripe, code));
    stripes.push_back(std::move(stripe));
  }

  struct Received {
    std::vector<int> frags;
  };
  std::map<int, Received> received;
  std::map<int, int> completed_slot;

  const auto completes = [&](int target, const std::vector<int>& frags) -> bool {
    TaggedBasis basis((frags.size() + 63) / 64);
    for (std::size_t i = 0; i < frags.size(); ++i) {
      basis.insert(code.point(frags[i]).bits(), i);
    }
    return basis.decompose(code.point(target).bits()).has_value();
  };

  for (std::size_t slot = 0; slot < schedule.slots.size(); ++slot) {
    std::set<int> uploaders;
    std::set<int> downloaders;
    for (const Transfer& t : schedule.slots[slot]) {
      if (!missing_set.count(t.dst)) {
        return fail(why, "transfer destination " + std::to_string(t.dst) +
                             " is not a newcomer");
      }
      if (t.frag < 1 || t.frag > code.n()) return fail(why, "fragment index out of range");
      if (!uploaders.insert(t.src).second) {
        return fail(why, "node " + std::to_string(t.src) + " uploads twice in slot " +
                             std::to_string(slot + 1));
      }
      if (!downloaders.insert(t.dst).second) {
        return fail(why, "newcomer " + std::to_string(t.dst) + " downloads twice in slot " +
                             std::to_string(slot + 1));
      }
      // One fragment per node: the only node holding fragment f is node f,
      // either an original holder or a newcomer that finished earlier.
      if (t.src != t.frag) {
        return fail(why, "node " + std::to_string(t.src) + " never holds fragment " +
                             std::to_string(t.frag));
      }
      if (available_set.count(t.frag) == 0) {
        const auto done = completed_slot.find(t.frag);
        if (done == completed_slot.end() || done->second >= static_cast<int>(slot)) {
          return fail(why, "fragment " + std::to_string(t.frag) +
                               " is shipped before it was repaired");
        }
      }
      received[t.dst].frags.push_back(t.frag);
    }
    // Completions recorded after the whole slot settles.
    for (const Transfer& t : schedule.slots[slot]) {
      if (completed_slot.count(t.dst)) continue;
      if (completes(t.dst, received[t.dst].frags)) {
        completed_slot[t.dst] = static_cast<int>(slot);
      }
    }
  }

  for (int target : state.missing) {
    const auto it = received.find(target);
    if (it == received.end() || !completed_slot.count(target)) {
      return fail(why, "newcomer " + std::to_string(target) +
                           " never accumulates a subset XORing to its point");
    }
    // Re-execute the XOR repair on the random payloads.
    const std::vector<int>& frags = it->second.frags;
    TaggedBasis basis((frags.size() + 63) / 64);
    for (std::size_t i = 0; i < frags.size(); ++i) {
      basis.insert(code.point(frags[i]).bits(), i);
    }
    const auto combo = basis.decompose(code.point(target).bits());
    if (!combo) {
      return fail(why, "newcomer " + std::to_string(target) + " cannot form its fragment");
    }
    for (int s = 0; s < kStripes; ++s) {
      std::uint32_t value = 0;
      for (std::size_t i = 0; i < frags.size(); ++i) {
        if (((*combo)[i / 64] >> (i % 64)) & 1ull) value ^= encoded[s][frags[i] - 1].bits();
      }
      if (value != encoded[s][target - 1].bits()) {
        return fail(why, "repaired payload mismatch for fragment " + std::to_string(target));
      }
    }
  }
  return true;
}

Baselines sequential_baselines(const Code& code, const ClusterState& state) {
  validate_state(code, state);
  const int lost = static_cast<int>(state.missing.size());
  if (lost == 0) return {0, 0};
  return {lost, code.k() + lost - 1};
}

nlohmann::json schedule_to_json(const RepairSchedule& schedule, const Baselines& baselines) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& slot : schedule.slots) {
    nlohmann::json entries = nlohmann::json::array();
    for (const Transfer& t : slot) {
      entries.push_back({{"src", t.src}, {"frag", t.frag}, {"dst", t.dst}});
    }
    slots.push_back(std::move(entries));
  }
  return nlohmann::json{{"slots", std::move(slots)},
                        {"makespan", schedule.makespan},
                        {"baselines", {{"hybrid", baselines.hybrid}, {"ec", baselines.ec}}}};
}

}  // namespace hsrc
