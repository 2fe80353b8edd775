#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "hsrc/code.hpp"

namespace hsrc {

// Nodes are named by the fragment they hold: node i stores fragment i, and
// the newcomer rebuilding fragment j is node j.
struct ClusterState {
  std::vector<int> available;  // fragment indices still held
  std::vector<int> missing;    // fragment indices to rebuild, one newcomer each
};

struct Transfer {
  int src;   // uploading node
  int frag;  // fragment index carried
  int dst;   // downloading newcomer
};

struct RepairSchedule {
  std::vector<std::vector<Transfer>> slots;
  int makespan = 0;
};

struct Baselines {
  int hybrid;  // a full-copy holder uploads one fragment per slot
  int ec;      // download k to rebuild the object, then upload the rest
};

// Slotted parallel repair under unit uplink/downlink capacity. Each slot is a
// maximum bipartite matching between incomplete newcomers and the sources
// they still need; repaired fragments become uploadable the following slot.
// Donor sets prefer fully available pairs (spreading upload load, ties by
// index), then pairs completed by an earlier newcomer, then minimal XOR sets.
RepairSchedule plan_repairs(const Code& code, const ClusterState& state);

// True iff per-slot capacities hold, every shipped fragment is held by its
// source at that time, every newcomer ends with a subset XORing to its
// target, and re-executing the XORs on random payloads reproduces the encoder
// output. On failure, *why names the first violation.
bool verify_schedule(const Code& code, const ClusterState& state,
                     const RepairSchedule& schedule, std::string* why = nullptr,
                     std::uint64_t payload_seed = 0x5eed);

Baselines sequential_baselines(const Code& code, const ClusterState& state);

// {"slots":[[{"src":..,"frag":..,"dst":..},..],..],"makespan":..,
//  "baselines":{"hybrid":..,"ec":..}}
nlohmann::json schedule_to_json(const RepairSchedule& schedule, const Baselines& baselines);

}  // namespace hsrc
