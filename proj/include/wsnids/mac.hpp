#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids {

// Per-cell slotted MAC: every sensor in the cell owns one slot per frame.
struct TdmaSchedule {
  SimTime slot_len = 10;               // ms
  std::vector<NodeId> slots;           // slot index -> owner
  SimTime frame_len() const { return slot_len * static_cast<SimTime>(slots.size()); }

  void validate() const {
    if (slot_len <= 0) throw std::invalid_argument("slot_len must be > 0");
    if (slots.empty()) throw std::invalid_argument("TDMA schedule needs at least one slot");
  }
};

// Owner of the slot covering `at` (frames repeat from t = 0).
NodeId slot_owner(const TdmaSchedule& s, SimTime at);

// Index of the slot `node` owns, or -1.
int slot_index_of(const TdmaSchedule& s, NodeId node);

// Duty-cycled sleep/wake schedule: each node is awake during
// [offset, offset + duration) of every period.
struct SmacSchedule {
  SimTime period = 100;  // ms
  struct Window {
    SimTime offset = 0;
    SimTime duration = 0;
  };
  std::map<NodeId, Window> awake;

  void validate() const {
    if (period <= 0) throw std::invalid_argument("smac period must be > 0");
    for (const auto& [node, w] : awake)
      if (w.duration <= 0 || w.duration > period)
        throw std::invalid_argument("awake duration must be in (0, period] for node " +
                                    std::to_string(node));
  }
};

// True iff `node` is outside its awake window at `at`. Throws when the node
// has no schedule entry.
bool is_asleep(const SmacSchedule& s, NodeId node, SimTime at);

}  // namespace wsnids
