#include "wsnids/mac.hpp"

namespace wsnids {

NodeId slot_owner(const TdmaSchedule& s, SimTime at) {
  s.validate();
  const SimTime frame = s.frame_len();
  SimTime in_frame = at % frame;
  if (in_frame < 0) in_frame += frame;
  return s.slots[static_cast<std::size_t>(in_frame / s.slot_len)];
}

int slot_index_of(const TdmaSchedule& s, NodeId node) {
  for (std::size_t i = 0; i < s.slots.size(); ++i)
    if (s.slots[i] == node) return static_cast<int>(i);
  return -1;
}

bool is_asleep(const SmacSchedule& s, NodeId node, SimTime at) {
  s.validate();
  auto it = s.awake.find(node);
  if (it == s.awake.end())
    throw std::invalid_argument("is_asleep: no schedule entry for node " + std::to_string(node));
  SimTime phase = at % s.period;
  if (phase < 0) phase += s.period;
  const auto& w = it->second;
  // Awake windows may wrap the period boundary.
  const SimTime end = w.offset + w.duration;
  if (end <= s.period) return !(phase >= w.offset && phase < end);
  return !(phase >= w.offset || phase < end - s.period);
}

}  // namespace wsnids
