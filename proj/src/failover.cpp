#include "wsnids/failover.hpp"

namespace wsnids {

void LivenessTable::track(NodeId child, SimTime now) {
  Row row;
  row.last_report_at = now;
  rows_[child] = row;
}

void LivenessTable::untrack(NodeId child) { rows_.erase(child); }

void LivenessTable::report_received(NodeId child, SimTime at) {
  auto it = rows_.find(child);
  if (it == rows_.end()) return;
  it->second.last_report_at = at;
  it->second.missed = 0;
}

void LivenessTable::report_missed(NodeId child) {
  auto it = rows_.find(child);
  if (it != rows_.end()) it->second.missed += 1;
}

int LivenessTable::missed(NodeId child) const {
  auto it = rows_.find(child);
  return it == rows_.end() ? 0 : it->second.missed;
}

SimTime LivenessTable::last_report_at(NodeId child) const {
  auto it = rows_.find(child);
  return it == rows_.end() ? -1 : it->second.last_report_at;
}

std::vector<NodeId> LivenessTable::children() const {
  std::vector<NodeId> out;
  out.reserve(rows_.size());
  for (const auto& [id, row] : rows_) out.push_back(id);
  return out;
}

std::vector<NodeId> detect_failure(const LivenessTable& table, int miss_limit) {
  std::vector<NodeId> failed;
  for (NodeId child : table.children())
    if (table.missed(child) >= miss_limit) failed.push_back(child);
  return failed;  // map iteration is already ascending
}

}  // namespace wsnids
