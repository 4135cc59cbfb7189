#pragma once

#include <map>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids {

// Liveness bookkeeping a parent keeps over its children's report stream.
// Any received Report or Heartbeat resets the child's missed counter.
class LivenessTable {
 public:
  void track(NodeId child, SimTime now);
  void untrack(NodeId child);
  bool tracked(NodeId child) const { return rows_.count(child) > 0; }

  void report_received(NodeId child, SimTime at);
  // Called once per closed window for children that stayed silent.
  void report_missed(NodeId child);

  int missed(NodeId child) const;
  SimTime last_report_at(NodeId child) const;
  std::vector<NodeId> children() const;

 private:
  struct Row {
    SimTime last_report_at = 0;
    int missed = 0;
  };
  std::map<NodeId, Row> rows_;
};

// Children whose consecutive missed-report count reached the limit, in
// ascending NodeId order.
std::vector<NodeId> detect_failure(const LivenessTable& table, int miss_limit);

}  // namespace wsnids
