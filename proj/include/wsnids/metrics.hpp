#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsnids/response.hpp"
#include "wsnids/types.hpp"

namespace wsnids {

// Per-injected-attack outcome. `principal` is the identity the detection
// system can actually classify: the attacker itself for true-identity
// attacks, the fabricated id for false-identity floods.
struct AttackOutcome {
  std::string kind;
  NodeId attacker = kInvalidNode;
  NodeId principal = kInvalidNode;
  SimTime start = 0;
  bool detected = false;
  std::optional<SimTime> detection_latency_ms;
  NodeClass final_class = NodeClass::Fresh;
  bool classified = false;  // a record for the principal exists
};

struct TierEnergy {
  double tx_mj = 0.0;
  double rx_mj = 0.0;
  double idle_mj = 0.0;
  double ids_mj = 0.0;
  double total() const { return tx_mj + rx_mj + idle_mj + ids_mj; }
};

struct MetricsReport {
  // Scale, for compare() sanity checks.
  int regions = 0;
  int cells = 0;
  int sensors = 0;
  SimTime duration_ms = 0;

  std::vector<AttackOutcome> attacks;
  std::int64_t false_positive_count = 0;      // misbehavior+ findings against honest nodes
  std::int64_t misclassified_honest_nodes = 0;
  std::map<std::string, std::int64_t> alerts_by_detector;
  std::map<std::string, std::int64_t> alerts_by_tier;
  std::int64_t findings_total = 0;
  std::map<std::string, TierEnergy> energy_by_tier;
  double energy_total_mj = 0.0;
  double ids_energy_mj = 0.0;
  std::int64_t broadcast_count = 0;
  std::int64_t alert_broadcast_count = 0;
  std::int64_t failover_count = 0;
  std::int64_t orphaned_sensors = 0;
  std::map<NodeId, std::int64_t> failover_disruption_windows;  // failed node -> windows
  // Classification timeline: node -> (state, entered_at) pairs in order.
  std::map<NodeId, std::vector<std::pair<std::string, SimTime>>> class_timeline;

  // Flat key=value document, stable order, for golden files and compare().
  std::string to_kv() const;
  static MetricsReport from_kv(const std::string& text);

  // Human-readable summary.
  std::string summary() const;
};

// Ratios variant/baseline for energy, broadcasts, and alert counts. Throws
// std::invalid_argument when the reports come from different scales.
struct CompareResult {
  double energy_ratio = 0.0;
  double ids_energy_ratio = 0.0;
  double broadcast_ratio = 0.0;
  double alert_ratio = 0.0;
  std::string to_text() const;
};

CompareResult compare(const MetricsReport& baseline, const MetricsReport& variant);

}  // namespace wsnids
