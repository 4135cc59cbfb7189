#pragma once

#include <string>
#include <vector>

#include "wsnids/attacks.hpp"
#include "wsnids/energy.hpp"
#include "wsnids/policy.hpp"
#include "wsnids/radio.hpp"
#include "wsnids/topology.hpp"
#include "wsnids/types.hpp"

namespace wsnids {

struct MacParams {
  SimTime slot_ms = 10;
  SimTime awake_guard_ms = 2;  // sleep window padding around the owned slot
};

struct AgentParams {
  SimTime window_ms = 1000;
  int warmup_windows = 10;     // baseline/profile learning span
  SimTime window_grace_ms = 50;
};

enum class IdsMode : std::uint8_t { Hierarchical, EverySensor };

struct ScheduledFailure {
  NodeId node = kInvalidNode;
  SimTime at = 0;
};

// Everything one batch run needs. Parsed strictly: unknown keys and dangling
// node references are rejected with their field path.
struct Scenario {
  TopologyConfig topology;
  RadioModel radio;
  MacParams mac;
  AgentParams agent;
  ResponseParams response;
  DetectorParams detector;
  double anomaly_sensitivity_k = 3.0;
  std::vector<SignatureRule> rules = default_signature_rules();
  std::vector<AttackSpec> attacks;
  std::vector<ScheduledFailure> failures;
  SimTime duration_ms = 45000;
  std::uint64_t seed = 1;
  IdsMode ids_mode = IdsMode::Hierarchical;
  EnergyCosts energy;
  bool attacks_enabled = true;

  // Cross-checks that need the built topology (node references, duration vs
  // warm-up) run in validate().
  void validate() const;
};

// Throws std::invalid_argument with a field path on any problem.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scn);

}  // namespace wsnids
