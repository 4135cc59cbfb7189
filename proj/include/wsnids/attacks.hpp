#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids {

enum class AttackKind : std::uint8_t {
  HelloFlood,
  Sybil,
  Wormhole,
  BlackHole,
  SinkHole,
  SelectiveForwarding,
  BroadcastFlood,
  TargetFlood,
  FalseIdBroadcastFlood,
  FalseIdTargetFlood,
  Misdirection,
  Jamming,
  Replay,
  DataAlteration,
};

const char* to_string(AttackKind kind);
std::optional<AttackKind> attack_kind_from_string(const std::string& name);

// One injected attacker behavior. `attacker` is the compromised node;
// kind-specific parameters configure its per-packet overrides and traffic
// generation inside [start, stop).
struct AttackSpec {
  AttackKind kind = AttackKind::BlackHole;
  NodeId attacker = kInvalidNode;
  NodeId peer = kInvalidNode;  // wormhole exit node
  SimTime start = 0;
  SimTime stop = 0;
  double rate_per_s = 10.0;          // generation attacks
  double drop_ratio = 1.0;           // selective forwarding
  std::string drop_tag;              // alternative selection criterion
  std::vector<NodeId> fake_ids;      // sybil rotation list
  NodeId fake_id = kInvalidNode;     // false-identity floods
  NodeId target = kInvalidNode;      // target floods / misdirection next hop
  double jam_corruption = 0.8;       // P(reception corrupted) in jam range
  double range_boost = 3.0;          // radio boost for floods / wormhole exit
  std::string altered_tag = "altered";

  bool active_at(SimTime t) const { return t >= start && t < stop; }
  // Milliseconds between generated emissions.
  SimTime emit_period_ms() const;
  void validate() const;
};

enum class ForwardAction : std::uint8_t { Forward, Drop, Modify, Misroute, Tunnel };

struct ForwardDecision {
  ForwardAction action = ForwardAction::Forward;
  // Modify: replacement payload tag. Misroute: override next hop.
  std::string new_tag;
  NodeId next_hop = kInvalidNode;
  NodeId tunnel_peer = kInvalidNode;
};

// What a compromised relay does with a packet in transit. Attackers never
// error: unhandled kinds forward honestly.
ForwardDecision on_forward(const AttackSpec& spec, const Packet& pkt, SimTime now);

// Deterministic selective-forwarding predicate over the packet sequence
// number (the "pre-selected criterion").
bool selective_drop(const AttackSpec& spec, const Packet& pkt);

// Mutable per-attacker state for traffic generation.
struct AttackRuntime {
  AttackSpec spec;
  std::size_t rotation_index = 0;          // sybil fake-id round robin
  std::deque<Packet> replay_buffer;        // overheard packets, capped
  static constexpr std::size_t kReplayCap = 64;

  void remember(const Packet& pkt);        // feeds the replay buffer
};

// Packets the attacker emits at generation instant `at` (already checked
// against the active window by the caller via spec.active_at). seq/uid
// assignment is left to the engine.
std::vector<Packet> on_generate(AttackRuntime& rt, SimTime at);

}  // namespace wsnids
