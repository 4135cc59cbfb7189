#include "wsnids/attacks.hpp"

#include <cmath>
#include <stdexcept>

namespace wsnids {

namespace {

// splitmix64: stable across platforms, no RNG state to thread through.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_hash(std::uint64_t x) {
  return static_cast<double>(mix64(x) >> 11) * 0x1.0p-53;
}

}  // namespace

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::HelloFlood: return "hello_flood";
    case AttackKind::Sybil: return "sybil";
    case AttackKind::Wormhole: return "wormhole";
    case AttackKind::BlackHole: return "black_hole";
    case AttackKind::SinkHole: return "sink_hole";
    case AttackKind::SelectiveForwarding: return "selective_forwarding";
    case AttackKind::BroadcastFlood: return "broadcast_flood";
    case AttackKind::TargetFlood: return "target_flood";
    case AttackKind::FalseIdBroadcastFlood: return "false_id_broadcast_flood";
    case AttackKind::FalseIdTargetFlood: return "false_id_target_flood";
    case AttackKind::Misdirection: return "misdirection";
    case AttackKind::Jamming: return "jamming";
    case AttackKind::Replay: return "replay";
    case AttackKind::DataAlteration: return "data_alteration";
  }
  return "?";
}

std::optional<AttackKind> attack_kind_from_string(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(AttackKind::DataAlteration); ++k) {
    const auto kind = static_cast<AttackKind>(k);
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

SimTime AttackSpec::emit_period_ms() const {
  if (rate_per_s <= 0.0) throw std::invalid_argument("attack rate must be > 0");
  const SimTime period = static_cast<SimTime>(std::llround(1000.0 / rate_per_s));
  return period > 0 ? period : 1;
}

void AttackSpec::validate() const {
  if (attacker < 0) throw std::invalid_argument("attack needs an attacker node");
  if (start >= stop) throw std::invalid_argument("attack start must precede stop");
  if (rate_per_s <= 0.0) throw std::invalid_argument("attack rate must be > 0");
  if (kind == AttackKind::SelectiveForwarding &&
      (drop_ratio <= 0.0 || drop_ratio > 1.0))
    throw std::invalid_argument("selective forwarding drop_ratio must be in (0,1]");
  if (kind == AttackKind::Wormhole && peer < 0)
    throw std::invalid_argument("wormhole needs a peer node");
  if (kind == AttackKind::Sybil && fake_ids.empty())
    throw std::invalid_argument("sybil needs fake_ids");
  if ((kind == AttackKind::FalseIdBroadcastFlood || kind == AttackKind::FalseIdTargetFlood) &&
      fake_id < 0)
    throw std::invalid_argument("false-identity flood needs fake_id");
  if ((kind == AttackKind::TargetFlood || kind == AttackKind::FalseIdTargetFlood ||
       kind == AttackKind::Misdirection) &&
      target < 0)
    throw std::invalid_argument("attack needs a target node");
  if (kind == AttackKind::Jamming && (jam_corruption <= 0.0 || jam_corruption > 1.0))
    throw std::invalid_argument("jam_corruption must be in (0,1]");
  if (range_boost < 1.0) throw std::invalid_argument("range_boost must be >= 1");
}

bool selective_drop(const AttackSpec& spec, const Packet& pkt) {
  if (!spec.drop_tag.empty()) return pkt.payload_tag == spec.drop_tag;
  return unit_hash(static_cast<std::uint64_t>(pkt.seq)) < spec.drop_ratio;
}

ForwardDecision on_forward(const AttackSpec& spec, const Packet& pkt, SimTime now) {
  ForwardDecision d;
  if (!spec.active_at(now)) return d;
  switch (spec.kind) {
    case AttackKind::BlackHole:
      d.action = ForwardAction::Drop;
      break;
    case AttackKind::SelectiveForwarding:
      if (selective_drop(spec, pkt)) d.action = ForwardAction::Drop;
      break;
    case AttackKind::Misdirection:
      d.action = ForwardAction::Misroute;
      d.next_hop = spec.target;
      break;
    case AttackKind::Wormhole:
      d.action = ForwardAction::Tunnel;
      d.tunnel_peer = spec.peer;
      break;
    case AttackKind::DataAlteration:
      d.action = ForwardAction::Modify;
      d.new_tag = spec.altered_tag;
      break;
    default:
      break;  // generation-style attackers relay honestly
  }
  return d;
}

void AttackRuntime::remember(const Packet& pkt) {
  if (spec.kind != AttackKind::Replay) return;
  if (replay_buffer.size() >= kReplayCap) replay_buffer.pop_front();
  replay_buffer.push_back(pkt);
}

std::vector<Packet> on_generate(AttackRuntime& rt, SimTime at) {
  const AttackSpec& spec = rt.spec;
  if (!spec.active_at(at)) return {};
  std::vector<Packet> out;

  Packet p;
  p.true_src = spec.attacker;
  p.claimed_src = spec.attacker;
  p.sent_at = at;
  p.payload_tag = "attack";

  switch (spec.kind) {
    case AttackKind::HelloFlood:
      p.kind = PacketKind::Hello;
      p.dst = kBroadcast;
      out.push_back(p);
      break;
    case AttackKind::BroadcastFlood:
      p.kind = PacketKind::Data;
      p.dst = kBroadcast;
      out.push_back(p);
      break;
    case AttackKind::TargetFlood:
      p.kind = PacketKind::Data;
      p.dst = spec.target;
      out.push_back(p);
      break;
    case AttackKind::FalseIdBroadcastFlood:
      p.kind = PacketKind::Data;
      p.dst = kBroadcast;
      p.claimed_src = spec.fake_id;
      out.push_back(p);
      break;
    case AttackKind::FalseIdTargetFlood:
      p.kind = PacketKind::Data;
      p.dst = spec.target;
      p.claimed_src = spec.fake_id;
      out.push_back(p);
      break;
    case AttackKind::Sybil:
      p.kind = PacketKind::Data;
      p.dst = kBroadcast;
      p.claimed_src = spec.fake_ids[rt.rotation_index % spec.fake_ids.size()];
      rt.rotation_index += 1;
      out.push_back(p);
      break;
    case AttackKind::SinkHole:
      p.kind = PacketKind::RouteAdvert;
      p.dst = kBroadcast;
      p.payload_tag = "attractive_route";
      out.push_back(p);
      break;
    case AttackKind::Replay:
      if (!rt.replay_buffer.empty()) {
        Packet replayed = rt.replay_buffer.front();
        rt.replay_buffer.pop_front();
        replayed.true_src = spec.attacker;
        replayed.sent_at = at;
        replayed.hop_trace.clear();
        out.push_back(std::move(replayed));
      }
      break;
    default:
      break;  // relay-style attackers generate nothing
  }
  return out;
}

}  // namespace wsnids
