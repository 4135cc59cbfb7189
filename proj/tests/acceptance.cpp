// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wsnids/agent.hpp"
#include "wsnids/mac.hpp"
#include "wsnids/response.hpp"
#include "wsnids/scenario.hpp"
#include "wsnids/simulation.hpp"
#include "wsnids/topology.hpp"

using namespace wsnids;

namespace {

struct CheckFailure {
  std::string what;
};

void expect(bool cond, const std::string& what) {
  if (!cond) throw CheckFailure{what};
}

// ---------------------------------------------------------------------------
// shared scenario builders

Scenario desk_scenario(std::uint64_t seed, int regions = 2, int cells = 3, int sensors = 5,
                       SimTime duration = 25000) {
  Scenario s;
  s.topology.regions = regions;
  s.topology.cells_per_region = cells;
  s.topology.sensors_per_cell = sensors;
  s.topology.cell_radius = 50.0;
  s.topology.rng_seed = seed;
  s.topology.radio_range = 125.0;
  s.duration_ms = duration;
  s.seed = seed;
  return s;
}

// Relay geometry: short sensor reach so in-cell traffic passes through
// relays the attacker can subvert.
Scenario relay_scenario(std::uint64_t seed) {
  Scenario s = desk_scenario(seed, 1, 2, 8, 45000);
  s.topology.radio_range = 30.0;
  return s;
}

bool fully_connected(const Topology& topo) {
  for (const NodeInfo& n : topo.nodes()) {
    if (n.role != NodeRole::Sensor) continue;
    if (!expected_route(topo, n.id, topo.cluster_of_cell(n.cell_index))) return false;
  }
  return true;
}

// First sensor of cell 0 that relays for at least one other sensor.
NodeId find_relay(const Topology& topo) {
  for (NodeId candidate : topo.sensors_of_cell(0)) {
    const NodeId cluster = topo.cluster_of_cell(0);
    for (NodeId victim : topo.sensors_of_cell(0)) {
      if (victim == candidate) continue;
      const auto r = expected_route(topo, victim, cluster);
      if (r && r->size() >= 3 && (*r)[1] == candidate) return candidate;
    }
  }
  return kInvalidNode;
}

std::uint64_t find_relay_seed(NodeId& attacker_out) {
  for (std::uint64_t seed = 1; seed < 200; ++seed) {
    const Scenario s = relay_scenario(seed);
    const Topology topo = build_topology(s.topology);
    if (!fully_connected(topo)) continue;
    const NodeId relay = find_relay(topo);
    if (relay != kInvalidNode) {
      attacker_out = relay;
      return seed;
    }
  }
  throw CheckFailure{"no relay geometry found in 200 seeds"};
}

SimTime first_entry(const MetricsReport& m, NodeId node,
                    const std::vector<std::string>& states) {
  const auto it = m.class_timeline.find(node);
  if (it == m.class_timeline.end()) return -1;
  for (const auto& [state, at] : it->second)
    for (const std::string& want : states)
      if (state == want) return at;
  return -1;
}

const AttackOutcome& single_attack(const MetricsReport& m) {
  expect(m.attacks.size() == 1, "expected exactly one attack outcome");
  return m.attacks[0];
}

void check_detected_and_isolated(const MetricsReport& m, const std::string& kind) {
  const AttackOutcome& out = single_attack(m);
  expect(out.detected, kind + ": not detected");
  expect(out.detection_latency_ms.has_value(), kind + ": no detection latency");
  const SimTime entry = first_entry(m, out.principal, {"suspect", "malicious"});
  expect(entry >= 0, kind + ": principal never reached suspect or malicious");
  expect(entry <= 30000, kind + ": isolation after the 30 s bound (at " +
                             std::to_string(entry) + " ms)");
  expect(out.classified, kind + ": principal has no classification record");
  expect(out.final_class == NodeClass::Suspect || out.final_class == NodeClass::Malicious,
         kind + ": final class is not suspect or malicious");
}

// ---------------------------------------------------------------------------
// criterion 1: response machine conformance

void criterion_state_machine() {
  const ResponseParams p;
  const SimTime W = 1000;
  auto fresh = [] {
    NodeClassRecord r;
    r.node = 1;
    r.state = NodeClass::Fresh;
    r.entered_at = 0;
    return r;
  };
  auto step_w = [&](NodeClassRecord& r, Verdict v, int w) {
    return step(r, v, static_cast<SimTime>(w) * W, p, W);
  };

  {  // Fresh + good until the probation timer: Member exactly then.
    NodeClassRecord r = fresh();
    for (int w = 1; w < p.t_fresh; ++w) {
      step_w(r, Verdict::Good, w);
      expect(r.state == NodeClass::Fresh, "fresh promoted early");
    }
    expect(step_w(r, Verdict::Good, p.t_fresh).after == NodeClass::Member,
           "fresh not promoted at the probation boundary");
  }
  {  // Fresh + misbehaved: straight to Suspect.
    NodeClassRecord r = fresh();
    expect(step_w(r, Verdict::Misbehaved, 1).after == NodeClass::Suspect,
           "fresh misbehavior did not suspend");
  }
  {  // Member cycles through Unstable and back on sustained good behavior.
    NodeClassRecord r = fresh();
    r.state = NodeClass::Member;
    expect(step_w(r, Verdict::Misbehaved, 10).after == NodeClass::Unstable,
           "member misbehavior did not destabilize");
    for (int w = 11; w < 11 + p.t_unstable_obs - 1; ++w) step_w(r, Verdict::Good, w);
    expect(r.state == NodeClass::Unstable, "unstable recovered early");
    expect(step_w(r, Verdict::Good, 11 + p.t_unstable_obs - 1).after == NodeClass::Member,
           "unstable did not recover");
  }
  {  // Misbehavior streak escalates.
    NodeClassRecord r = fresh();
    r.state = NodeClass::Member;
    int w = 10;
    step_w(r, Verdict::Misbehaved, w++);
    for (int i = 1; i < p.t_mis - 1; ++i) step_w(r, Verdict::Misbehaved, w++);
    expect(r.state == NodeClass::Unstable, "streak escalated early");
    expect(step_w(r, Verdict::Misbehaved, w).after == NodeClass::Suspect,
           "streak did not escalate");
  }
  {  // Flip counting escalates.
    NodeClassRecord r = fresh();
    r.state = NodeClass::Member;
    int w = 10;
    step_w(r, Verdict::Misbehaved, w++);
    for (int i = 0; i < p.t_unstable_obs; ++i) step_w(r, Verdict::Good, w++);
    expect(r.state == NodeClass::Member, "flip fixture broken");
    step_w(r, Verdict::Misbehaved, w++);
    expect(step_w(r, Verdict::Good, w).after == NodeClass::Suspect,
           "three interchanges did not escalate");
  }
  {  // Suspect: ban, then post-ban verdicts decide.
    NodeClassRecord r = fresh();
    step_w(r, Verdict::Misbehaved, 1);
    for (int w = 2; w <= p.t_ban; ++w) {
      step_w(r, Verdict::Misbehaved, w);
      expect(r.state == NodeClass::Suspect, "ban ended early");
    }
    NodeClassRecord reformed = r;
    int w = p.t_ban + 1;
    for (int i = 0; i < p.t_suspect_obs - 1; ++i) step_w(reformed, Verdict::Good, w + i);
    expect(reformed.state == NodeClass::Suspect, "observation ended early");
    expect(step_w(reformed, Verdict::Good, w + p.t_suspect_obs - 1).after == NodeClass::Unstable,
           "reformed suspect not demoted to unstable");
    expect(step_w(r, Verdict::Misbehaved, w).after == NodeClass::Malicious,
           "post-ban misbehavior not terminal");
  }
  {  // Malicious absorbs 100 random verdict sequences.
    std::mt19937 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      NodeClassRecord r = fresh();
      step_w(r, Verdict::Misbehaved, 1);
      int w = p.t_ban + 1;
      step_w(r, Verdict::Misbehaved, w++);
      expect(r.state == NodeClass::Malicious, "setup for absorption failed");
      for (int i = 0; i < 40; ++i) {
        const Verdict v = rng() % 2 ? Verdict::Good : Verdict::Misbehaved;
        expect(step_w(r, v, w++).after == NodeClass::Malicious, "malicious not absorbing");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// criterion 2: permission matrix + suspect isolation in traces

void criterion_permissions() {
  const SimTime now = 50000;
  auto rec_in = [&](NodeClass state, bool banned) {
    NodeClassRecord r;
    r.node = 1;
    r.state = state;
    r.ban_until = banned ? now + 1000 : now - 1000;
    return r;
  };
  struct Row {
    NodeClass state;
    bool banned;
    bool originate, forward, receive;
  };
  const std::vector<Row> table = {
      {NodeClass::Fresh, false, false, true, true},
      {NodeClass::Member, false, true, true, true},
      {NodeClass::Unstable, false, false, true, true},
      {NodeClass::Suspect, true, false, false, false},
      {NodeClass::Malicious, false, false, false, false},
  };
  for (const Row& row : table) {
    const NodeClassRecord r = rec_in(row.state, row.banned);
    expect(permit(r, NodeAction::Originate, now) == row.originate, "originate permission wrong");
    expect(permit(r, NodeAction::Forward, now) == row.forward, "forward permission wrong");
    expect(permit(r, NodeAction::Receive, now) == row.receive, "receive permission wrong");
  }

  // Trace-level isolation: a flooding sensor reaches Suspect; during its ban
  // nothing is delivered from it or to it.
  Scenario s = desk_scenario(61, 1, 2, 5, 35000);
  const Topology topo = build_topology(s.topology);
  AttackSpec a;
  a.kind = AttackKind::HelloFlood;
  a.attacker = topo.sensors_of_cell(0).front();
  a.rate_per_s = 100.0;
  a.range_boost = 1.0;
  a.start = 17000;
  a.stop = 35000;
  s.attacks.push_back(a);
  Simulation sim(s);
  const MetricsReport m = sim.run();
  const SimTime suspect_at = first_entry(m, a.attacker, {"suspect"});
  expect(suspect_at > 0, "flooder never suspended");
  const SimTime ban_until = suspect_at + 10 * 1000;
  std::istringstream in(sim.trace().text());
  std::string line;
  const std::string from_key = "from=" + std::to_string(a.attacker) + " ";
  const std::string actor_key = "actor=" + std::to_string(a.attacker) + " ";
  while (std::getline(in, line)) {
    if (line.find("ev=rx") == std::string::npos) continue;
    const SimTime t = std::stoll(line.substr(line.find("t=") + 2));
    if (t <= suspect_at || t >= ban_until) continue;
    expect(line.find(actor_key) == std::string::npos, "suspect received traffic during its ban");
    if (line.find(from_key) != std::string::npos)
      expect(line.find("discard=1") != std::string::npos,
             "suspect traffic delivered during its ban");
  }
}

// ---------------------------------------------------------------------------
// criterion 3: attack-free soundness over 20 seeds

void criterion_attack_free() {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Simulation sim(desk_scenario(seed));
    const MetricsReport m = sim.run();
    expect(m.false_positive_count == 0,
           "seed " + std::to_string(seed) + ": false positives " +
               std::to_string(m.false_positive_count));
    expect(m.alerts_by_detector.count("tdma") == 0,
           "seed " + std::to_string(seed) + ": slot violations");
    expect(m.alerts_by_detector.count("smac") == 0,
           "seed " + std::to_string(seed) + ": sleep violations");
    for (const auto& [node, timeline] : m.class_timeline)
      for (const auto& [state, at] : timeline)
        expect(state == "member",
               "seed " + std::to_string(seed) + ": node " + std::to_string(node) +
                   " entered " + state);
  }
}

// ---------------------------------------------------------------------------
// criterion 4: end-to-end detection for the attack catalog

void criterion_detection() {
  {  // black hole (relay) -> Malicious
    NodeId attacker = kInvalidNode;
    const std::uint64_t seed = find_relay_seed(attacker);
    Scenario s = relay_scenario(seed);
    AttackSpec a;
    a.kind = AttackKind::BlackHole;
    a.attacker = attacker;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    const MetricsReport m = sim.run();
    check_detected_and_isolated(m, "black_hole");
    expect(single_attack(m).final_class == NodeClass::Malicious,
           "black_hole: did not reach malicious");
  }
  {  // selective forwarding at ratio 0.5
    NodeId attacker = kInvalidNode;
    const std::uint64_t seed = find_relay_seed(attacker);
    Scenario s = relay_scenario(seed);
    AttackSpec a;
    a.kind = AttackKind::SelectiveForwarding;
    a.attacker = attacker;
    a.drop_ratio = 0.5;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    check_detected_and_isolated(sim.run(), "selective_forwarding");
  }
  {  // hello flood
    Scenario s = desk_scenario(62, 1, 2, 5, 45000);
    const Topology topo = build_topology(s.topology);
    AttackSpec a;
    a.kind = AttackKind::HelloFlood;
    a.attacker = topo.sensors_of_cell(0).front();
    a.rate_per_s = 100.0;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    check_detected_and_isolated(sim.run(), "hello_flood");
  }
  {  // sybil with a cross-cell identity claim
    Scenario s = desk_scenario(63, 1, 2, 5, 45000);
    const Topology topo = build_topology(s.topology);
    const NodeId attacker = topo.sensors_of_cell(1).front();
    AttackSpec a;
    a.kind = AttackKind::Sybil;
    a.attacker = attacker;
    a.fake_ids = {attacker, topo.sensors_of_cell(0).front(), 900};
    a.rate_per_s = 50.0;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    const MetricsReport m = sim.run();
    check_detected_and_isolated(m, "sybil");
    // The cross-cell condition itself fired somewhere.
    bool sybil_label = false;
    std::istringstream in(sim.trace().text());
    std::string line;
    while (std::getline(in, line))
      if (line.find("label=sybil") != std::string::npos) sybil_label = true;
    expect(sybil_label, "sybil: no cross-cell finding");
  }
  {  // false-identity flood framing a real sensor -> Malicious
    Scenario s = desk_scenario(64, 1, 2, 5, 45000);
    const Topology topo = build_topology(s.topology);
    const NodeId attacker = topo.sensors_of_cell(0)[0];
    const NodeId victim = topo.sensors_of_cell(0)[1];
    AttackSpec a;
    a.kind = AttackKind::FalseIdTargetFlood;
    a.attacker = attacker;
    a.fake_id = victim;
    a.target = topo.cluster_of_cell(0);
    a.rate_per_s = 100.0;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    const MetricsReport m = sim.run();
    check_detected_and_isolated(m, "false_id_target_flood");
    expect(single_attack(m).final_class == NodeClass::Malicious,
           "false_id flood: claimed identity did not reach malicious");
  }
  {  // misdirection to a distant in-range node
    NodeId attacker = kInvalidNode;
    std::uint64_t seed = 0;
    NodeId target = kInvalidNode;
    for (std::uint64_t cand_seed = 1; cand_seed < 200 && target == kInvalidNode; ++cand_seed) {
      const Scenario cand = relay_scenario(cand_seed);
      const Topology topo = build_topology(cand.topology);
      if (!fully_connected(topo)) continue;
      const NodeId relay = find_relay(topo);
      if (relay == kInvalidNode) continue;
      const NodeId cluster = topo.cluster_of_cell(0);
      const auto want = expected_route(topo, relay, cluster);
      for (NodeId d : topo.sensors_of_cell(0)) {
        if (d == relay) continue;
        if (want && want->size() >= 2 && d == (*want)[1]) continue;  // not a detour
        if (distance(topo.node(relay).pos, topo.node(d).pos) <= cand.topology.radio_range) {
          attacker = relay;
          target = d;
          seed = cand_seed;
          break;
        }
      }
    }
    expect(target != kInvalidNode, "misdirection: no geometry found");
    Scenario s = relay_scenario(seed);
    AttackSpec a;
    a.kind = AttackKind::Misdirection;
    a.attacker = attacker;
    a.target = target;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    check_detected_and_isolated(sim.run(), "misdirection");
  }
  {  // wormhole pair tunneling across cells
    NodeId ingress = kInvalidNode;
    NodeId egress = kInvalidNode;
    std::uint64_t seed = 0;
    for (std::uint64_t cand_seed = 1; cand_seed < 200 && egress == kInvalidNode; ++cand_seed) {
      const Scenario cand = relay_scenario(cand_seed);
      const Topology topo = build_topology(cand.topology);
      if (!fully_connected(topo)) continue;
      const NodeId relay = find_relay(topo);
      if (relay == kInvalidNode) continue;
      for (NodeId peer : topo.sensors_of_cell(1)) {
        if (distance(topo.node(relay).pos, topo.node(peer).pos) > cand.topology.radio_range) {
          ingress = relay;
          egress = peer;
          seed = cand_seed;
          break;
        }
      }
    }
    expect(egress != kInvalidNode, "wormhole: no geometry found");
    Scenario s = relay_scenario(seed);
    AttackSpec a;
    a.kind = AttackKind::Wormhole;
    a.attacker = ingress;
    a.peer = egress;
    a.range_boost = 10.0;
    a.start = 17000;
    a.stop = 40000;
    s.attacks.push_back(a);
    Simulation sim(s);
    const MetricsReport m = sim.run();
    check_detected_and_isolated(m, "wormhole");
  }
  {  // jamming
    Scenario s = desk_scenario(65, 1, 2, 5, 45000);
    const Topology topo = build_topology(s.topology);
    AttackSpec a;
    a.kind = AttackKind::Jamming;
    a.attacker = topo.sensors_of_cell(0).front();
    a.jam_corruption = 0.8;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    check_detected_and_isolated(sim.run(), "jamming");
  }
  {  // replay
    Scenario s = desk_scenario(66, 1, 2, 5, 45000);
    const Topology topo = build_topology(s.topology);
    AttackSpec a;
    a.kind = AttackKind::Replay;
    a.attacker = topo.sensors_of_cell(0).front();
    a.rate_per_s = 20.0;
    a.start = 17000;
    a.stop = 45000;
    s.attacks.push_back(a);
    Simulation sim(s);
    check_detected_and_isolated(sim.run(), "replay");
  }
}

// ---------------------------------------------------------------------------
// criterion 5: detector completeness on spoofed and tunneled traffic

void criterion_completeness() {
  {  // every spoofed emission outside the victim's slot is flagged
    Scenario s = desk_scenario(64, 1, 2, 5, 45000);
    const Topology topo = build_topology(s.topology);
    AttackSpec a;
    a.kind = AttackKind::FalseIdTargetFlood;
    a.attacker = topo.sensors_of_cell(0)[0];
    a.fake_id = topo.sensors_of_cell(0)[1];
    a.target = topo.cluster_of_cell(0);
    a.rate_per_s = 100.0;
    a.start = 17000;
    a.stop = 40000;
    s.attacks.push_back(a);
    Simulation sim(s);
    sim.run();
    int outside = 0;
    int flagged = 0;
    for (const Simulation::SpoofEmission& e : sim.spoof_log()) {
      if (e.claimed != a.fake_id || e.in_claimed_slot) continue;
      outside += 1;
      if (e.flagged) flagged += 1;
    }
    expect(outside > 100, "spoof fixture produced too few spoofed emissions");
    expect(flagged == outside, "spoofed emissions missed by the slot check: " +
                                   std::to_string(outside - flagged) + " of " +
                                   std::to_string(outside));
  }
  {  // every tunneled delivery produces a route deviation
    NodeId ingress = kInvalidNode;
    NodeId egress = kInvalidNode;
    std::uint64_t seed = 0;
    for (std::uint64_t cand_seed = 1; cand_seed < 200 && egress == kInvalidNode; ++cand_seed) {
      const Scenario cand = relay_scenario(cand_seed);
      const Topology topo = build_topology(cand.topology);
      if (!fully_connected(topo)) continue;
      const NodeId relay = find_relay(topo);
      if (relay == kInvalidNode) continue;
      for (NodeId peer : topo.sensors_of_cell(1)) {
        if (distance(topo.node(relay).pos, topo.node(peer).pos) > cand.topology.radio_range) {
          ingress = relay;
          egress = peer;
          seed = cand_seed;
          break;
        }
      }
    }
    expect(egress != kInvalidNode, "wormhole completeness: no geometry found");
    Scenario s = relay_scenario(seed);
    AttackSpec a;
    a.kind = AttackKind::Wormhole;
    a.attacker = ingress;
    a.peer = egress;
    a.range_boost = 10.0;
    a.start = 17000;
    a.stop = 40000;
    s.attacks.push_back(a);
    Simulation sim(s);
    sim.run();
    expect(!sim.tunnel_log().empty(), "no tunneled deliveries happened");
    int unflagged = 0;
    for (const Simulation::TunneledDelivery& d : sim.tunnel_log())
      if (!d.route_flagged) unflagged += 1;
    expect(unflagged == 0, std::to_string(unflagged) + " tunneled deliveries escaped the "
                           "route check of " + std::to_string(sim.tunnel_log().size()));
  }
}

// ---------------------------------------------------------------------------
// criterion 6: failover for a cluster monitor and a regional monitor

void criterion_failover() {
  {  // cluster monitor kill
    Scenario s = desk_scenario(67, 1, 2, 5, 40000);
    s.topology.radio_range = 150.0;
    const Topology topo = build_topology(s.topology);
    const NodeId failed = topo.cluster_of_cell(0);
    const NodeId survivor = topo.cluster_of_cell(1);
    // Drive one adopted sensor into Suspect before the kill so continuity is
    // observable.
    AttackSpec a;
    a.kind = AttackKind::HelloFlood;
    a.attacker = topo.sensors_of_cell(0).front();
    a.rate_per_s = 100.0;
    a.range_boost = 1.0;
    a.start = 17000;
    a.stop = 40000;
    s.attacks.push_back(a);
    s.failures.push_back({failed, 24500});
    Simulation sim(s);
    const MetricsReport m = sim.run();

    // Conservation of children.
    for (NodeId sensor : topo.sensors_of_cell(0)) {
      expect(sim.monitor_of(sensor) == survivor, "adopted sensor not re-parented");
      expect(sim.record_of(sensor) != nullptr, "adopted sensor lost its record");
    }
    // Classification continuity: the suspect kept its original ban deadline.
    const SimTime suspect_at = first_entry(m, a.attacker, {"suspect"});
    expect(suspect_at > 0 && suspect_at < 24500, "suspect entry not before the kill");
    const NodeClassRecord* rec = sim.record_of(a.attacker);
    expect(rec != nullptr, "attacker record missing after takeover");
    expect(rec->ban_until == suspect_at + 10 * 1000, "ban deadline not preserved");
    // Bounded disruption.
    expect(m.failover_disruption_windows.count(failed) == 1, "no disruption metric");
    expect(m.failover_disruption_windows.at(failed) <= 3 + 2, "disruption exceeded the bound");
    // Backup property: the takeover's adopted-cell policy equals the base
    // station's latest for that scope.
    const PolicySet* adopted = sim.monitor_policy(survivor, 0);
    expect(adopted != nullptr, "takeover holds no policy for the adopted cell");
    const PolicySet& master = sim.base_policy_store().effective(0, 0);
    expect(adopted->version == master.version, "adopted policy version differs");
    expect(adopted->signature_rules.size() == master.signature_rules.size(),
           "adopted rule set differs");
    expect(adopted->blacklist == master.blacklist, "adopted blacklist differs");
    expect(adopted->anomaly_profile.sensitivity_k == master.anomaly_profile.sensitivity_k,
           "adopted sensitivity differs");
  }
  {  // regional monitor kill
    Scenario s = desk_scenario(68, 2, 2, 4, 40000);
    s.topology.radio_range = 150.0;
    const Topology topo = build_topology(s.topology);
    const NodeId failed = topo.regional_of_region(0);
    const NodeId takeover = topo.regional_of_region(1);
    s.failures.push_back({failed, 20500});
    Simulation sim(s);
    const MetricsReport m = sim.run();
    expect(m.failover_count >= 1, "regional failover did not happen");
    for (int c : topo.cells_of_region(0))
      expect(sim.reports_ingested_by(takeover, topo.cluster_of_cell(c)) > 0,
             "cluster did not re-parent to the takeover regional");
    expect(m.failover_disruption_windows.count(failed) == 1, "no regional disruption metric");
    expect(m.failover_disruption_windows.at(failed) <= 3 + 2,
           "regional disruption exceeded the bound");
    // No sensor lost its monitor.
    for (const NodeInfo& n : topo.nodes())
      if (n.role == NodeRole::Sensor)
        expect(sim.record_of(n.id) != nullptr, "sensor lost its record after regional failover");
  }
}

// ---------------------------------------------------------------------------
// criterion 7: a policy retune flips a borderline verdict

void criterion_policy_roundtrip() {
  AnomalyProfile profile;
  profile.sensitivity_k = 3.0;
  for (int i = 0; i < 20; ++i) {
    StimulusVector v;
    v.per_source[1].pkt_count = i % 2 == 0 ? 9 : 11;
    anomaly_learn(profile, v);
  }
  anomaly_freeze(profile);
  const double sd = profile.baselines.at("pkt_count").stddev;
  expect(sd > 0.0, "fixture variance collapsed");
  StimulusVector borderline;
  borderline.per_source[1].pkt_count = static_cast<int>(std::lround(10.0 + 2.5 * sd));
  expect(detect_anomaly(profile, borderline, 0).empty(),
         "2.5 sigma flagged at sensitivity 3.0");

  Scenario s = desk_scenario(69, 1, 1, 4, 25000);
  Simulation sim(s);
  sim.schedule(5000, [&] {
    sim.base_policy_store().idt_set_anomaly_sensitivity(PolicyScope::global(), 2.0);
    sim.bpdp_disseminate(PolicyScope::global(), 5000);
  });
  sim.run();
  const PolicySet* applied = sim.monitor_policy(sim.topology().cluster_of_cell(0), 0);
  expect(applied != nullptr, "monitor lost its policy");
  expect(applied->anomaly_profile.sensitivity_k == 2.0, "retuned sensitivity not applied");

  AnomalyProfile retuned = profile;
  retuned.sensitivity_k = applied->anomaly_profile.sensitivity_k;
  bool flagged = false;
  for (const Finding& f : detect_anomaly(retuned, borderline, 0))
    if (f.feature == "pkt_count") flagged = true;
  expect(flagged, "2.5 sigma not flagged at sensitivity 2.0");
}

// ---------------------------------------------------------------------------
// criterion 8: hierarchical monitoring beats per-sensor monitoring on energy

void criterion_energy() {
  Scenario s = desk_scenario(70, 1, 2, 5, 30000);
  const Topology topo = build_topology(s.topology);
  AttackSpec a;
  a.kind = AttackKind::HelloFlood;
  a.attacker = topo.sensors_of_cell(0).front();
  a.rate_per_s = 100.0;
  a.start = 17000;
  a.stop = 30000;
  s.attacks.push_back(a);

  Scenario hierarchical = s;
  hierarchical.ids_mode = IdsMode::Hierarchical;
  Scenario per_sensor = s;
  per_sensor.ids_mode = IdsMode::EverySensor;

  Simulation hsim(hierarchical);
  const MetricsReport hm = hsim.run();
  Simulation bsim(per_sensor);
  const MetricsReport bm = bsim.run();

  expect(bm.ids_energy_mj > 0.0, "baseline mode inspected nothing");
  expect(hm.ids_energy_mj < bm.ids_energy_mj,
         "hierarchical detection energy is not lower (" + std::to_string(hm.ids_energy_mj) +
             " vs " + std::to_string(bm.ids_energy_mj) + ")");
  expect(bm.alert_broadcast_count > 0, "baseline mode broadcast no alerts");
  expect(hm.alert_broadcast_count < bm.alert_broadcast_count,
         "hierarchical mode does not broadcast fewer alerts");
  const CompareResult ratios = compare(bm, hm);
  expect(ratios.ids_energy_ratio < 1.0, "detection energy ratio not below one");
}

// ---------------------------------------------------------------------------
// criterion 9: determinism

void criterion_determinism() {
  Scenario s = desk_scenario(71, 1, 2, 5, 25000);
  const Topology topo = build_topology(s.topology);
  AttackSpec a;
  a.kind = AttackKind::Jamming;  // exercises the stochastic corruption path
  a.attacker = topo.sensors_of_cell(0).front();
  a.jam_corruption = 0.5;
  a.start = 17000;
  a.stop = 25000;
  s.attacks.push_back(a);
  Simulation sim1(s);
  const MetricsReport m1 = sim1.run();
  Simulation sim2(s);
  const MetricsReport m2 = sim2.run();
  expect(sim1.trace().text() == sim2.trace().text(), "traces differ between identical runs");
  expect(m1.to_kv() == m2.to_kv(), "metrics differ between identical runs");
}

// ---------------------------------------------------------------------------
// criterion 10: implementation vs brute-force oracles

void dfs_paths(const Topology& t, NodeId cur, NodeId dst, std::vector<NodeId>& path,
               std::vector<bool>& used, std::vector<std::vector<NodeId>>& out) {
  if (cur == dst) {
    out.push_back(path);
    return;
  }
  for (const NodeInfo& n : t.nodes()) {
    if (used[static_cast<std::size_t>(n.id)]) continue;
    if (distance(t.node(cur).pos, n.pos) > t.range_of(cur)) continue;
    used[static_cast<std::size_t>(n.id)] = true;
    path.push_back(n.id);
    dfs_paths(t, n.id, dst, path, used, out);
    path.pop_back();
    used[static_cast<std::size_t>(n.id)] = false;
  }
}

void criterion_oracles() {
  // Route oracle on ten random graphs of at most ten nodes.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TopologyConfig c;
    c.regions = 2;
    c.cells_per_region = 1;
    c.sensors_per_cell = 2;
    c.cell_radius = 60.0;
    c.rng_seed = seed;
    c.radio_range = 75.0;
    const Topology t = build_topology(c);
    expect(t.nodes().size() <= 10, "oracle graph too large");
    for (const NodeInfo& a : t.nodes()) {
      for (const NodeInfo& b : t.nodes()) {
        if (a.id == b.id) continue;
        std::vector<std::vector<NodeId>> all;
        std::vector<NodeId> path{a.id};
        std::vector<bool> used(t.nodes().size(), false);
        used[static_cast<std::size_t>(a.id)] = true;
        dfs_paths(t, a.id, b.id, path, used, all);
        std::optional<std::vector<NodeId>> want;
        for (const auto& p : all) {
          if (!want || p.size() < want->size() ||
              (p.size() == want->size() &&
               std::lexicographical_compare(p.begin(), p.end(), want->begin(), want->end())))
            want = p;
        }
        const auto got = expected_route(t, a.id, b.id);
        expect(got.has_value() == want.has_value(), "route reachability mismatch");
        if (got) expect(*got == *want, "route differs from the enumeration oracle");
      }
    }
  }

  // Slot ownership vs a per-millisecond table over three frames.
  TdmaSchedule tdma;
  tdma.slot_len = 10;
  tdma.slots = {11, 4, 9, 6};
  for (SimTime t = 0; t < 3 * tdma.frame_len(); ++t) {
    const std::size_t idx = static_cast<std::size_t>((t % tdma.frame_len()) / tdma.slot_len);
    expect(slot_owner(tdma, t) == tdma.slots[idx], "slot owner differs from the table");
  }

  // Sleep state vs a per-millisecond table over three periods.
  SmacSchedule smac;
  smac.period = 40;
  smac.awake[1] = {5, 10};
  smac.awake[2] = {35, 10};
  for (NodeId n : {1, 2}) {
    const auto& w = smac.awake[n];
    for (SimTime t = 0; t < 3 * smac.period; ++t) {
      bool awake = false;
      for (SimTime k = 0; k < w.duration; ++k)
        if ((w.offset + k) % smac.period == t % smac.period) awake = true;
      expect(is_asleep(smac, n, t) == !awake, "sleep state differs from the table");
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"criterion 1: response state machine conforms to the transition table",
       criterion_state_machine},
      {"criterion 2: permission matrix and suspect isolation", criterion_permissions},
      {"criterion 3: attack-free soundness over 20 seeds", criterion_attack_free},
      {"criterion 4: end-to-end detection of the attack catalog", criterion_detection},
      {"criterion 5: detector completeness on spoofed and tunneled traffic",
       criterion_completeness},
      {"criterion 6: cluster and regional failover", criterion_failover},
      {"criterion 7: policy retune flips a borderline verdict", criterion_policy_roundtrip},
      {"criterion 8: hierarchical energy beats per-sensor monitoring", criterion_energy},
      {"criterion 9: byte-identical reruns", criterion_determinism},
      {"criterion 10: brute-force oracle agreement", criterion_oracles},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
      std::cout << "[PASS] " << name << '\n';
    } catch (const CheckFailure& f) {
      std::cout << "[FAIL] " << name << " -- " << f.what << '\n';
      failures += 1;
    } catch (const std::exception& e) {
      std::cout << "[FAIL] " << name << " -- unexpected error: " << e.what() << '\n';
      failures += 1;
    }
  }
  if (failures > 0) std::cout << failures << " criteria failed\n";
  return failures == 0 ? 0 : 1;
}
