#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "wsnids/detectors.hpp"
#include "wsnids/scenario.hpp"
#include "wsnids/simulation.hpp"

using namespace wsnids;

namespace {

DetectorParams det() { return DetectorParams{}; }

RssiBaseline learned(std::initializer_list<std::pair<NodeId, double>> pairs) {
  RssiBaseline b;
  for (const auto& [src, rssi] : pairs) b.learn(src, rssi);
  b.freeze();
  return b;
}

Packet claimed_packet(NodeId claimed, std::vector<NodeId> trace, NodeId dst = 2) {
  Packet p;
  p.claimed_src = claimed;
  p.true_src = trace.empty() ? claimed : trace.front();
  p.dst = dst;
  p.hop_trace = std::move(trace);
  return p;
}

}  // namespace

TEST_CASE("matching signal strength raises nothing") {
  const RssiBaseline b = learned({{4, -60.0}});
  StimulusVector v;
  v.per_source[4].mean_rssi = -60.0;
  v.per_source[4].direct_count = 5;
  const auto findings = check_physical(v, b, det(), {}, 0);
  CHECK(findings.empty());
}

TEST_CASE("a relocated transmitter shows up as a signal-strength mismatch") {
  const RssiBaseline b = learned({{4, -60.0}});
  StimulusVector v;
  v.per_source[4].mean_rssi = -72.0;  // beyond the 6 dB tolerance
  v.per_source[4].direct_count = 5;
  const auto findings = check_physical(v, b, det(), {}, 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].label == "rssi_mismatch");
  CHECK(findings[0].severity == Severity::Misbehavior);
  CHECK(findings[0].subject == 4);
}

TEST_CASE("an unknown link is informational, not misbehavior") {
  const RssiBaseline b = learned({{4, -60.0}});
  StimulusVector v;
  v.per_source[9].mean_rssi = -50.0;
  v.per_source[9].direct_count = 1;
  const auto findings = check_physical(v, b, det(), {}, 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].label == "unknown_link");
  CHECK(findings[0].severity == Severity::Info);
}

TEST_CASE("delivery collapse without channel noise flags the source") {
  const RssiBaseline b = learned({{4, -60.0}});
  StimulusVector v;
  v.per_source[4].pdr = 0.2;
  v.per_source[4].pdr_defined = true;
  PhysicalContext ctx;
  ctx.carrier_busy_frac = 0.1;
  const auto findings = check_physical(v, b, det(), ctx, 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].label == "jamming");
  CHECK(findings[0].feature == "pdr");
}

TEST_CASE("a busy channel yields one jamming finding and spares the victims") {
  RssiBaseline b = learned({{4, -60.0}, {5, -72.0}});
  StimulusVector v;
  v.per_source[4].pdr = 0.1;
  v.per_source[4].pdr_defined = true;
  v.per_source[5].pdr = 0.15;
  v.per_source[5].pdr_defined = true;
  PhysicalContext ctx;
  ctx.carrier_busy_frac = 0.85;
  ctx.interference_rssi = -72.0;  // matches node 5's stored link strength
  const auto findings = check_physical(v, b, det(), ctx, 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].label == "jamming");
  CHECK(findings[0].subject == 5);
  CHECK(findings[0].severity == Severity::Misbehavior);
}

TEST_CASE("unmatched interference stays an unattributed alarm") {
  RssiBaseline b = learned({{4, -60.0}});
  StimulusVector v;
  PhysicalContext ctx;
  ctx.carrier_busy_frac = 0.9;
  ctx.interference_rssi = -90.0;
  const auto findings = check_physical(v, b, det(), ctx, 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].subject == kInvalidNode);
  CHECK(findings[0].severity == Severity::Info);
}

TEST_CASE("transmitting in the owned slot passes the schedule check") {
  TdmaSchedule s;
  s.slot_len = 10;
  s.slots = {4, 7};
  CHECK_FALSE(check_tdma(claimed_packet(4, {4}), 5, s, 0).has_value());
  CHECK_FALSE(check_tdma(claimed_packet(7, {7}), 15, s, 0).has_value());
}

TEST_CASE("a spoofed emission outside the victim's slot is flagged") {
  TdmaSchedule s;
  s.slot_len = 10;
  s.slots = {4, 7};
  const auto f = check_tdma(claimed_packet(4, {9}), 15, s, 0);
  REQUIRE(f.has_value());
  CHECK(f->label == "slot_violation");
  CHECK(f->subject == 4);
}

TEST_CASE("a spoofer that hits the victim's own slot evades the schedule check") {
  // Known detection gap: the slot check keys on timing only.
  TdmaSchedule s;
  s.slot_len = 10;
  s.slots = {4, 7};
  CHECK_FALSE(check_tdma(claimed_packet(4, {9}), 5, s, 0).has_value());
}

TEST_CASE("an awake sender passes the sleep check") {
  SmacSchedule s;
  s.period = 100;
  s.awake[4] = {10, 20};
  CHECK_FALSE(check_smac(claimed_packet(4, {4}), 15, s, 0).has_value());
}

TEST_CASE("a packet stamped into the claimed source's sleep period is flagged") {
  SmacSchedule s;
  s.period = 100;
  s.awake[4] = {10, 20};
  const auto f = check_smac(claimed_packet(4, {9}), 50, s, 0);
  REQUIRE(f.has_value());
  CHECK(f->label == "sleep_violation");
}

TEST_CASE("an always-awake schedule never fires") {
  SmacSchedule s;
  s.period = 100;
  s.awake[4] = {0, 100};
  for (SimTime t = 0; t < 300; t += 13)
    CHECK_FALSE(check_smac(claimed_packet(4, {4}), t, s, 0).has_value());
}

TEST_CASE("an honest delivery matches its expected route") {
  const auto always = [](NodeId, NodeId) { return true; };
  const auto res = check_route(claimed_packet(1, {1, 5}), {1, 5, 2}, always, 0);
  CHECK_FALSE(res.deviated);
  CHECK(res.findings.empty());
}

TEST_CASE("a tunneled delivery yields a deviation and flags both endpoints") {
  // Trace jumps from the ingress attacker to its far peer.
  const auto hop_possible = [](NodeId a, NodeId b) { return !(a == 5 && b == 8); };
  const auto res = check_route(claimed_packet(1, {1, 5, 8}), {1, 5, 2}, hop_possible, 0);
  CHECK(res.deviated);
  REQUIRE(res.findings.size() >= 3);
  CHECK(res.findings[0].severity == Severity::Info);
  CHECK(res.findings[0].subject == 1);  // claimed source may be a victim
  std::set<NodeId> culprits;
  for (std::size_t i = 1; i < res.findings.size(); ++i) {
    CHECK(res.findings[i].severity == Severity::Misbehavior);
    culprits.insert(res.findings[i].subject);
  }
  CHECK(culprits == std::set<NodeId>{5, 8});
}

TEST_CASE("a misdirected detour blames the node that forwarded off the path") {
  const auto always = [](NodeId, NodeId) { return true; };
  // Expected S -> M -> dst; actual S -> M -> D -> dst.
  const auto res = check_route(claimed_packet(1, {1, 5, 9}), {1, 5, 2}, always, 0);
  CHECK(res.deviated);
  std::set<NodeId> culprits;
  for (const Finding& f : res.findings)
    if (f.severity == Severity::Misbehavior) culprits.insert(f.subject);
  CHECK(culprits.count(5) == 1);
}

TEST_CASE("spoof attribution names the member whose signal matches") {
  const RssiBaseline b = learned({{4, -60.0}, {6, -75.0}});
  // A direct emission claims node 4 but arrives at node 6's strength.
  const auto f = attribute_spoof(4, -75.0, b, det(), 0);
  REQUIRE(f.has_value());
  CHECK(f->subject == 6);
  CHECK(f->label == "source_spoof");
}

TEST_CASE("spoof attribution stays quiet for matching strength or unknown links") {
  const RssiBaseline b = learned({{4, -60.0}, {6, -75.0}});
  CHECK_FALSE(attribute_spoof(4, -61.0, b, det(), 0).has_value());
  CHECK_FALSE(attribute_spoof(99, -80.0, b, det(), 0).has_value());
  // Mismatch with no member near the observed strength: unattributed.
  CHECK_FALSE(attribute_spoof(4, -90.0, b, det(), 0).has_value());
}

TEST_CASE("a healthy child passes the watchdog") {
  WatchdogView view;
  view.missed_reports = 0;
  view.have_summary = true;
  view.packets_seen = 100;
  view.packets_forwarded = 100;
  CHECK(watchdog_check(3, view, det(), 0).empty());
}

TEST_CASE("missed reports at the limit raise a watchdog finding") {
  WatchdogView view;
  view.missed_reports = 3;
  const auto findings = watchdog_check(3, view, det(), 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].label == "missed_reports");
}

TEST_CASE("forwarding more than seen is inconsistent") {
  WatchdogView view;
  view.have_summary = true;
  view.packets_seen = 10;
  view.packets_forwarded = 20;
  const auto findings = watchdog_check(3, view, det(), 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].label == "summary_inconsistent");
}

TEST_CASE("a silent shortfall while claiming health is flagged") {
  WatchdogView view;
  view.have_summary = true;
  view.packets_seen = 100;
  view.packets_forwarded = 10;
  view.findings_reported = 0;
  const auto findings = watchdog_check(3, view, det(), 0);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].label == "forwarding_shortfall");
}

// --- full-run fixtures ---

namespace {
Scenario base_scenario(std::uint64_t seed, SimTime duration = 30000) {
  Scenario s;
  s.topology.regions = 1;
  s.topology.cells_per_region = 2;
  s.topology.sensors_per_cell = 5;
  s.topology.rng_seed = seed;
  s.duration_ms = duration;
  s.seed = seed;
  return s;
}
}  // namespace

TEST_CASE("attack-free runs never violate the MAC schedules") {
  for (std::uint64_t seed : {31, 32, 33}) {
    Simulation sim(base_scenario(seed, 25000));
    const auto metrics = sim.run();
    CHECK(metrics.alerts_by_detector.count("tdma") == 0);
    CHECK(metrics.alerts_by_detector.count("smac") == 0);
    CHECK(metrics.false_positive_count == 0);
  }
}

TEST_CASE("a jammed cell is detected within three windows") {
  Scenario s = base_scenario(34, 30000);
  const Topology topo = build_topology(s.topology);
  AttackSpec jam;
  jam.kind = AttackKind::Jamming;
  jam.attacker = topo.sensors_of_cell(0).front();
  jam.jam_corruption = 0.8;
  jam.start = 17000;
  jam.stop = 30000;
  s.attacks.push_back(jam);
  Simulation sim(s);
  const auto metrics = sim.run();
  REQUIRE(metrics.attacks.size() == 1);
  CHECK(metrics.attacks[0].detected);
  REQUIRE(metrics.attacks[0].detection_latency_ms.has_value());
  CHECK(*metrics.attacks[0].detection_latency_ms <= 3000);
}

TEST_CASE("a compromised monitor that absorbs reports is caught by its regional watchdog") {
  Scenario s = base_scenario(35, 30000);
  const Topology topo = build_topology(s.topology);
  AttackSpec a;
  a.kind = AttackKind::BlackHole;
  a.attacker = topo.cluster_of_cell(0);  // the monitor itself is compromised
  a.start = 17000;
  a.stop = 30000;
  s.attacks.push_back(a);
  Simulation sim(s);
  const auto metrics = sim.run();
  const auto it = metrics.alerts_by_detector.find("watchdog");
  REQUIRE(it != metrics.alerts_by_detector.end());
  CHECK(it->second > 0);
  REQUIRE(metrics.attacks.size() == 1);
  CHECK(metrics.attacks[0].detected);
}

TEST_CASE("unsolicited route advertisements mark a sink hole") {
  Scenario s = base_scenario(37, 30000);
  const Topology topo = build_topology(s.topology);
  AttackSpec a;
  a.kind = AttackKind::SinkHole;
  a.attacker = topo.sensors_of_cell(0).front();
  a.rate_per_s = 5.0;
  a.start = 17000;
  a.stop = 30000;
  s.attacks.push_back(a);
  Simulation sim(s);
  const auto metrics = sim.run();
  REQUIRE(metrics.attacks.size() == 1);
  CHECK(metrics.attacks[0].detected);
  CHECK(metrics.attacks[0].classified);
  const std::string& trace = sim.trace().text();
  CHECK(trace.find("label=sink_hole") != std::string::npos);
}

TEST_CASE("a dead monitor breaches the miss limit and hands its cell over") {
  Scenario s = base_scenario(36, 30000);
  const Topology topo = build_topology(s.topology);
  s.failures.push_back({topo.cluster_of_cell(0), 20500});
  Simulation sim(s);
  const auto metrics = sim.run();
  CHECK(metrics.failover_count == 1);
  const auto it = metrics.alerts_by_detector.find("watchdog");
  REQUIRE(it != metrics.alerts_by_detector.end());
  CHECK(it->second > 0);
}
