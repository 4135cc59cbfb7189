#pragma once

#include <map>
#include <optional>
#include <vector>

#include "wsnids/agent.hpp"
#include "wsnids/mac.hpp"
#include "wsnids/policy.hpp"
#include "wsnids/types.hpp"

namespace wsnids {

// Expected signal strength per (source, monitor) link, recorded during the
// initialization phase and immutable until a failover re-initializes the
// adopted pairs.
class RssiBaseline {
 public:
  void learn(NodeId src, double rssi_dbm);
  void freeze();
  bool frozen() const { return frozen_; }
  // Drops a pair so it can be re-learned (failover adoption).
  void reset_pair(NodeId src);

  std::optional<double> expected(NodeId src) const;
  const std::map<NodeId, std::pair<double, int>>& pairs() const { return pairs_; }

 private:
  std::map<NodeId, std::pair<double, int>> pairs_;  // src -> (mean, samples)
  bool frozen_ = false;
};

// Physical-layer window checks: unexpected RSSI, packet-delivery collapse,
// and a busy channel. A busy-channel breach explains delivery loss by
// itself, so per-source PDR findings are suppressed for that window and a
// single jamming finding is raised instead (subject attributed by matching
// the interferer's signal strength against the stored baselines when
// possible).
struct PhysicalContext {
  double carrier_busy_frac = 0.0;
  // Mean observed strength of un-decodable interference this window, when any.
  std::optional<double> interference_rssi;
};

std::vector<Finding> check_physical(const StimulusVector& v, const RssiBaseline& baseline,
                                    const DetectorParams& params, const PhysicalContext& ctx,
                                    SimTime at);

// Slot-ownership check for a direct reception from inside the monitor's
// cell. Fires when the observed transmission time falls in a slot not owned
// by the claimed source.
std::optional<Finding> check_tdma(const Packet& pkt, SimTime tx_time, const TdmaSchedule& sched,
                                  SimTime at);

// Sleep-schedule check: fires when the claimed source was in its sleeping
// period at the observed transmission time.
std::optional<Finding> check_smac(const Packet& pkt, SimTime tx_time, const SmacSchedule& sched,
                                  SimTime at);

// Route-tracing check at the destination. A mismatching hop trace yields an
// Info finding against the claimed source (it may be an innocent victim)
// plus Misbehavior findings against the inferred culprits: the node that
// forwarded off the expected path, and both endpoints of any physically
// impossible hop. `hop_possible(a, b)` answers whether a could reach b.
struct RouteCheckResult {
  std::vector<Finding> findings;
  bool deviated = false;
};

template <typename HopPossibleFn>
RouteCheckResult check_route(const Packet& pkt, const std::vector<NodeId>& expected_path,
                             HopPossibleFn&& hop_possible, SimTime at);

// Per-packet spoof attribution: when a direct emission's strength does not
// match the claimed source's baseline, the member whose baseline matches the
// observed strength is the likely true transmitter.
std::optional<Finding> attribute_spoof(NodeId claimed, double observed_rssi,
                                       const RssiBaseline& baseline,
                                       const DetectorParams& params, SimTime at);

// Parent-tier watchdog over one child's report stream: consecutive missed
// reports, or a summary that contradicts itself (forwarded more than seen,
// or a relay ratio under the floor while the child reports no findings).
struct WatchdogView {
  int missed_reports = 0;
  bool have_summary = false;
  int packets_seen = 0;
  int packets_forwarded = 0;
  int findings_reported = 0;
};

std::vector<Finding> watchdog_check(NodeId child, const WatchdogView& view,
                                    const DetectorParams& params, SimTime at);

// --- implementation ---

template <typename HopPossibleFn>
RouteCheckResult check_route(const Packet& pkt, const std::vector<NodeId>& expected_path,
                             HopPossibleFn&& hop_possible, SimTime at) {
  RouteCheckResult res;
  // The delivered trace includes every transmitter; the expected path ends
  // at the destination, which never transmits, so compare against its
  // transmitting prefix.
  std::vector<NodeId> expected_tx(expected_path.begin(),
                                  expected_path.empty() ? expected_path.end()
                                                        : expected_path.end() - 1);
  if (pkt.hop_trace == expected_tx) return res;
  res.deviated = true;

  Finding dev;
  dev.at = at;
  dev.subject = pkt.claimed_src;
  dev.detector = DetectorTag::Route;
  dev.severity = Severity::Info;
  dev.label = "route_deviation";
  dev.feature = "hop_trace";
  dev.observed = static_cast<double>(pkt.hop_trace.size());
  dev.expected = static_cast<double>(expected_tx.size());
  res.findings.push_back(dev);

  std::vector<NodeId> culprits;
  auto add_culprit = [&](NodeId id) {
    if (id == kInvalidNode) return;
    for (NodeId c : culprits)
      if (c == id) return;
    culprits.push_back(id);
  };

  // The node that transmitted toward the wrong next hop: last node of the
  // longest common prefix.
  std::size_t prefix = 0;
  while (prefix < pkt.hop_trace.size() && prefix < expected_tx.size() &&
         pkt.hop_trace[prefix] == expected_tx[prefix])
    ++prefix;
  if (prefix > 0 && prefix < pkt.hop_trace.size())
    add_culprit(pkt.hop_trace[prefix - 1]);
  else if (prefix == 0 && !pkt.hop_trace.empty())
    add_culprit(pkt.hop_trace[0]);

  // Endpoints of hops no radio could make (wormhole tunnels).
  for (std::size_t i = 0; i + 1 < pkt.hop_trace.size(); ++i) {
    if (!hop_possible(pkt.hop_trace[i], pkt.hop_trace[i + 1])) {
      add_culprit(pkt.hop_trace[i]);
      add_culprit(pkt.hop_trace[i + 1]);
    }
  }

  for (NodeId c : culprits) {
    Finding f;
    f.at = at;
    f.subject = c;
    f.detector = DetectorTag::Route;
    f.severity = Severity::Misbehavior;
    f.label = "route_culprit";
    f.feature = "hop_trace";
    f.observed = static_cast<double>(pkt.hop_trace.size());
    f.expected = static_cast<double>(expected_tx.size());
    res.findings.push_back(std::move(f));
  }
  return res;
}

}  // namespace wsnids
