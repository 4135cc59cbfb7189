#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsnids/policy.hpp"
#include "wsnids/types.hpp"

namespace wsnids {

// One packet as observed by a monitor, plus channel context. `direct` means
// the observed emission came straight from the claimed source's transmitter
// (first hop), so RSSI and MAC-schedule checks apply.
struct Observation {
  Packet pkt;
  SimTime tx_time = 0;     // when the observed emission left the antenna
  SimTime rx_time = 0;
  double rssi_dbm = 0.0;
  bool corrupted = false;
  bool direct = false;
  NodeId transmitter_next_hop = kInvalidNode;  // designated next hop, if any
};

// Windowed per-source feature aggregate fed to the signature and anomaly
// processors.
struct SourceStats {
  int pkt_count = 0;   // distinct packets observed (deduplicated by origin)
  int hello_count = 0;
  double mean_rssi = 0.0;  // over direct, uncorrupted receptions
  int direct_count = 0;
  double pdr = 1.0;
  bool pdr_defined = false;
  double carrier_busy_frac = 0.0;
  int slot_violations = 0;
  int sleep_violations = 0;
  int route_deviations = 0;
  double forward_ratio = 1.0;
  int relayed_in = 0;   // packets the node was expected to relay
  int relayed_out = 0;  // relays it actually transmitted
  int distinct_cells_seen = 1;
  int route_advert_count = 0;
  std::map<PacketKind, int> kind_counts;
};

struct StimulusVector {
  SimTime window_start = 0;
  SimTime window_end = 0;
  std::map<NodeId, SourceStats> per_source;
};

// Feature accessor used by rules, anomaly profiling, and tests.
std::optional<double> feature_value(const SourceStats& s, const std::string& feature);

// Aggregates a closed window of observations into per-source stats.
// delivered/expected pairs (for pdr) and relay tallies are supplied by the
// caller, which knows schedules and routes; busy_frac is channel-wide.
struct PreprocessInput {
  SimTime window_start = 0;
  SimTime window_end = 0;
  std::vector<Observation> observations;   // already scoped to this monitor
  std::map<NodeId, int> expected_data;     // per source, from slot ownership
  std::map<NodeId, int> relayed_in;
  std::map<NodeId, int> relayed_out;
  double carrier_busy_frac = 0.0;
};

StimulusVector preprocess(const PreprocessInput& in);

// Evaluates the signature record against one window. Rules fire per subject
// in rule_id order; blacklist hits come first and carry Danger severity.
std::vector<Finding> match_signatures(const PolicySet& policy, const StimulusVector& v,
                                      SimTime at);

// Online mean/std learning for the anomaly profile (one sample per source
// per window per feature).
void anomaly_learn(AnomalyProfile& profile, const StimulusVector& v);
void anomaly_freeze(AnomalyProfile& profile);

// Flags |x - mean| > k*std per (source, feature), any deviation when the
// baseline variance is zero, and absolute-limit breaches. Returns nothing
// while the profile is still learning.
std::vector<Finding> detect_anomaly(const AnomalyProfile& profile, const StimulusVector& v,
                                    SimTime at);

// Per-source row shipped upward so parent agents can merge views across
// cells (distinct-cell counting, watchdog cross-checks).
struct SourceRow {
  NodeId subject = kInvalidNode;
  int cell_index = -1;  // observing monitor's cell
  int pkt_count = 0;
  int hello_count = 0;
  int relayed_in = 0;
  int relayed_out = 0;
};

// One window's upward report. Empty reports still flow: they double as the
// liveness heartbeat for failover detection.
struct Report {
  NodeId from_agent = kInvalidNode;
  int window_index = 0;
  SimTime window_start = 0;
  SimTime window_end = 0;
  std::vector<Finding> findings;
  std::vector<SourceRow> sources;
  int packets_seen = 0;
  int packets_forwarded = 0;
  // Learned baselines riding up to the base station for backup (cell index,
  // frozen profile).
  std::vector<std::pair<int, AnomalyProfile>> profile_backups;
};

}  // namespace wsnids
