#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <unordered_set>
#include <vector>

#include "wsnids/agent.hpp"
#include "wsnids/attacks.hpp"
#include "wsnids/detectors.hpp"
#include "wsnids/energy.hpp"
#include "wsnids/event_queue.hpp"
#include "wsnids/failover.hpp"
#include "wsnids/mac.hpp"
#include "wsnids/metrics.hpp"
#include "wsnids/policy.hpp"
#include "wsnids/radio.hpp"
#include "wsnids/response.hpp"
#include "wsnids/scenario.hpp"
#include "wsnids/topology.hpp"
#include "wsnids/trace.hpp"

namespace wsnids {

// Single-threaded deterministic run of one scenario: four-tier topology,
// slotted sensor traffic, layered detection agents at cluster, regional and
// base tiers, attack injection, response classification, and failover.
// Multiple Simulation instances share nothing and may run concurrently.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);

  MetricsReport run();

  const Topology& topology() const { return topo_; }
  const TraceLog& trace() const { return trace_; }
  const Scenario& scenario() const { return scn_; }
  const EnergyLedger& energy() const { return energy_; }

  // Test introspection.
  struct SpoofEmission {
    NodeId claimed = kInvalidNode;
    NodeId true_src = kInvalidNode;
    SimTime tx_time = 0;
    bool in_claimed_slot = false;
    bool flagged = false;  // a slot violation was raised for it
  };
  const std::vector<SpoofEmission>& spoof_log() const { return spoof_log_; }

  struct TunneledDelivery {
    std::int64_t uid = 0;
    bool route_flagged = false;
  };
  const std::vector<TunneledDelivery>& tunnel_log() const { return tunnel_log_; }

  const NodeClassRecord* record_of(NodeId subject) const;
  NodeId monitor_of(NodeId sensor) const;  // acting cluster monitor
  const PolicySet* monitor_policy(NodeId monitor, int cell_index) const;
  const PolicyStore& base_policy_store() const { return policy_store_; }
  PolicyStore& base_policy_store() { return policy_store_; }
  int reports_ingested_by(NodeId parent, NodeId child) const;

  // Runs `fn` at simulated time `at` (before same-time engine events fire in
  // insertion order). Lets callers drive IDT operations mid-run.
  void schedule(SimTime at, std::function<void()> fn);
  // Queues a base-station dissemination of the store's latest set for the
  // scope, down the hierarchy.
  void bpdp_disseminate(const PolicyScope& scope, SimTime at);

 private:
  // --- runtime containers ---

  struct Transmission {
    Packet pkt;
    NodeId transmitter = kInvalidNode;
    NodeId next_hop = kInvalidNode;  // invalid for broadcasts
    double range_boost = 1.0;
  };

  struct PendingReport {
    Report report;
    PacketKind kind = PacketKind::Report;
    bool acked = false;
  };

  struct PolicyDelivery {
    PolicySet set;
    NodeId final_target = kInvalidNode;  // routed monitor, invalid = fan out
  };

  struct FindingNotice {
    std::vector<Finding> findings;
  };

  struct AlertPayload {
    std::vector<Finding> findings;
    std::vector<NodeId> new_malicious;
  };

  struct ClusterAgent {
    NodeId id = kInvalidNode;
    int home_cell = -1;
    std::vector<int> cells;  // home + adopted
    std::vector<Observation> obs;
    std::vector<std::pair<SimTime, SimTime>> busy;
    std::vector<double> interference_samples;
    std::map<NodeId, NodeClassRecord> records;
    std::set<NodeId> blacklist;  // local signature-record entries
    RssiBaseline baseline;
    AnomalyProfile profile;
    std::map<int, PolicySet> policy_by_cell;
    std::vector<PolicySet> pending_policy;
    std::vector<Finding> notices;
    std::deque<PendingReport> outbox;
    std::set<NodeId> relearn_pairs;       // adopted links being re-learned
    int relearn_until_window = -1;
    bool profile_uploaded = false;
  };

  struct ReceivedReport {
    NodeId child = kInvalidNode;
    Report report;
  };

  struct RegionalAgent {
    NodeId id = kInvalidNode;
    std::vector<int> regions;
    LivenessTable liveness;
    std::vector<ReceivedReport> inbox;
    std::vector<AlertPayload> alerts;
    AnomalyProfile profile;
    PolicySet policy;
    std::vector<PolicySet> pending_policy;
    std::deque<PendingReport> outbox;
  };

  struct BaseAgent {
    NodeId id = kInvalidNode;
    LivenessTable liveness;
    std::vector<ReceivedReport> inbox;
    std::vector<AlertPayload> alerts;
    AnomalyProfile profile;
    std::vector<std::pair<PolicyScope, NodeId>> resupply_queue;  // scope -> monitor
  };

  struct SensorInspector {
    std::map<NodeId, SourceStats> counts;
  };

  struct AttackerState {
    AttackRuntime rt;
    std::int64_t next_seq = 0;
  };

  // --- wiring ---

  void setup();
  void schedule_sensor_emission(NodeId sensor, SimTime at);
  void schedule_attack_events();
  void schedule_agent_tick(NodeId agent_id, NodeRole role, int window);

  // --- radio ---

  void transmit(const Transmission& tx, SimTime at);
  void deliver(const Transmission& tx, NodeId receiver, SimTime at);
  void forward_packet(Packet pkt, NodeId relay, SimTime at);
  bool suppressed(NodeId node, SimTime at) const;
  double effective_range(NodeId node, double boost) const;
  bool monitor_hears(const ClusterAgent& agent, const Position& p) const;
  const std::vector<NodeId>* route(NodeId src, NodeId dst);
  NodeId next_hop(NodeId src, NodeId dst);

  // --- agent ticks ---

  void cluster_tick(NodeId id, int window);
  void regional_tick(NodeId id, int window);
  void base_tick(int window);
  void sensor_tick(NodeId id, int window);

  void ingest_at(NodeId receiver, const Packet& pkt, SimTime at);
  void flush_outbox(NodeId agent_id, std::deque<PendingReport>& outbox, NodeId parent,
                    SimTime at);
  void send_alert(NodeId from, NodeId to, AlertPayload payload, SimTime at);
  void send_policy(NodeId from, NodeId to, PolicyDelivery delivery, SimTime at);
  void apply_pending_policy(std::vector<PolicySet>& pending, ClusterAgent* cluster,
                            RegionalAgent* regional, SimTime at);

  // --- failover ---

  void takeover_cluster(RegionalAgent& rpa, NodeId failed, SimTime at);
  void takeover_regional(NodeId failed, SimTime at);
  void kill_node(NodeId node, SimTime at);

  // --- bookkeeping ---

  void register_finding(const Finding& f, NodeId agent_id, NodeRole tier);
  void note_class_change(NodeId subject, NodeClass to, SimTime at);
  void charge_idle_energy();
  MetricsReport finish();
  int learn_end_window() const;   // last learning window index
  SimTime slot_offset_in_frame(NodeId sensor) const;

  Scenario scn_;
  Topology topo_;
  EventQueue queue_;
  TraceLog trace_;
  EnergyLedger energy_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};

  std::vector<bool> alive_;
  std::map<NodeId, SimTime> death_time_;
  std::map<int, TdmaSchedule> tdma_by_cell_;
  std::map<int, SmacSchedule> smac_by_cell_;
  std::map<int, NodeId> cell_owner_;     // cell -> acting cluster monitor
  std::map<int, NodeId> region_owner_;   // region -> acting regional monitor
  std::map<NodeId, NodeId> sensor_parent_;

  std::map<NodeId, ClusterAgent> clusters_;
  std::map<NodeId, RegionalAgent> regionals_;
  BaseAgent base_;
  PolicyStore policy_store_;
  std::map<NodeId, SensorInspector> inspectors_;  // every-sensor mode

  std::map<NodeId, AttackerState> attackers_;
  std::vector<const AttackSpec*> jammers_;

  // Engine-visible classification: how the network treats each id right now.
  struct ClassSnapshot {
    NodeClass state = NodeClass::Member;
    SimTime ban_until = 0;
  };
  std::map<NodeId, ClassSnapshot> directory_;

  std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> route_cache_;
  std::map<std::int64_t, Report> report_payloads_;
  std::map<std::int64_t, PolicyDelivery> policy_payloads_;
  std::map<std::int64_t, FindingNotice> notice_payloads_;
  std::map<std::int64_t, AlertPayload> alert_payloads_;
  std::map<NodeId, std::unordered_set<std::int64_t>> seen_uids_;

  std::int64_t next_uid_ = 1;
  std::map<NodeId, std::int64_t> seq_counters_;

  // Metrics accumulation.
  MetricsReport metrics_;
  std::map<NodeId, std::map<NodeId, int>> reports_ingested_;  // parent -> child -> n
  std::set<NodeId> attack_identities_;  // attackers + principals + fakes + peers
  struct AttackTracker {
    const AttackSpec* spec = nullptr;
    NodeId principal = kInvalidNode;
    std::optional<SimTime> first_correct_finding;
  };
  std::vector<AttackTracker> attack_trackers_;
  struct FailoverTracker {
    NodeId failed = kInvalidNode;
    int kill_window = 0;
    std::set<NodeId> adopted;
    bool resolved = false;
  };
  std::vector<FailoverTracker> failover_trackers_;
  std::vector<SpoofEmission> spoof_log_;
  std::vector<TunneledDelivery> tunnel_log_;
  std::map<std::int64_t, std::size_t> tunneled_uids_;  // uid -> tunnel_log index

  SimTime window_ms_ = 1000;
  int total_windows_ = 0;
  bool ran_ = false;
};

}  // namespace wsnids
