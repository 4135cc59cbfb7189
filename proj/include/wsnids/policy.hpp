#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids {

enum class CmpOp : std::uint8_t { Lt, Le, Eq, Ge, Gt };

const char* to_string(CmpOp op);
bool cmp_apply(CmpOp op, double lhs, double rhs);

// One clause of a signature predicate: <feature> <op> <threshold>.
struct FieldComparison {
  std::string feature;
  CmpOp op = CmpOp::Gt;
  double threshold = 0.0;
};

// A known-attack signature: a conjunction of feature comparisons over a
// source's windowed stats, optionally with a packet-kind rate term.
struct SignatureRule {
  int rule_id = 0;
  std::vector<FieldComparison> conditions;
  std::optional<PacketKind> kind_rate_kind;  // rate-over-window term
  int kind_rate_min = 1;                     // fires when count(kind) >= min
  std::string label;                         // attack name
  Severity severity = Severity::Misbehavior;
};

// Throws std::invalid_argument when the rule is malformed (empty predicate,
// unknown feature, non-finite threshold). Malformed rules are rejected here,
// at policy-change time, never during matching.
void validate_rule(const SignatureRule& rule);

// Names accepted in FieldComparison::feature.
const std::vector<std::string>& known_features();

struct FeatureBaseline {
  double mean = 0.0;
  double stddev = 0.0;
  std::int64_t samples = 0;
};

// Normal-activity profile: per-feature mean/std learned during warm-up, a
// deviation sensitivity k, and optional absolute limits.
struct AnomalyProfile {
  double sensitivity_k = 3.0;
  std::map<std::string, FeatureBaseline> baselines;
  std::vector<FieldComparison> absolute_limits;  // breach -> finding
  bool frozen = false;
};

// Response-machine timers and thresholds, in windows.
struct ResponseParams {
  int t_fresh = 5;          // good windows before Fresh -> Member
  int t_unstable_obs = 5;   // consecutive good windows before Unstable -> Member
  int flip_limit = 3;       // K: Member<->Unstable interchanges within flip_window
  int t_ban = 10;           // Suspect isolation length
  int t_suspect_obs = 10;   // post-ban observation length
  int t_mis = 5;            // consecutive misbehaving windows before Suspect
  int flip_window = 20;     // sliding window for flip counting

  void validate() const;
};

// Layer-detector thresholds, disseminated alongside the rules so the base
// station can retune monitors at runtime.
struct DetectorParams {
  double rssi_tolerance_db = 6.0;
  double pdr_floor = 0.6;
  double busy_ceiling = 0.7;
  int watchdog_miss_limit = 3;
  double forward_floor = 0.75;   // relay forward_ratio below this is misuse
  int min_relay_volume = 4;      // relay checks need at least this many packets
  double spoof_match_db = 1.0;   // culprit attribution tolerance

  void validate() const;
};

struct PolicyScope {
  enum class Kind : std::uint8_t { Global, Region, Cluster };
  Kind kind = Kind::Global;
  int id = -1;  // region index or cell index

  static PolicyScope global() { return {Kind::Global, -1}; }
  static PolicyScope region(int r) { return {Kind::Region, r}; }
  static PolicyScope cluster(int c) { return {Kind::Cluster, c}; }

  bool operator<(const PolicyScope& o) const {
    if (kind != o.kind) return kind < o.kind;
    return id < o.id;
  }
  bool operator==(const PolicyScope& o) const { return kind == o.kind && id == o.id; }

  std::string str() const;
};

// The disseminated policy unit: signature record (rules + blacklist),
// anomaly profile, response timers, detector thresholds.
struct PolicySet {
  int version = 0;
  PolicyScope scope;
  std::vector<SignatureRule> signature_rules;
  std::set<NodeId> blacklist;
  AnomalyProfile anomaly_profile;
  ResponseParams response;
  DetectorParams detector;

  const SignatureRule* find_rule(int rule_id) const;
};

// Rules every deployment starts with: flood rates, unsolicited route
// advertisements, and relay forwarding misuse.
std::vector<SignatureRule> default_signature_rules();

// The base station's policy repository. Edits go through the idt_* calls,
// which validate, bump the scope's version, and leave dissemination to the
// caller. Narrower scopes override wider ones wholesale.
class PolicyStore {
 public:
  PolicyStore();
  explicit PolicyStore(PolicySet initial_global);

  // Read access. effective() resolves Cluster > Region > Global.
  const PolicySet& master(const PolicyScope& scope) const;
  bool has_scope(const PolicyScope& scope) const;
  const PolicySet& effective(int region_index, int cell_index) const;

  int idt_create_rule(const PolicyScope& scope, SignatureRule rule);
  int idt_modify_rule(const PolicyScope& scope, SignatureRule rule);
  int idt_delete_rule(const PolicyScope& scope, int rule_id);
  // Examine mutates nothing; returns nullptr for an unknown rule.
  const SignatureRule* idt_examine_rule(const PolicyScope& scope, int rule_id) const;

  int idt_set_anomaly_sensitivity(const PolicyScope& scope, double k);
  int idt_set_response_params(const PolicyScope& scope, const ResponseParams& params);
  int idt_set_detector_params(const PolicyScope& scope, const DetectorParams& params);
  int idt_add_blacklist(const PolicyScope& scope, NodeId node);

  // Backup of a monitor's learned baselines. Not a policy edit: versions
  // stay put, the copy only feeds resupply after a failover.
  void store_profile_backup(const PolicyScope& scope, const AnomalyProfile& profile);
  const AnomalyProfile* profile_backup(const PolicyScope& scope) const;

  int version(const PolicyScope& scope) const;
  std::vector<PolicyScope> scopes() const;

 private:
  PolicySet& edit(const PolicyScope& scope);
  std::map<PolicyScope, PolicySet> sets_;
  std::map<PolicyScope, AnomalyProfile> profile_backups_;
};

}  // namespace wsnids
