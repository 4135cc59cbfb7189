#include "wsnids/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsnids {

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

bool cmp_apply(CmpOp op, double lhs, double rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
  }
  return false;
}

const std::vector<std::string>& known_features() {
  static const std::vector<std::string> names = {
      "pkt_count",       "hello_count",      "mean_rssi",
      "pdr",             "carrier_busy_frac", "slot_violations",
      "sleep_violations", "route_deviations", "forward_ratio",
      "distinct_cells_seen", "relayed_in",    "relayed_out",
      "route_advert_count",
  };
  return names;
}

void validate_rule(const SignatureRule& rule) {
  if (rule.conditions.empty() && !rule.kind_rate_kind)
    throw std::invalid_argument("rule " + std::to_string(rule.rule_id) + ": empty predicate");
  if (rule.label.empty())
    throw std::invalid_argument("rule " + std::to_string(rule.rule_id) + ": missing label");
  for (const FieldComparison& c : rule.conditions) {
    if (!std::isfinite(c.threshold))
      throw std::invalid_argument("rule " + std::to_string(rule.rule_id) +
                                  ": non-finite threshold");
    const auto& names = known_features();
    if (std::find(names.begin(), names.end(), c.feature) == names.end())
      throw std::invalid_argument("rule " + std::to_string(rule.rule_id) +
                                  ": unknown feature '" + c.feature + "'");
  }
  if (rule.kind_rate_kind && rule.kind_rate_min < 1)
    throw std::invalid_argument("rule " + std::to_string(rule.rule_id) +
                                ": kind rate minimum must be >= 1");
}

void ResponseParams::validate() const {
  if (t_fresh < 1 || t_unstable_obs < 1 || t_ban < 1 || t_suspect_obs < 1 || t_mis < 1 ||
      flip_window < 1)
    throw std::invalid_argument("response timers must be > 0");
  if (flip_limit < 1) throw std::invalid_argument("flip_limit must be >= 1");
}

void DetectorParams::validate() const {
  if (rssi_tolerance_db <= 0.0) throw std::invalid_argument("rssi_tolerance_db must be > 0");
  if (pdr_floor < 0.0 || pdr_floor > 1.0) throw std::invalid_argument("pdr_floor out of [0,1]");
  if (busy_ceiling < 0.0 || busy_ceiling > 1.0)
    throw std::invalid_argument("busy_ceiling out of [0,1]");
  if (watchdog_miss_limit < 1) throw std::invalid_argument("watchdog_miss_limit must be >= 1");
  if (forward_floor < 0.0 || forward_floor > 1.0)
    throw std::invalid_argument("forward_floor out of [0,1]");
  if (min_relay_volume < 1) throw std::invalid_argument("min_relay_volume must be >= 1");
  if (spoof_match_db <= 0.0) throw std::invalid_argument("spoof_match_db must be > 0");
}

std::string PolicyScope::str() const {
  switch (kind) {
    case Kind::Global: return "global";
    case Kind::Region: return "region:" + std::to_string(id);
    case Kind::Cluster: return "cluster:" + std::to_string(id);
  }
  return "?";
}

const SignatureRule* PolicySet::find_rule(int rule_id) const {
  for (const SignatureRule& r : signature_rules)
    if (r.rule_id == rule_id) return &r;
  return nullptr;
}

std::vector<SignatureRule> default_signature_rules() {
  std::vector<SignatureRule> rules;

  SignatureRule hello;
  hello.rule_id = 1;
  hello.conditions = {{"hello_count", CmpOp::Gt, 50.0}};
  hello.label = "hello_flood";
  rules.push_back(hello);

  SignatureRule flood;
  flood.rule_id = 2;
  flood.conditions = {{"pkt_count", CmpOp::Gt, 60.0}};
  flood.label = "traffic_flood";
  rules.push_back(flood);

  SignatureRule advert;
  advert.rule_id = 3;
  advert.kind_rate_kind = PacketKind::RouteAdvert;
  advert.kind_rate_min = 1;
  advert.label = "sink_hole";
  rules.push_back(advert);

  // Honest relays forward everything they accept; dropping below the floor
  // with real volume is black-hole/selective-forwarding behavior.
  SignatureRule blackhole;
  blackhole.rule_id = 4;
  blackhole.conditions = {{"relayed_in", CmpOp::Ge, 4.0}, {"forward_ratio", CmpOp::Le, 0.05}};
  blackhole.label = "black_hole";
  rules.push_back(blackhole);

  SignatureRule selective;
  selective.rule_id = 5;
  selective.conditions = {{"relayed_in", CmpOp::Ge, 4.0}, {"forward_ratio", CmpOp::Lt, 0.75}};
  selective.label = "selective_forwarding";
  rules.push_back(selective);

  SignatureRule sybil;
  sybil.rule_id = 6;
  sybil.conditions = {{"distinct_cells_seen", CmpOp::Ge, 2.0}};
  sybil.label = "sybil";
  rules.push_back(sybil);

  return rules;
}

PolicyStore::PolicyStore() {
  PolicySet global;
  global.version = 1;
  global.scope = PolicyScope::global();
  global.signature_rules = default_signature_rules();
  sets_[global.scope] = std::move(global);
}

PolicyStore::PolicyStore(PolicySet initial_global) {
  initial_global.scope = PolicyScope::global();
  if (initial_global.version < 1) initial_global.version = 1;
  for (const SignatureRule& r : initial_global.signature_rules) validate_rule(r);
  initial_global.response.validate();
  initial_global.detector.validate();
  sets_[PolicyScope::global()] = std::move(initial_global);
}

const PolicySet& PolicyStore::master(const PolicyScope& scope) const {
  auto it = sets_.find(scope);
  if (it == sets_.end())
    throw std::out_of_range("no policy for scope " + scope.str());
  return it->second;
}

bool PolicyStore::has_scope(const PolicyScope& scope) const { return sets_.count(scope) > 0; }

const PolicySet& PolicyStore::effective(int region_index, int cell_index) const {
  auto it = sets_.find(PolicyScope::cluster(cell_index));
  if (it != sets_.end()) return it->second;
  it = sets_.find(PolicyScope::region(region_index));
  if (it != sets_.end()) return it->second;
  return master(PolicyScope::global());
}

PolicySet& PolicyStore::edit(const PolicyScope& scope) {
  auto it = sets_.find(scope);
  if (it != sets_.end()) return it->second;
  // A new narrow scope starts as a copy of the effective wider policy.
  PolicySet fresh = scope.kind == PolicyScope::Kind::Global
                        ? PolicySet{}
                        : master(PolicyScope::global());
  fresh.scope = scope;
  fresh.version = 0;
  return sets_.emplace(scope, std::move(fresh)).first->second;
}

int PolicyStore::idt_create_rule(const PolicyScope& scope, SignatureRule rule) {
  validate_rule(rule);
  PolicySet& set = edit(scope);
  if (set.find_rule(rule.rule_id))
    throw std::invalid_argument("rule " + std::to_string(rule.rule_id) + " already exists");
  set.signature_rules.push_back(std::move(rule));
  std::sort(set.signature_rules.begin(), set.signature_rules.end(),
            [](const SignatureRule& a, const SignatureRule& b) { return a.rule_id < b.rule_id; });
  return ++set.version;
}

int PolicyStore::idt_modify_rule(const PolicyScope& scope, SignatureRule rule) {
  validate_rule(rule);
  PolicySet& set = edit(scope);
  for (SignatureRule& r : set.signature_rules) {
    if (r.rule_id == rule.rule_id) {
      r = std::move(rule);
      return ++set.version;
    }
  }
  throw std::invalid_argument("rule " + std::to_string(rule.rule_id) + " not found");
}

int PolicyStore::idt_delete_rule(const PolicyScope& scope, int rule_id) {
  PolicySet& set = edit(scope);
  auto it = std::find_if(set.signature_rules.begin(), set.signature_rules.end(),
                         [&](const SignatureRule& r) { return r.rule_id == rule_id; });
  if (it == set.signature_rules.end())
    throw std::invalid_argument("rule " + std::to_string(rule_id) + " not found");
  set.signature_rules.erase(it);
  return ++set.version;
}

const SignatureRule* PolicyStore::idt_examine_rule(const PolicyScope& scope, int rule_id) const {
  auto it = sets_.find(scope);
  if (it == sets_.end()) return nullptr;
  return it->second.find_rule(rule_id);
}

int PolicyStore::idt_set_anomaly_sensitivity(const PolicyScope& scope, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("sensitivity k must be > 0");
  PolicySet& set = edit(scope);
  set.anomaly_profile.sensitivity_k = k;
  return ++set.version;
}

int PolicyStore::idt_set_response_params(const PolicyScope& scope, const ResponseParams& params) {
  params.validate();
  PolicySet& set = edit(scope);
  set.response = params;
  return ++set.version;
}

int PolicyStore::idt_set_detector_params(const PolicyScope& scope, const DetectorParams& params) {
  params.validate();
  PolicySet& set = edit(scope);
  set.detector = params;
  return ++set.version;
}

int PolicyStore::idt_add_blacklist(const PolicyScope& scope, NodeId node) {
  PolicySet& set = edit(scope);
  if (!set.blacklist.insert(node).second) return set.version;  // duplicate: no-op
  return ++set.version;
}

void PolicyStore::store_profile_backup(const PolicyScope& scope, const AnomalyProfile& profile) {
  profile_backups_[scope] = profile;
}

const AnomalyProfile* PolicyStore::profile_backup(const PolicyScope& scope) const {
  auto it = profile_backups_.find(scope);
  return it == profile_backups_.end() ? nullptr : &it->second;
}

int PolicyStore::version(const PolicyScope& scope) const {
  auto it = sets_.find(scope);
  return it == sets_.end() ? 0 : it->second.version;
}

std::vector<PolicyScope> PolicyStore::scopes() const {
  std::vector<PolicyScope> out;
  out.reserve(sets_.size());
  for (const auto& [scope, set] : sets_) out.push_back(scope);
  return out;
}

}  // namespace wsnids
