#include "wsnids/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wsnids {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("scenario: " + path + ": " + what);
}

// Strict object reader: every key must be consumed exactly once.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Obj() = default;

  void done() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) fail(path_ + "." + key, "unknown field");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  T get(const char* key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(path_ + "." + key, "wrong type");
    }
  }

  template <typename T>
  T require(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(path_ + "." + key, "missing required field");
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(path_ + "." + key, "wrong type");
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

CmpOp parse_op(const std::string& s, const std::string& path) {
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == "==") return CmpOp::Eq;
  if (s == ">=") return CmpOp::Ge;
  if (s == ">") return CmpOp::Gt;
  fail(path, "unknown comparison operator '" + s + "'");
}

PacketKind parse_kind(const std::string& s, const std::string& path) {
  for (int k = 0; k <= static_cast<int>(PacketKind::Alert); ++k) {
    const auto kind = static_cast<PacketKind>(k);
    if (s == to_string(kind)) return kind;
  }
  fail(path, "unknown packet kind '" + s + "'");
}

SignatureRule parse_rule(const json& j, const std::string& path) {
  Obj o(j, path);
  SignatureRule rule;
  rule.rule_id = o.require<int>("id");
  rule.label = o.require<std::string>("label");
  const std::string sev = o.get<std::string>("severity", "misbehavior");
  if (sev == "info")
    rule.severity = Severity::Info;
  else if (sev == "misbehavior")
    rule.severity = Severity::Misbehavior;
  else if (sev == "danger")
    rule.severity = Severity::Danger;
  else
    fail(path + ".severity", "unknown severity '" + sev + "'");
  if (const json* conds = o.sub("conditions")) {
    if (!conds->is_array()) fail(path + ".conditions", "expected an array");
    int i = 0;
    for (const json& cj : *conds) {
      const std::string cpath = path + ".conditions[" + std::to_string(i++) + "]";
      Obj c(cj, cpath);
      FieldComparison fc;
      fc.feature = c.require<std::string>("feature");
      fc.op = parse_op(c.require<std::string>("op"), cpath + ".op");
      fc.threshold = c.require<double>("threshold");
      c.done();
      rule.conditions.push_back(std::move(fc));
    }
  }
  if (o.has("kind_rate")) {
    const json* kr = o.sub("kind_rate");
    Obj k(*kr, path + ".kind_rate");
    rule.kind_rate_kind = parse_kind(k.require<std::string>("kind"), path + ".kind_rate.kind");
    rule.kind_rate_min = k.get<int>("min", 1);
    k.done();
  }
  o.done();
  try {
    validate_rule(rule);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return rule;
}

AttackSpec parse_attack(const json& j, const std::string& path) {
  Obj o(j, path);
  AttackSpec a;
  const std::string kind = o.require<std::string>("kind");
  const auto parsed = attack_kind_from_string(kind);
  if (!parsed) fail(path + ".kind", "unknown attack kind '" + kind + "'");
  a.kind = *parsed;
  a.attacker = o.require<NodeId>("attacker");
  a.start = o.require<SimTime>("start_ms");
  a.stop = o.require<SimTime>("stop_ms");
  a.peer = o.get<NodeId>("peer", kInvalidNode);
  a.rate_per_s = o.get<double>("rate_per_s", a.rate_per_s);
  a.drop_ratio = o.get<double>("drop_ratio", a.drop_ratio);
  a.drop_tag = o.get<std::string>("drop_tag", "");
  a.fake_ids = o.get<std::vector<NodeId>>("fake_ids", {});
  a.fake_id = o.get<NodeId>("fake_id", kInvalidNode);
  a.target = o.get<NodeId>("target", kInvalidNode);
  a.jam_corruption = o.get<double>("jam_corruption", a.jam_corruption);
  a.range_boost = o.get<double>("range_boost", a.range_boost);
  a.altered_tag = o.get<std::string>("altered_tag", a.altered_tag);
  o.done();
  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return a;
}

}  // namespace

void Scenario::validate() const {
  radio.validate();
  response.validate();
  detector.validate();
  if (mac.slot_ms <= 0) throw std::invalid_argument("scenario: mac.slot_ms must be > 0");
  if (mac.awake_guard_ms < 0)
    throw std::invalid_argument("scenario: mac.awake_guard_ms must be >= 0");
  if (agent.window_ms <= 0) throw std::invalid_argument("scenario: agent.window_ms must be > 0");
  if (agent.warmup_windows < 1)
    throw std::invalid_argument("scenario: agent.warmup_windows must be >= 1");
  if (agent.window_grace_ms < 2 * 2 || 3 * agent.window_grace_ms >= agent.window_ms)
    throw std::invalid_argument(
        "scenario: agent.window_grace_ms must cover hop delays and fit three tiers inside one "
        "window");
  if (!(anomaly_sensitivity_k > 0.0))
    throw std::invalid_argument("scenario: anomaly_sensitivity_k must be > 0");
  const SimTime warmup_end =
      static_cast<SimTime>(response.t_fresh + 1 + agent.warmup_windows) * agent.window_ms;
  if (duration_ms <= warmup_end)
    throw std::invalid_argument("scenario: duration_ms must exceed the warm-up span (" +
                                std::to_string(warmup_end) + " ms)");

  const Topology topo = build_topology(topology);
  const auto check_node = [&](NodeId id, const std::string& path) {
    if (!topo.has_node(id))
      throw std::invalid_argument("scenario: " + path + ": node " + std::to_string(id) +
                                  " does not exist in this topology");
  };
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    const AttackSpec& a = attacks[i];
    const std::string path = "attacks[" + std::to_string(i) + "]";
    check_node(a.attacker, path + ".attacker");
    if (a.peer != kInvalidNode) check_node(a.peer, path + ".peer");
    if (a.target != kInvalidNode) check_node(a.target, path + ".target");
    // Fabricated identities may be absent on purpose; real ones must exist.
  }
  for (std::size_t i = 0; i < failures.size(); ++i) {
    const std::string path = "failures[" + std::to_string(i) + "]";
    check_node(failures[i].node, path + ".node");
    const NodeRole role = topo.node(failures[i].node).role;
    if (role == NodeRole::BaseStation)
      throw std::invalid_argument("scenario: " + path + ": the base station cannot fail");
    if (failures[i].at < 0 || failures[i].at >= duration_ms)
      throw std::invalid_argument("scenario: " + path + ".at_ms: outside the run duration");
  }
  for (const SignatureRule& r : rules) validate_rule(r);
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: invalid JSON: ") + e.what());
  }

  Scenario s;
  Obj root(j, "scenario");

  if (const json* t = root.sub("topology")) {
    Obj o(*t, "topology");
    s.topology.regions = o.get<int>("regions", s.topology.regions);
    s.topology.cells_per_region = o.get<int>("cells_per_region", s.topology.cells_per_region);
    s.topology.sensors_per_cell = o.get<int>("sensors_per_cell", s.topology.sensors_per_cell);
    s.topology.cell_radius = o.get<double>("cell_radius_m", s.topology.cell_radius);
    s.topology.rng_seed = o.get<std::uint64_t>("seed", s.topology.rng_seed);
    s.topology.radio_range = o.get<double>("radio_range_m", s.topology.radio_range);
    s.topology.cluster_range_boost =
        o.get<double>("cluster_range_boost", s.topology.cluster_range_boost);
    s.topology.regional_range_boost =
        o.get<double>("regional_range_boost", s.topology.regional_range_boost);
    s.topology.base_range_boost = o.get<double>("base_range_boost", s.topology.base_range_boost);
    o.done();
  }
  if (const json* r = root.sub("radio")) {
    Obj o(*r, "radio");
    s.radio.tx_power_dbm = o.get<double>("tx_power_dbm", s.radio.tx_power_dbm);
    s.radio.ref_loss_db = o.get<double>("ref_loss_db", s.radio.ref_loss_db);
    s.radio.ref_distance_m = o.get<double>("ref_distance_m", s.radio.ref_distance_m);
    s.radio.path_loss_exp = o.get<double>("path_loss_exp", s.radio.path_loss_exp);
    s.radio.noise_floor_dbm = o.get<double>("noise_floor_dbm", s.radio.noise_floor_dbm);
    o.done();
  }
  if (const json* m = root.sub("mac")) {
    Obj o(*m, "mac");
    s.mac.slot_ms = o.get<SimTime>("slot_ms", s.mac.slot_ms);
    s.mac.awake_guard_ms = o.get<SimTime>("awake_guard_ms", s.mac.awake_guard_ms);
    o.done();
  }
  if (const json* a = root.sub("agent")) {
    Obj o(*a, "agent");
    s.agent.window_ms = o.get<SimTime>("window_ms", s.agent.window_ms);
    s.agent.warmup_windows = o.get<int>("warmup_windows", s.agent.warmup_windows);
    s.agent.window_grace_ms = o.get<SimTime>("window_grace_ms", s.agent.window_grace_ms);
    o.done();
  }
  if (const json* p = root.sub("response")) {
    Obj o(*p, "response");
    s.response.t_fresh = o.get<int>("t_fresh", s.response.t_fresh);
    s.response.t_unstable_obs = o.get<int>("t_unstable_obs", s.response.t_unstable_obs);
    s.response.flip_limit = o.get<int>("flip_limit", s.response.flip_limit);
    s.response.t_ban = o.get<int>("t_ban", s.response.t_ban);
    s.response.t_suspect_obs = o.get<int>("t_suspect_obs", s.response.t_suspect_obs);
    s.response.t_mis = o.get<int>("t_mis", s.response.t_mis);
    s.response.flip_window = o.get<int>("flip_window", s.response.flip_window);
    o.done();
  }
  if (const json* d = root.sub("detector")) {
    Obj o(*d, "detector");
    s.detector.rssi_tolerance_db = o.get<double>("rssi_tolerance_db", s.detector.rssi_tolerance_db);
    s.detector.pdr_floor = o.get<double>("pdr_floor", s.detector.pdr_floor);
    s.detector.busy_ceiling = o.get<double>("busy_ceiling", s.detector.busy_ceiling);
    s.detector.watchdog_miss_limit =
        o.get<int>("watchdog_miss_limit", s.detector.watchdog_miss_limit);
    s.detector.forward_floor = o.get<double>("forward_floor", s.detector.forward_floor);
    s.detector.min_relay_volume = o.get<int>("min_relay_volume", s.detector.min_relay_volume);
    s.detector.spoof_match_db = o.get<double>("spoof_match_db", s.detector.spoof_match_db);
    o.done();
  }
  s.anomaly_sensitivity_k = root.get<double>("anomaly_sensitivity_k", s.anomaly_sensitivity_k);
  if (const json* rules = root.sub("rules")) {
    if (!rules->is_array()) fail("rules", "expected an array");
    s.rules.clear();
    int i = 0;
    for (const json& rj : *rules) s.rules.push_back(parse_rule(rj, "rules[" + std::to_string(i++) + "]"));
  }
  if (const json* attacks = root.sub("attacks")) {
    if (!attacks->is_array()) fail("attacks", "expected an array");
    int i = 0;
    for (const json& aj : *attacks)
      s.attacks.push_back(parse_attack(aj, "attacks[" + std::to_string(i++) + "]"));
  }
  if (const json* failures = root.sub("failures")) {
    if (!failures->is_array()) fail("failures", "expected an array");
    int i = 0;
    for (const json& fj : *failures) {
      const std::string path = "failures[" + std::to_string(i++) + "]";
      Obj o(fj, path);
      ScheduledFailure f;
      f.node = o.require<NodeId>("node");
      f.at = o.require<SimTime>("at_ms");
      o.done();
      s.failures.push_back(f);
    }
  }
  if (const json* e = root.sub("energy")) {
    Obj o(*e, "energy");
    s.energy.tx_mj = o.get<double>("tx_mj", s.energy.tx_mj);
    s.energy.rx_mj = o.get<double>("rx_mj", s.energy.rx_mj);
    s.energy.idle_mj_per_ms = o.get<double>("idle_mj_per_ms", s.energy.idle_mj_per_ms);
    s.energy.ids_mj = o.get<double>("ids_mj", s.energy.ids_mj);
    o.done();
  }
  s.duration_ms = root.get<SimTime>("duration_ms", s.duration_ms);
  s.seed = root.get<std::uint64_t>("seed", s.seed);
  const std::string mode = root.get<std::string>("ids_mode", "hierarchical");
  if (mode == "hierarchical")
    s.ids_mode = IdsMode::Hierarchical;
  else if (mode == "every_sensor")
    s.ids_mode = IdsMode::EverySensor;
  else
    fail("ids_mode", "unknown mode '" + mode + "'");
  s.attacks_enabled = root.get<bool>("attacks_enabled", true);
  root.done();

  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["topology"] = {{"regions", s.topology.regions},
                   {"cells_per_region", s.topology.cells_per_region},
                   {"sensors_per_cell", s.topology.sensors_per_cell},
                   {"cell_radius_m", s.topology.cell_radius},
                   {"seed", s.topology.rng_seed},
                   {"radio_range_m", s.topology.radio_range},
                   {"cluster_range_boost", s.topology.cluster_range_boost},
                   {"regional_range_boost", s.topology.regional_range_boost},
                   {"base_range_boost", s.topology.base_range_boost}};
  j["radio"] = {{"tx_power_dbm", s.radio.tx_power_dbm},
                {"ref_loss_db", s.radio.ref_loss_db},
                {"ref_distance_m", s.radio.ref_distance_m},
                {"path_loss_exp", s.radio.path_loss_exp},
                {"noise_floor_dbm", s.radio.noise_floor_dbm}};
  j["mac"] = {{"slot_ms", s.mac.slot_ms}, {"awake_guard_ms", s.mac.awake_guard_ms}};
  j["agent"] = {{"window_ms", s.agent.window_ms},
                {"warmup_windows", s.agent.warmup_windows},
                {"window_grace_ms", s.agent.window_grace_ms}};
  j["response"] = {{"t_fresh", s.response.t_fresh},
                   {"t_unstable_obs", s.response.t_unstable_obs},
                   {"flip_limit", s.response.flip_limit},
                   {"t_ban", s.response.t_ban},
                   {"t_suspect_obs", s.response.t_suspect_obs},
                   {"t_mis", s.response.t_mis},
                   {"flip_window", s.response.flip_window}};
  j["detector"] = {{"rssi_tolerance_db", s.detector.rssi_tolerance_db},
                   {"pdr_floor", s.detector.pdr_floor},
                   {"busy_ceiling", s.detector.busy_ceiling},
                   {"watchdog_miss_limit", s.detector.watchdog_miss_limit},
                   {"forward_floor", s.detector.forward_floor},
                   {"min_relay_volume", s.detector.min_relay_volume},
                   {"spoof_match_db", s.detector.spoof_match_db}};
  j["anomaly_sensitivity_k"] = s.anomaly_sensitivity_k;
  json rules = json::array();
  for (const SignatureRule& r : s.rules) {
    json rj;
    rj["id"] = r.rule_id;
    rj["label"] = r.label;
    rj["severity"] = to_string(r.severity);
    json conds = json::array();
    for (const FieldComparison& c : r.conditions)
      conds.push_back({{"feature", c.feature}, {"op", to_string(c.op)}, {"threshold", c.threshold}});
    if (!conds.empty()) rj["conditions"] = conds;
    if (r.kind_rate_kind)
      rj["kind_rate"] = {{"kind", to_string(*r.kind_rate_kind)}, {"min", r.kind_rate_min}};
    rules.push_back(rj);
  }
  j["rules"] = rules;
  json attacks = json::array();
  for (const AttackSpec& a : s.attacks) {
    json aj;
    aj["kind"] = to_string(a.kind);
    aj["attacker"] = a.attacker;
    aj["start_ms"] = a.start;
    aj["stop_ms"] = a.stop;
    if (a.peer != kInvalidNode) aj["peer"] = a.peer;
    aj["rate_per_s"] = a.rate_per_s;
    if (a.kind == AttackKind::SelectiveForwarding) aj["drop_ratio"] = a.drop_ratio;
    if (!a.drop_tag.empty()) aj["drop_tag"] = a.drop_tag;
    if (!a.fake_ids.empty()) aj["fake_ids"] = a.fake_ids;
    if (a.fake_id != kInvalidNode) aj["fake_id"] = a.fake_id;
    if (a.target != kInvalidNode) aj["target"] = a.target;
    if (a.kind == AttackKind::Jamming) aj["jam_corruption"] = a.jam_corruption;
    aj["range_boost"] = a.range_boost;
    attacks.push_back(aj);
  }
  j["attacks"] = attacks;
  json failures = json::array();
  for (const ScheduledFailure& f : s.failures)
    failures.push_back({{"node", f.node}, {"at_ms", f.at}});
  j["failures"] = failures;
  j["energy"] = {{"tx_mj", s.energy.tx_mj},
                 {"rx_mj", s.energy.rx_mj},
                 {"idle_mj_per_ms", s.energy.idle_mj_per_ms},
                 {"ids_mj", s.energy.ids_mj}};
  j["duration_ms"] = s.duration_ms;
  j["seed"] = s.seed;
  j["ids_mode"] = s.ids_mode == IdsMode::Hierarchical ? "hierarchical" : "every_sensor";
  j["attacks_enabled"] = s.attacks_enabled;
  return j.dump(2) + "\n";
}

}  // namespace wsnids
