#include "wsnids/agent.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wsnids {

std::optional<double> feature_value(const SourceStats& s, const std::string& feature) {
  if (feature == "pkt_count") return static_cast<double>(s.pkt_count);
  if (feature == "hello_count") return static_cast<double>(s.hello_count);
  if (feature == "mean_rssi")
    return s.direct_count > 0 ? std::optional<double>(s.mean_rssi) : std::nullopt;
  if (feature == "pdr") return s.pdr_defined ? std::optional<double>(s.pdr) : std::nullopt;
  if (feature == "carrier_busy_frac") return s.carrier_busy_frac;
  if (feature == "slot_violations") return static_cast<double>(s.slot_violations);
  if (feature == "sleep_violations") return static_cast<double>(s.sleep_violations);
  if (feature == "route_deviations") return static_cast<double>(s.route_deviations);
  if (feature == "forward_ratio") return s.forward_ratio;
  if (feature == "distinct_cells_seen") return static_cast<double>(s.distinct_cells_seen);
  if (feature == "relayed_in") return static_cast<double>(s.relayed_in);
  if (feature == "relayed_out") return static_cast<double>(s.relayed_out);
  if (feature == "route_advert_count") return static_cast<double>(s.route_advert_count);
  return std::nullopt;
}

StimulusVector preprocess(const PreprocessInput& in) {
  StimulusVector v;
  v.window_start = in.window_start;
  v.window_end = in.window_end;

  struct Acc {
    std::set<std::int64_t> uids;
    double rssi_sum = 0.0;
    int direct = 0;
  };
  std::map<NodeId, Acc> accs;

  for (const Observation& ob : in.observations) {
    if (ob.corrupted) continue;
    const NodeId src = ob.pkt.claimed_src;
    Acc& acc = accs[src];
    SourceStats& s = v.per_source[src];
    if (acc.uids.insert(ob.pkt.uid).second) {
      s.pkt_count += 1;
      s.kind_counts[ob.pkt.kind] += 1;
      if (ob.pkt.kind == PacketKind::Hello) s.hello_count += 1;
      if (ob.pkt.kind == PacketKind::RouteAdvert) s.route_advert_count += 1;
    }
    if (ob.direct) {
      acc.rssi_sum += ob.rssi_dbm;
      acc.direct += 1;
    }
  }

  for (auto& [src, s] : v.per_source) {
    const Acc& acc = accs[src];
    s.direct_count = acc.direct;
    if (acc.direct > 0) s.mean_rssi = acc.rssi_sum / acc.direct;
    s.carrier_busy_frac = in.carrier_busy_frac;
  }

  // PDR: delivered data packets over the slot-derived expectation. Sources
  // with no expectation this window are left undefined rather than flagged.
  for (const auto& [src, expected] : in.expected_data) {
    if (expected <= 0) continue;
    SourceStats& s = v.per_source[src];  // creates a row for silenced sources
    const auto it = s.kind_counts.find(PacketKind::Data);
    const int delivered = it == s.kind_counts.end() ? 0 : it->second;
    s.pdr = std::min(1.0, static_cast<double>(delivered) / expected);
    s.pdr_defined = true;
    s.carrier_busy_frac = in.carrier_busy_frac;
  }

  for (const auto& [node, count] : in.relayed_in) {
    SourceStats& s = v.per_source[node];
    s.relayed_in = count;
    s.carrier_busy_frac = in.carrier_busy_frac;
  }
  for (const auto& [node, count] : in.relayed_out) v.per_source[node].relayed_out = count;
  for (auto& [node, s] : v.per_source)
    if (s.relayed_in > 0)
      s.forward_ratio = std::min(1.0, static_cast<double>(s.relayed_out) / s.relayed_in);

  return v;
}

std::vector<Finding> match_signatures(const PolicySet& policy, const StimulusVector& v,
                                      SimTime at) {
  std::vector<Finding> findings;

  // Blacklisted unique ids transmit: Danger, ahead of the general rules.
  for (const auto& [src, stats] : v.per_source) {
    if (stats.pkt_count > 0 && policy.blacklist.count(src)) {
      Finding f;
      f.at = at;
      f.subject = src;
      f.detector = DetectorTag::Signature;
      f.severity = Severity::Danger;
      f.label = "blacklist";
      f.feature = "pkt_count";
      f.observed = stats.pkt_count;
      f.expected = 0.0;
      findings.push_back(std::move(f));
    }
  }

  for (const SignatureRule& rule : policy.signature_rules) {
    for (const auto& [src, stats] : v.per_source) {
      bool hit = true;
      double observed = 0.0;
      double threshold = 0.0;
      std::string feature;
      for (const FieldComparison& c : rule.conditions) {
        const auto value = feature_value(stats, c.feature);
        if (!value || !cmp_apply(c.op, *value, c.threshold)) {
          hit = false;
          break;
        }
        observed = *value;
        threshold = c.threshold;
        feature = c.feature;
      }
      if (hit && rule.kind_rate_kind) {
        const auto it = stats.kind_counts.find(*rule.kind_rate_kind);
        const int count = it == stats.kind_counts.end() ? 0 : it->second;
        if (count < rule.kind_rate_min) {
          hit = false;
        } else {
          observed = count;
          threshold = rule.kind_rate_min;
          if (feature.empty()) feature = std::string("kind:") + to_string(*rule.kind_rate_kind);
        }
      }
      if (!hit) continue;
      Finding f;
      f.at = at;
      f.subject = src;
      f.detector = DetectorTag::Signature;
      f.severity = rule.severity;
      f.label = rule.label;
      f.feature = feature;
      f.observed = observed;
      f.expected = threshold;
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

namespace {

// Not every vector field belongs in the per-source profile. Absolute RSSI
// depends on each source's distance (the per-pair store covers it); the busy
// fraction is a property of the whole cell, handled by the physical-layer
// ceiling; and route deviations implicate the forwarding path, not the
// claimed source, so the route detector's own culprit attribution governs
// them.
bool anomaly_profiled(const std::string& feature) {
  return feature != "mean_rssi" && feature != "carrier_busy_frac" &&
         feature != "route_deviations";
}

}  // namespace

void anomaly_learn(AnomalyProfile& profile, const StimulusVector& v) {
  if (profile.frozen) return;
  for (const auto& [src, stats] : v.per_source) {
    for (const std::string& name : known_features()) {
      if (!anomaly_profiled(name)) continue;
      const auto value = feature_value(stats, name);
      if (!value) continue;
      FeatureBaseline& b = profile.baselines[name];
      // Welford update; stddev holds the running M2 until freeze.
      b.samples += 1;
      const double delta = *value - b.mean;
      b.mean += delta / static_cast<double>(b.samples);
      b.stddev += delta * (*value - b.mean);
    }
  }
}

void anomaly_freeze(AnomalyProfile& profile) {
  if (profile.frozen) return;
  for (auto& [name, b] : profile.baselines)
    b.stddev = b.samples > 1 ? std::sqrt(b.stddev / static_cast<double>(b.samples - 1)) : 0.0;
  profile.frozen = true;
}

std::vector<Finding> detect_anomaly(const AnomalyProfile& profile, const StimulusVector& v,
                                    SimTime at) {
  if (!profile.frozen) return {};
  std::vector<Finding> findings;
  for (const auto& [src, stats] : v.per_source) {
    for (const std::string& name : known_features()) {
      if (!anomaly_profiled(name)) continue;
      const auto value = feature_value(stats, name);
      if (!value) continue;
      const auto it = profile.baselines.find(name);
      if (it == profile.baselines.end() || it->second.samples == 0) continue;
      const FeatureBaseline& b = it->second;
      const double dev = std::abs(*value - b.mean);
      // Zero learned variance: any deviation flags.
      const bool flag = b.stddev == 0.0 ? dev > 0.0 : dev > profile.sensitivity_k * b.stddev;
      if (!flag) continue;
      Finding f;
      f.at = at;
      f.subject = src;
      f.detector = DetectorTag::Anomaly;
      f.severity = Severity::Misbehavior;
      f.label = "profile_deviation";
      f.feature = name;
      f.observed = *value;
      f.expected = b.mean;
      findings.push_back(std::move(f));
    }
    for (const FieldComparison& lim : profile.absolute_limits) {
      const auto value = feature_value(stats, lim.feature);
      if (!value || !cmp_apply(lim.op, *value, lim.threshold)) continue;
      Finding f;
      f.at = at;
      f.subject = src;
      f.detector = DetectorTag::Anomaly;
      f.severity = Severity::Misbehavior;
      f.label = "absolute_limit";
      f.feature = lim.feature;
      f.observed = *value;
      f.expected = lim.threshold;
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

}  // namespace wsnids
