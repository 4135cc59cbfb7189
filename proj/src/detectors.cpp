#include "wsnids/detectors.hpp"

#include <cmath>

namespace wsnids {

void RssiBaseline::learn(NodeId src, double rssi_dbm) {
  if (frozen_) return;
  auto& [mean, samples] = pairs_[src];
  samples += 1;
  mean += (rssi_dbm - mean) / samples;
}

void RssiBaseline::freeze() { frozen_ = true; }

void RssiBaseline::reset_pair(NodeId src) { pairs_.erase(src); }

std::optional<double> RssiBaseline::expected(NodeId src) const {
  auto it = pairs_.find(src);
  if (it == pairs_.end() || it->second.second == 0) return std::nullopt;
  return it->second.first;
}

std::vector<Finding> check_physical(const StimulusVector& v, const RssiBaseline& baseline,
                                    const DetectorParams& params, const PhysicalContext& ctx,
                                    SimTime at) {
  std::vector<Finding> findings;

  const bool channel_jammed = ctx.carrier_busy_frac > params.busy_ceiling;
  if (channel_jammed) {
    Finding f;
    f.at = at;
    f.detector = DetectorTag::Physical;
    f.label = "jamming";
    f.feature = "carrier_busy_frac";
    f.observed = ctx.carrier_busy_frac;
    f.expected = params.busy_ceiling;
    // Attribute by matching the interference strength against stored link
    // baselines; an unmatched interferer stays an unattributed alarm.
    f.subject = kInvalidNode;
    f.severity = Severity::Info;
    if (ctx.interference_rssi) {
      NodeId best = kInvalidNode;
      double best_err = params.spoof_match_db;
      for (const auto& [src, pair] : baseline.pairs()) {
        const double err = std::abs(pair.first - *ctx.interference_rssi);
        if (err < best_err || (err == best_err && best != kInvalidNode && src < best)) {
          best = src;
          best_err = err;
        }
      }
      if (best != kInvalidNode) {
        f.subject = best;
        f.severity = Severity::Misbehavior;
      }
    }
    findings.push_back(std::move(f));
  }

  for (const auto& [src, stats] : v.per_source) {
    if (stats.direct_count > 0) {
      const auto expected = baseline.expected(src);
      if (!expected) {
        Finding f;
        f.at = at;
        f.subject = src;
        f.detector = DetectorTag::Physical;
        f.severity = Severity::Info;  // new node, not misbehavior
        f.label = "unknown_link";
        f.feature = "mean_rssi";
        f.observed = stats.mean_rssi;
        findings.push_back(std::move(f));
      } else if (std::abs(stats.mean_rssi - *expected) > params.rssi_tolerance_db) {
        Finding f;
        f.at = at;
        f.subject = src;
        f.detector = DetectorTag::Physical;
        f.severity = Severity::Misbehavior;
        f.label = "rssi_mismatch";
        f.feature = "mean_rssi";
        f.observed = stats.mean_rssi;
        f.expected = *expected;
        findings.push_back(std::move(f));
      }
    }

    // PDR collapse. Skipped when the channel itself is jammed: the loss is
    // already explained and the sources are victims, not suspects.
    if (!channel_jammed && stats.pdr_defined && stats.pdr < params.pdr_floor) {
      Finding f;
      f.at = at;
      f.subject = src;
      f.detector = DetectorTag::Physical;
      f.severity = Severity::Misbehavior;
      f.label = "jamming";
      f.feature = "pdr";
      f.observed = stats.pdr;
      f.expected = params.pdr_floor;
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

std::optional<Finding> check_tdma(const Packet& pkt, SimTime tx_time, const TdmaSchedule& sched,
                                  SimTime at) {
  const NodeId owner = slot_owner(sched, tx_time);
  if (owner == pkt.claimed_src) return std::nullopt;
  Finding f;
  f.at = at;
  f.subject = pkt.claimed_src;
  f.detector = DetectorTag::Tdma;
  f.severity = Severity::Misbehavior;
  f.label = "slot_violation";
  f.feature = "slot_owner";
  f.observed = static_cast<double>(pkt.claimed_src);
  f.expected = static_cast<double>(owner);
  return f;
}

std::optional<Finding> check_smac(const Packet& pkt, SimTime tx_time, const SmacSchedule& sched,
                                  SimTime at) {
  if (!sched.awake.count(pkt.claimed_src)) return std::nullopt;
  if (!is_asleep(sched, pkt.claimed_src, tx_time)) return std::nullopt;
  Finding f;
  f.at = at;
  f.subject = pkt.claimed_src;
  f.detector = DetectorTag::Smac;
  f.severity = Severity::Misbehavior;
  f.label = "sleep_violation";
  f.feature = "awake_window";
  f.observed = static_cast<double>(tx_time);
  return f;
}

std::optional<Finding> attribute_spoof(NodeId claimed, double observed_rssi,
                                       const RssiBaseline& baseline,
                                       const DetectorParams& params, SimTime at) {
  const auto expected = baseline.expected(claimed);
  if (!expected) return std::nullopt;
  if (std::abs(observed_rssi - *expected) <= params.rssi_tolerance_db) return std::nullopt;

  NodeId best = kInvalidNode;
  double best_err = params.spoof_match_db;
  for (const auto& [src, pair] : baseline.pairs()) {
    if (src == claimed) continue;
    const double err = std::abs(pair.first - observed_rssi);
    if (err < best_err || (err == best_err && best != kInvalidNode && src < best)) {
      best = src;
      best_err = err;
    }
  }
  if (best == kInvalidNode) return std::nullopt;
  Finding f;
  f.at = at;
  f.subject = best;
  f.detector = DetectorTag::Physical;
  f.severity = Severity::Misbehavior;
  f.label = "source_spoof";
  f.feature = "mean_rssi";
  f.observed = observed_rssi;
  f.expected = *expected;
  return f;
}

std::vector<Finding> watchdog_check(NodeId child, const WatchdogView& view,
                                    const DetectorParams& params, SimTime at) {
  std::vector<Finding> findings;
  if (view.missed_reports >= params.watchdog_miss_limit) {
    Finding f;
    f.at = at;
    f.subject = child;
    f.detector = DetectorTag::Watchdog;
    f.severity = Severity::Misbehavior;
    f.label = "missed_reports";
    f.feature = "missed_reports";
    f.observed = static_cast<double>(view.missed_reports);
    f.expected = static_cast<double>(params.watchdog_miss_limit);
    findings.push_back(std::move(f));
  }
  if (view.have_summary) {
    if (view.packets_forwarded > view.packets_seen) {
      Finding f;
      f.at = at;
      f.subject = child;
      f.detector = DetectorTag::Watchdog;
      f.severity = Severity::Misbehavior;
      f.label = "summary_inconsistent";
      f.feature = "packets_forwarded";
      f.observed = static_cast<double>(view.packets_forwarded);
      f.expected = static_cast<double>(view.packets_seen);
      findings.push_back(std::move(f));
    } else if (view.packets_seen >= params.min_relay_volume &&
               view.findings_reported == 0 &&
               static_cast<double>(view.packets_forwarded) <
                   params.forward_floor * static_cast<double>(view.packets_seen)) {
      // The child claims a healthy cell yet passes on almost nothing.
      Finding f;
      f.at = at;
      f.subject = child;
      f.detector = DetectorTag::Watchdog;
      f.severity = Severity::Misbehavior;
      f.label = "forwarding_shortfall";
      f.feature = "forward_ratio";
      f.observed = view.packets_seen == 0
                       ? 1.0
                       : static_cast<double>(view.packets_forwarded) / view.packets_seen;
      f.expected = params.forward_floor;
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

}  // namespace wsnids
