#include "wsnids/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace wsnids {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double ratio(double variant, double baseline) {
  if (baseline == 0.0) return variant == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return variant / baseline;
}

}  // namespace

std::string MetricsReport::to_kv() const {
  std::ostringstream o;
  o << "scale.regions=" << regions << '\n';
  o << "scale.cells=" << cells << '\n';
  o << "scale.sensors=" << sensors << '\n';
  o << "scale.duration_ms=" << duration_ms << '\n';
  o << "attacks.count=" << attacks.size() << '\n';
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    const AttackOutcome& a = attacks[i];
    const std::string p = "attack." + std::to_string(i) + ".";
    o << p << "kind=" << a.kind << '\n';
    o << p << "attacker=" << a.attacker << '\n';
    o << p << "principal=" << a.principal << '\n';
    o << p << "start_ms=" << a.start << '\n';
    o << p << "detected=" << (a.detected ? 1 : 0) << '\n';
    if (a.detection_latency_ms)
      o << p << "detection_latency_ms=" << *a.detection_latency_ms << '\n';
    o << p << "final_class=" << (a.classified ? to_string(a.final_class) : "none") << '\n';
  }
  o << "findings.total=" << findings_total << '\n';
  o << "findings.false_positive_count=" << false_positive_count << '\n';
  o << "classification.misclassified_honest_nodes=" << misclassified_honest_nodes << '\n';
  for (const auto& [det, n] : alerts_by_detector) o << "alerts.detector." << det << '=' << n << '\n';
  for (const auto& [tier, n] : alerts_by_tier) o << "alerts.tier." << tier << '=' << n << '\n';
  for (const auto& [tier, e] : energy_by_tier) {
    o << "energy." << tier << ".tx_mj=" << fmt(e.tx_mj) << '\n';
    o << "energy." << tier << ".rx_mj=" << fmt(e.rx_mj) << '\n';
    o << "energy." << tier << ".idle_mj=" << fmt(e.idle_mj) << '\n';
    o << "energy." << tier << ".ids_mj=" << fmt(e.ids_mj) << '\n';
  }
  o << "energy.total_mj=" << fmt(energy_total_mj) << '\n';
  o << "energy.ids_mj=" << fmt(ids_energy_mj) << '\n';
  o << "traffic.broadcast_count=" << broadcast_count << '\n';
  o << "traffic.alert_broadcast_count=" << alert_broadcast_count << '\n';
  o << "failover.count=" << failover_count << '\n';
  o << "failover.orphaned_sensors=" << orphaned_sensors << '\n';
  for (const auto& [node, w] : failover_disruption_windows)
    o << "failover.disruption_windows." << node << '=' << w << '\n';
  for (const auto& [node, timeline] : class_timeline) {
    o << "class." << node << '=';
    for (std::size_t i = 0; i < timeline.size(); ++i) {
      if (i) o << ',';
      o << timeline[i].first << '@' << timeline[i].second;
    }
    o << '\n';
  }
  return o.str();
}

MetricsReport MetricsReport::from_kv(const std::string& text) {
  MetricsReport r;
  std::istringstream in(text);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto geti = [&](const std::string& k) -> std::int64_t {
    auto it = kv.find(k);
    return it == kv.end() ? 0 : std::stoll(it->second);
  };
  auto getd = [&](const std::string& k) -> double {
    auto it = kv.find(k);
    return it == kv.end() ? 0.0 : std::stod(it->second);
  };
  r.regions = static_cast<int>(geti("scale.regions"));
  r.cells = static_cast<int>(geti("scale.cells"));
  r.sensors = static_cast<int>(geti("scale.sensors"));
  r.duration_ms = geti("scale.duration_ms");
  r.findings_total = geti("findings.total");
  r.false_positive_count = geti("findings.false_positive_count");
  r.misclassified_honest_nodes = geti("classification.misclassified_honest_nodes");
  r.energy_total_mj = getd("energy.total_mj");
  r.ids_energy_mj = getd("energy.ids_mj");
  r.broadcast_count = geti("traffic.broadcast_count");
  r.alert_broadcast_count = geti("traffic.alert_broadcast_count");
  r.failover_count = geti("failover.count");
  r.orphaned_sensors = geti("failover.orphaned_sensors");
  for (const auto& [k, v] : kv) {
    if (k.rfind("alerts.detector.", 0) == 0) r.alerts_by_detector[k.substr(16)] = std::stoll(v);
    if (k.rfind("alerts.tier.", 0) == 0) r.alerts_by_tier[k.substr(12)] = std::stoll(v);
  }
  return r;
}

std::string MetricsReport::summary() const {
  std::ostringstream o;
  o << "topology: " << regions << " regions, " << cells << " cells, " << sensors
    << " sensors, " << duration_ms << " ms simulated\n";
  o << "findings: " << findings_total << " total, " << false_positive_count
    << " against honest nodes\n";
  o << "misclassified honest nodes: " << misclassified_honest_nodes << '\n';
  for (const AttackOutcome& a : attacks) {
    o << "attack " << a.kind << " by node " << a.attacker << ": "
      << (a.detected ? "detected" : "NOT detected");
    if (a.detection_latency_ms) o << " after " << *a.detection_latency_ms << " ms";
    o << ", final class " << (a.classified ? to_string(a.final_class) : "none") << '\n';
  }
  o << "energy: total " << fmt(energy_total_mj) << " mJ, intrusion detection "
    << fmt(ids_energy_mj) << " mJ\n";
  o << "broadcasts: " << broadcast_count << " (" << alert_broadcast_count << " alert)\n";
  if (failover_count > 0) {
    o << "failovers: " << failover_count << ", orphaned sensors " << orphaned_sensors << '\n';
    for (const auto& [node, w] : failover_disruption_windows)
      o << "  node " << node << " disruption " << w << " windows\n";
  }
  return o.str();
}

std::string CompareResult::to_text() const {
  std::ostringstream o;
  o << "energy_ratio=" << fmt(energy_ratio) << '\n';
  o << "ids_energy_ratio=" << fmt(ids_energy_ratio) << '\n';
  o << "broadcast_ratio=" << fmt(broadcast_ratio) << '\n';
  o << "alert_ratio=" << fmt(alert_ratio) << '\n';
  return o.str();
}

CompareResult compare(const MetricsReport& baseline, const MetricsReport& variant) {
  if (baseline.regions != variant.regions || baseline.cells != variant.cells ||
      baseline.sensors != variant.sensors)
    throw std::invalid_argument("compare: reports come from different topology scales");
  CompareResult r;
  r.energy_ratio = ratio(variant.energy_total_mj, baseline.energy_total_mj);
  r.ids_energy_ratio = ratio(variant.ids_energy_mj, baseline.ids_energy_mj);
  r.broadcast_ratio = ratio(static_cast<double>(variant.broadcast_count),
                            static_cast<double>(baseline.broadcast_count));
  std::int64_t balerts = 0;
  std::int64_t valerts = 0;
  for (const auto& [d, n] : baseline.alerts_by_detector) balerts += n;
  for (const auto& [d, n] : variant.alerts_by_detector) valerts += n;
  r.alert_ratio = ratio(static_cast<double>(valerts), static_cast<double>(balerts));
  return r;
}

}  // namespace wsnids
