#include "wsnids/types.hpp"

#include <cmath>

namespace wsnids {

const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Sensor: return "sensor";
    case NodeRole::ClusterNode: return "cluster";
    case NodeRole::RegionalNode: return "regional";
    case NodeRole::BaseStation: return "base";
  }
  return "?";
}

const char* to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Data: return "data";
    case PacketKind::Hello: return "hello";
    case PacketKind::RouteAdvert: return "route_advert";
    case PacketKind::Report: return "report";
    case PacketKind::Heartbeat: return "heartbeat";
    case PacketKind::PolicyUpdate: return "policy_update";
    case PacketKind::Alert: return "alert";
  }
  return "?";
}

const char* to_string(Severity sev) {
  switch (sev) {
    case Severity::Info: return "info";
    case Severity::Misbehavior: return "misbehavior";
    case Severity::Danger: return "danger";
  }
  return "?";
}

const char* to_string(DetectorTag tag) {
  switch (tag) {
    case DetectorTag::Physical: return "physical";
    case DetectorTag::Tdma: return "tdma";
    case DetectorTag::Smac: return "smac";
    case DetectorTag::Route: return "route";
    case DetectorTag::Watchdog: return "watchdog";
    case DetectorTag::Signature: return "signature";
    case DetectorTag::Anomaly: return "anomaly";
  }
  return "?";
}

double distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace wsnids
