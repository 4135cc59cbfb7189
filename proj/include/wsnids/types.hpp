#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace wsnids {

// Simulated time in integer milliseconds. Integer ticks keep event ordering
// exact and runs reproducible.
using SimTime = std::int64_t;

// Unique node identifier, stable for a simulation run.
using NodeId = std::int32_t;

inline constexpr NodeId kInvalidNode = -1;
// Destination value meaning "every node in radio range".
inline constexpr NodeId kBroadcast = -2;

enum class NodeRole : std::uint8_t { Sensor, ClusterNode, RegionalNode, BaseStation };

const char* to_string(NodeRole role);

enum class PacketKind : std::uint8_t {
  Data,
  Hello,
  RouteAdvert,
  Report,
  Heartbeat,
  PolicyUpdate,
  Alert,
};

const char* to_string(PacketKind kind);

// A packet as observed on the air. claimed_src is what the header says;
// true_src is ground truth and may differ only for attacker-generated
// traffic. hop_trace records every node that actually transmitted the
// packet, starting with the first transmitter.
struct Packet {
  NodeId claimed_src = kInvalidNode;
  NodeId true_src = kInvalidNode;
  NodeId dst = kInvalidNode;
  PacketKind kind = PacketKind::Data;
  std::vector<NodeId> hop_trace;
  SimTime sent_at = 0;
  std::int64_t seq = 0;
  std::string payload_tag;
  // Engine-unique id of the originating emission; forwarded copies keep it
  // so receivers can deduplicate multi-path arrivals.
  std::int64_t uid = 0;
};

enum class Severity : std::uint8_t { Info, Misbehavior, Danger };

const char* to_string(Severity sev);

enum class DetectorTag : std::uint8_t {
  Physical,   // RSSI / PDR / carrier-busy checks
  Tdma,       // slot ownership violations
  Smac,       // sleep-period violations
  Route,      // hop trace vs expected path
  Watchdog,   // parent-tier report monitoring
  Signature,  // signature-record rule hit
  Anomaly,    // profile deviation
};

const char* to_string(DetectorTag tag);

// One detection event, attributed to the claimed source (or to an inferred
// culprit, for detectors able to attribute).
struct Finding {
  SimTime at = 0;
  NodeId subject = kInvalidNode;
  DetectorTag detector = DetectorTag::Signature;
  Severity severity = Severity::Info;
  std::string label;     // attack name or rule/feature tag
  std::string feature;   // which measurement triggered
  double observed = 0.0;
  double expected = 0.0;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

}  // namespace wsnids
