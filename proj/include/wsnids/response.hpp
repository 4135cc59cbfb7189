#pragma once

#include <deque>
#include <map>
#include <set>

#include "wsnids/policy.hpp"
#include "wsnids/types.hpp"

namespace wsnids {

enum class NodeClass : std::uint8_t { Fresh, Member, Unstable, Suspect, Malicious };

const char* to_string(NodeClass c);

enum class Verdict : std::uint8_t { Good, Misbehaved };

enum class NodeAction : std::uint8_t { Originate, Forward, Receive };

// Per-sensor classification state, owned by the sensor's current cluster
// monitor and migrated intact on failover.
struct NodeClassRecord {
  NodeId node = kInvalidNode;
  NodeClass state = NodeClass::Fresh;
  SimTime entered_at = 0;
  int good_streak = 0;         // consecutive Good windows in current stretch
  int misbehavior_streak = 0;  // consecutive Misbehaved windows
  std::deque<SimTime> flips;   // times of Member<->Unstable interchanges
  SimTime ban_until = 0;       // Suspect isolation deadline
  int observed_windows = 0;    // post-ban observation progress
};

struct StepOutcome {
  NodeClass before = NodeClass::Fresh;
  NodeClass after = NodeClass::Fresh;
  bool entered_suspect = false;    // triggers a Danger alert upward
  bool entered_malicious = false;  // triggers blacklist insertion
};

// Classifies a newly seen node as Fresh. Throws std::invalid_argument when
// the id is blacklisted (the caller raises a Danger finding instead).
NodeClassRecord admit(NodeId node, SimTime at, const std::set<NodeId>& blacklist);

// Registry-backed admission: also rejects duplicate admissions of an id
// that is already classified here.
NodeClassRecord& admit(std::map<NodeId, NodeClassRecord>& registry, NodeId node, SimTime at,
                       const std::set<NodeId>& blacklist);

// Advances one record by one closed window. Exactly one transition fires
// per call:
//   Fresh    + Good, in state >= t_fresh windows          -> Member
//   Fresh    + Misbehaved                                 -> Suspect
//   Member   + Misbehaved                                 -> Unstable
//   Unstable + flips >= flip_limit in flip_window,
//              or misbehavior_streak >= t_mis             -> Suspect
//   Unstable + Good for t_unstable_obs windows            -> Member
//   Suspect  : isolated until ban_until, verdicts ignored;
//              then Misbehaved -> Malicious,
//              Good for t_suspect_obs windows -> Unstable
//   Malicious: absorbing
StepOutcome step(NodeClassRecord& rec, Verdict verdict, SimTime now, const ResponseParams& params,
                 SimTime window_ms);

// Traffic permissions for the record's current state. Suspects are fully cut
// off while banned; once reconnected for observation they may relay but not
// originate.
bool permit(const NodeClassRecord& rec, NodeAction action, SimTime now);

// Adds the node's unique id to a signature-record blacklist. Returns true
// when the entry is new; duplicates are a no-op.
bool blacklist_insert(std::set<NodeId>& record_db, NodeId node);

}  // namespace wsnids
