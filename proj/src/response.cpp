#include "wsnids/response.hpp"

#include <stdexcept>

namespace wsnids {

namespace {

void enter(NodeClassRecord& rec, NodeClass state, SimTime now) {
  rec.state = state;
  rec.entered_at = now;
  rec.good_streak = 0;
}

void enter_suspect(NodeClassRecord& rec, SimTime now, const ResponseParams& p, SimTime window_ms) {
  enter(rec, NodeClass::Suspect, now);
  rec.ban_until = now + static_cast<SimTime>(p.t_ban) * window_ms;
  rec.flips.clear();
  rec.observed_windows = 0;
  rec.misbehavior_streak = 0;
}

void record_flip(NodeClassRecord& rec, SimTime now, const ResponseParams& p, SimTime window_ms) {
  rec.flips.push_back(now);
  const SimTime horizon = now - static_cast<SimTime>(p.flip_window) * window_ms;
  while (!rec.flips.empty() && rec.flips.front() <= horizon) rec.flips.pop_front();
}

int flips_in_window(const NodeClassRecord& rec, SimTime now, const ResponseParams& p,
                    SimTime window_ms) {
  const SimTime horizon = now - static_cast<SimTime>(p.flip_window) * window_ms;
  int n = 0;
  for (SimTime t : rec.flips)
    if (t > horizon) ++n;
  return n;
}

}  // namespace

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Fresh: return "fresh";
    case NodeClass::Member: return "member";
    case NodeClass::Unstable: return "unstable";
    case NodeClass::Suspect: return "suspect";
    case NodeClass::Malicious: return "malicious";
  }
  return "?";
}

NodeClassRecord admit(NodeId node, SimTime at, const std::set<NodeId>& blacklist) {
  if (blacklist.count(node))
    throw std::invalid_argument("admit: node " + std::to_string(node) + " is blacklisted");
  NodeClassRecord rec;
  rec.node = node;
  rec.state = NodeClass::Fresh;
  rec.entered_at = at;
  return rec;
}

NodeClassRecord& admit(std::map<NodeId, NodeClassRecord>& registry, NodeId node, SimTime at,
                       const std::set<NodeId>& blacklist) {
  if (registry.count(node))
    throw std::invalid_argument("admit: node " + std::to_string(node) + " is already classified");
  return registry.emplace(node, admit(node, at, blacklist)).first->second;
}

StepOutcome step(NodeClassRecord& rec, Verdict verdict, SimTime now, const ResponseParams& params,
                 SimTime window_ms) {
  params.validate();
  StepOutcome out;
  out.before = rec.state;

  if (verdict == Verdict::Misbehaved) {
    rec.misbehavior_streak += 1;
    rec.good_streak = 0;
  } else {
    rec.misbehavior_streak = 0;
    rec.good_streak += 1;
  }

  switch (rec.state) {
    case NodeClass::Fresh:
      if (verdict == Verdict::Misbehaved) {
        enter_suspect(rec, now, params, window_ms);
        out.entered_suspect = true;
      } else if (now - rec.entered_at >= static_cast<SimTime>(params.t_fresh) * window_ms) {
        enter(rec, NodeClass::Member, now);
      }
      break;

    case NodeClass::Member:
      if (verdict == Verdict::Misbehaved) {
        enter(rec, NodeClass::Unstable, now);
        record_flip(rec, now, params, window_ms);
      }
      break;

    case NodeClass::Unstable:
      if (flips_in_window(rec, now, params, window_ms) >= params.flip_limit ||
          rec.misbehavior_streak >= params.t_mis) {
        enter_suspect(rec, now, params, window_ms);
        out.entered_suspect = true;
      } else if (verdict == Verdict::Good && rec.good_streak >= params.t_unstable_obs) {
        enter(rec, NodeClass::Member, now);
        record_flip(rec, now, params, window_ms);
      }
      break;

    case NodeClass::Suspect:
      if (now < rec.ban_until) {
        // Fully isolated: nothing to observe, the timers just run.
        rec.misbehavior_streak = 0;
        rec.good_streak = 0;
      } else if (verdict == Verdict::Misbehaved) {
        enter(rec, NodeClass::Malicious, now);
        out.entered_malicious = true;
      } else {
        rec.observed_windows += 1;
        if (rec.observed_windows >= params.t_suspect_obs) {
          enter(rec, NodeClass::Unstable, now);
          rec.misbehavior_streak = 0;
        }
      }
      break;

    case NodeClass::Malicious:
      break;  // absorbing
  }

  out.after = rec.state;
  return out;
}

bool permit(const NodeClassRecord& rec, NodeAction action, SimTime now) {
  switch (rec.state) {
    case NodeClass::Fresh:
    case NodeClass::Unstable:
      return action != NodeAction::Originate;
    case NodeClass::Member:
      return true;
    case NodeClass::Suspect:
      if (now < rec.ban_until) return false;  // banned: all traffic cut, inbound discarded
      return action != NodeAction::Originate; // reconnected under close observation
    case NodeClass::Malicious:
      return false;
  }
  return false;
}

bool blacklist_insert(std::set<NodeId>& record_db, NodeId node) {
  return record_db.insert(node).second;
}

}  // namespace wsnids
