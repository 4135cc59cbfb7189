#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids {

// Deterministic discrete-event queue. Events fire in (time, insertion
// sequence) order, so equal-time events run in the order they were
// scheduled and a run is a pure function of its inputs.
class EventQueue {
 public:
  using Handler = std::function<void()>;

  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  // Rejects events dated before the current clock.
  void schedule_event(SimTime at, Handler fn) {
    if (at < now_) throw std::invalid_argument("schedule_event: time is in the past");
    heap_.push(Entry{at, next_seq_++, std::move(fn)});
  }

  // Fires the next event; returns false on an empty queue (clock unchanged).
  bool step() {
    if (heap_.empty()) return false;
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.at;
    e.fn();
    return true;
  }

  // Drains every event up to and including `until`; later events stay queued.
  void run_until(SimTime until) {
    while (!heap_.empty() && heap_.top().at <= until) step();
    if (now_ < until) now_ = until;
  }

  void run_all() {
    while (step()) {
    }
  }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    Handler fn;
    bool operator>(const Entry& o) const {
      if (at != o.at) return at > o.at;
      return seq > o.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0;
};

}  // namespace wsnids
