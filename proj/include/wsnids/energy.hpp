#pragma once

#include <map>
#include <stdexcept>

#include "wsnids/types.hpp"

namespace wsnids {

struct EnergyCosts {
  double tx_mj = 0.05;          // per transmission
  double rx_mj = 0.02;          // per reception
  double idle_mj_per_ms = 0.001;
  double ids_mj = 0.005;        // per packet inspected
};

// Per-node millijoule accounting, split by activity. Totals are the plain
// sum of every charge, so conservation is checkable against the charge log.
class EnergyLedger {
 public:
  struct Entry {
    double tx_mj = 0.0;
    double rx_mj = 0.0;
    double idle_mj = 0.0;
    double ids_mj = 0.0;
    double total() const { return tx_mj + rx_mj + idle_mj + ids_mj; }
  };

  void charge_tx(NodeId n, double mj) { add(entries_[n].tx_mj, mj); }
  void charge_rx(NodeId n, double mj) { add(entries_[n].rx_mj, mj); }
  void charge_idle(NodeId n, double mj) { add(entries_[n].idle_mj, mj); }
  void charge_ids(NodeId n, double mj) { add(entries_[n].ids_mj, mj); }

  const Entry& of(NodeId n) const {
    static const Entry zero;
    auto it = entries_.find(n);
    return it == entries_.end() ? zero : it->second;
  }

  const std::map<NodeId, Entry>& entries() const { return entries_; }

  // Running sum of every individual charge.
  double charged_total() const { return charged_total_; }

  double ledger_total() const {
    double t = 0.0;
    for (const auto& [id, e] : entries_) t += e.total();
    return t;
  }

 private:
  void add(double& bucket, double mj) {
    if (mj < 0.0) throw std::invalid_argument("energy charge must be non-negative");
    bucket += mj;
    charged_total_ += mj;
  }

  std::map<NodeId, Entry> entries_;
  double charged_total_ = 0.0;
};

}  // namespace wsnids
