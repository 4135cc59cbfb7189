#pragma once

#include <stdexcept>

#include "wsnids/types.hpp"

namespace wsnids {

// Log-distance path-loss channel. Received power falls off as
// 10 * n * log10(d / d0) past the reference distance and is floored at the
// noise level.
struct RadioModel {
  double tx_power_dbm = 0.0;
  double ref_loss_db = 40.0;    // loss at the reference distance
  double ref_distance_m = 1.0;  // d0
  double path_loss_exp = 2.5;   // n, >= 1
  double noise_floor_dbm = -100.0;

  void validate() const {
    if (path_loss_exp < 1.0) throw std::invalid_argument("path_loss_exp must be >= 1");
    if (ref_distance_m <= 0.0) throw std::invalid_argument("ref_distance_m must be > 0");
  }
};

// Received signal strength at the given distance in meters. Throws on
// distance <= 0.
double rssi_at(const RadioModel& model, double distance_m);

}  // namespace wsnids
