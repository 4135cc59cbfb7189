#include "wsnids/radio.hpp"

#include <algorithm>
#include <cmath>

namespace wsnids {

double rssi_at(const RadioModel& model, double distance_m) {
  model.validate();
  if (distance_m <= 0.0) throw std::invalid_argument("rssi_at: distance must be > 0");
  const double loss = model.ref_loss_db +
                      10.0 * model.path_loss_exp * std::log10(distance_m / model.ref_distance_m);
  return std::max(model.tx_power_dbm - loss, model.noise_floor_dbm);
}

}  // namespace wsnids
