#pragma once

// 60 GHz line-of-sight channel model: log-distance path loss plus a linear
// rain/atmospheric slope and a fixed channel attenuation factor.

#include <algorithm>
#include <cmath>

#include "rsuplan/errors.hpp"

namespace rsuplan {

struct RadioParams {
  double tx_power_dbm = 10.0;
  double tx_gain_dbi = 15.0;
  double path_loss_exponent = 2.66;
  double channel_att_factor_db = 70.0;
  double att_per_km_db = 40.0;  // rain + atmospheric attenuation slope
};

inline void validate(const RadioParams& p) {
  if (!(p.path_loss_exponent > 0.0)) {
    throw ValidationError("radio: path_loss_exponent must be > 0");
  }
  if (p.att_per_km_db < 0.0) throw ValidationError("radio: att_per_km_db must be >= 0");
}

// Path loss in dB at d meters. The log term clamps d to 1 m so a transmitter
// sitting on top of a tile centre does not hit the singularity; the linear
// atmospheric term keeps the true distance.
inline double path_loss_db(const RadioParams& p, double d_m) {
  if (d_m < 0.0) throw ValidationError("radio: negative distance");
  const double d_log = std::max(d_m, 1.0);
  return 10.0 * p.path_loss_exponent * std::log10(d_log) + p.att_per_km_db * (d_m / 1000.0) +
         p.channel_att_factor_db;
}

// Received signal strength in dBm; no RX antenna gain is applied.
inline double rss_dbm(const RadioParams& p, double d_m) {
  return p.tx_power_dbm + p.tx_gain_dbi - path_loss_db(p, d_m);
}

}  // namespace rsuplan
