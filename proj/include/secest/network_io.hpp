#pragma once

#include <string>

#include "json.hpp"
#include "secest/grid_model.hpp"

namespace secest {

/// Everything a network description file provides.
struct GridCase {
  std::string name;
  BusNetwork network;
  PlantParams params;
  GridState initial;
  /// False when the file leaves P^m out; load_grid_case then balances it
  /// against the initial angles.
  bool mechanical_power_given = false;
};

// Network description schema (JSON, 1-based bus numbers, angles in degrees):
//
// {
//   "name": "ring3",
//   "nominal_frequency_hz": 60,
//   "bus_count": 6,
//   "generators": [            // generator k sits on bus k
//     {"inertia": 5.0, "damping": 1.0, "storage_gain": 4.0,
//      "voltage": 1.02, "initial_angle_deg": 6.85,
//      "mechanical_power": 0.3}  // optional
//   ],
//   "lines":  [{"from": 1, "to": 4, "g": 0.01, "b": 8.0}],
//   "shunts": [{"bus": 4, "g": 0.0, "b": 0.1}]              // optional
// }
//
// A file carrying "placeholder": true is a parameter slot that has not been
// filled in yet and is rejected with ConfigError.

GridCase parse_grid_case(const nlohmann::json& doc);
GridCase load_grid_case(const std::string& path);
nlohmann::json grid_case_to_json(const GridCase& grid);

constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
inline double hz_to_rad_per_s(double hz) { return 2.0 * kPi * hz; }
inline double rad_per_s_to_hz(double w) { return w / (2.0 * kPi); }

}  // namespace secest
