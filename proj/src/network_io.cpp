#include "secest/network_io.hpp"

#include <fstream>

#include "secest/errors.hpp"

namespace secest {

using nlohmann::json;

namespace {

double number(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw NetworkParseError(std::string("missing numeric field '") + key + "'");
  }
  return obj.at(key).get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    throw NetworkParseError(std::string("field '") + key + "' must be numeric");
  }
  return obj.at(key).get<double>();
}

int bus_index(const json& obj, const char* key, int bus_count) {
  const double raw = number(obj, key);
  const int bus = static_cast<int>(raw);
  if (bus != raw || bus < 1 || bus > bus_count) {
    throw NetworkParseError(std::string("field '") + key + "' is not a bus in 1.." +
                            std::to_string(bus_count));
  }
  return bus - 1;
}

}  // namespace

GridCase parse_grid_case(const json& doc) {
  if (!doc.is_object()) throw NetworkParseError("network description must be a JSON object");
  if (doc.value("placeholder", false)) {
    throw ConfigError("network file '" + doc.value("name", std::string("?")) +
                      "' is an unfilled parameter slot; supply machine and line data first");
  }
  GridCase out;
  out.name = doc.value("name", std::string("network"));
  out.params.nominal_speed = hz_to_rad_per_s(number(doc, "nominal_frequency_hz"));

  const double bus_count = number(doc, "bus_count");
  out.network.bus_count = static_cast<int>(bus_count);
  if (out.network.bus_count != bus_count || out.network.bus_count < 1) {
    throw NetworkParseError("bus_count must be a positive integer");
  }

  if (!doc.contains("generators") || !doc.at("generators").is_array()) {
    throw NetworkParseError("missing 'generators' array");
  }
  const json& gens = doc.at("generators");
  const auto n = static_cast<Eigen::Index>(gens.size());
  out.network.generator_count = static_cast<int>(n);
  out.initial.theta.resize(n);
  out.initial.omega = Vector::Constant(n, out.params.nominal_speed);
  out.mechanical_power_given = n > 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& g = gens.at(static_cast<size_t>(i));
    GeneratorParams p;
    p.inertia = number(g, "inertia");
    p.damping = number_or(g, "damping", 0.0);
    p.storage_gain = number_or(g, "storage_gain", 0.0);
    if (g.contains("mechanical_power")) {
      p.mechanical_power = number(g, "mechanical_power");
    } else {
      out.mechanical_power_given = false;
    }
    out.params.generators.push_back(p);
    out.network.internal_voltage.push_back(number(g, "voltage"));
    out.initial.theta(i) = deg_to_rad(number_or(g, "initial_angle_deg", 0.0));
  }

  if (!doc.contains("lines") || !doc.at("lines").is_array()) {
    throw NetworkParseError("missing 'lines' array");
  }
  for (const json& l : doc.at("lines")) {
    Line line;
    line.from = bus_index(l, "from", out.network.bus_count);
    line.to = bus_index(l, "to", out.network.bus_count);
    line.g = number_or(l, "g", 0.0);
    line.b = number(l, "b");
    out.network.lines.push_back(line);
  }
  if (doc.contains("shunts")) {
    for (const json& s : doc.at("shunts")) {
      out.network.shunts.push_back(
          Shunt{bus_index(s, "bus", out.network.bus_count), number_or(s, "g", 0.0),
                number_or(s, "b", 0.0)});
    }
  }
  out.network.validate();
  out.params.validate();
  return out;
}

GridCase load_grid_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open network file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw NetworkParseError(path + ": " + e.what());
  }
  GridCase grid = parse_grid_case(doc);
  if (!grid.mechanical_power_given) {
    balance_mechanical_power(grid.params, kron_reduce(grid.network), grid.initial.theta);
  }
  return grid;
}

json grid_case_to_json(const GridCase& grid) {
  json doc;
  doc["name"] = grid.name;
  doc["nominal_frequency_hz"] = rad_per_s_to_hz(grid.params.nominal_speed);
  doc["bus_count"] = grid.network.bus_count;
  json gens = json::array();
  for (int i = 0; i < grid.network.generator_count; ++i) {
    const GeneratorParams& p = grid.params.generators[static_cast<size_t>(i)];
    gens.push_back({{"inertia", p.inertia},
                    {"damping", p.damping},
                    {"storage_gain", p.storage_gain},
                    {"mechanical_power", p.mechanical_power},
                    {"voltage", grid.network.internal_voltage[static_cast<size_t>(i)]},
                    {"initial_angle_deg", rad_to_deg(grid.initial.theta(i))}});
  }
  doc["generators"] = gens;
  json lines = json::array();
  for (const Line& l : grid.network.lines) {
    lines.push_back({{"from", l.from + 1}, {"to", l.to + 1}, {"g", l.g}, {"b", l.b}});
  }
  doc["lines"] = lines;
  if (!grid.network.shunts.empty()) {
    json shunts = json::array();
    for (const Shunt& s : grid.network.shunts) {
      shunts.push_back({{"bus", s.bus + 1}, {"g", s.g}, {"b", s.b}});
    }
    doc["shunts"] = shunts;
  }
  return doc;
}

}  // namespace secest
