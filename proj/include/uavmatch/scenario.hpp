// Copyright 2026 The uavmatch Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scenario documents: a strict JSON schema with units in the key names.
// Unknown keys are rejected; validation reports every violated invariant at
// once.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uavmatch/baselines.hpp"
#include "uavmatch/dynamics.hpp"
#include "uavmatch/matching.hpp"
#include "uavmatch/model.hpp"
#include "uavmatch/preferences.hpp"
#include "uavmatch/rng.hpp"

namespace uavmatch {

struct DroneSpec {
  Drone drone;
  std::optional<int> quota;
  std::optional<int> destination_id;
  std::optional<Trajectory> trajectory;
};

// "generate N uniform in area" block.
struct GeneratorSpec {
  Role role = Role::kSource;
  int count = 0;
  int id_start = 0;
  std::optional<Vec3> region_min_m;
  std::optional<Vec3> region_max_m;
  double tx_power_w = 0.1;
  int radio_count = 1;
  std::optional<int> quota;
  int resource_capacity_units = 0;
  double demand_min_bps = 0.0;
  double demand_max_bps = 0.0;
  int priority = 1;
  std::optional<int> destination_id;
};

struct PerturbationSpec {
  int at_iteration = 0;
  std::vector<int> departures;
  int depart_count = 0;
  std::optional<GeneratorSpec> arrivals;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  Vec3 area_m;
  LinkModel link;
  MatchingClass matching_class = MatchingClass::kSubstitutable;
  MarketOptions market;
  std::vector<DroneSpec> drones;
  std::vector<GeneratorSpec> generate;
  std::vector<PerturbationSpec> perturbations;
  int iterations = 45;
  int max_engine_iterations = 1000;
  double horizon_s = kDefaultHorizonS;
  double step_s = kDefaultStepS;
  bool oracle_enabled = false;
  std::uint64_t oracle_cap = kDefaultOracleCap;
};

namespace detail {

using nlohmann::json;

class SchemaReader {
 public:
  std::vector<std::string> errors;

  void object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      errors.push_back(path + ": expected an object");
      return;
    }
    for (const auto& [key, value] : j.items()) {
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
          allowed.end()) {
        errors.push_back(path + "." + key + ": unknown key");
      }
    }
  }

  template <typename T>
  std::optional<T> get(const json& j, const std::string& path, const char* key, bool required) {
    if (!j.is_object() || !j.contains(key)) {
      if (required) errors.push_back(path + "." + key + ": required");
      return std::nullopt;
    }
    const json& v = j.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned()) {
            throw std::invalid_argument("expected a non-negative integer");
          }
        }
      } else {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
      }
      return v.get<T>();
    } catch (const std::exception& e) {
      errors.push_back(path + "." + key + ": " + e.what());
      return std::nullopt;
    }
  }

  std::optional<Vec3> vec3(const json& j, const std::string& path, const char* key, bool required) {
    if (!j.is_object() || !j.contains(key)) {
      if (required) errors.push_back(path + "." + key + ": required");
      return std::nullopt;
    }
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 3 ||
        !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      errors.push_back(path + "." + key + ": expected [x, y, z] in meters");
      return std::nullopt;
    }
    return Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  void check(bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  }
};

inline std::optional<Role> parse_role(const std::string& s) {
  if (s == "source") return Role::kSource;
  if (s == "relay") return Role::kRelay;
  if (s == "destination") return Role::kDestination;
  return std::nullopt;
}

inline GeneratorSpec read_generator(SchemaReader& rd, const json& j, const std::string& path,
                                    bool with_role) {
  if (with_role) {
    rd.object(j, path, {"role", "count", "id_start", "region_min_m", "region_max_m", "tx_power_w",
                        "radio_count", "quota", "resource_capacity_units", "demand_bps",
                        "priority", "destination_id"});
  } else {
    rd.object(j, path, {"count", "id_start", "region_min_m", "region_max_m", "tx_power_w",
                        "demand_bps", "priority", "destination_id"});
  }
  GeneratorSpec g;
  if (with_role) {
    if (auto r = rd.get<std::string>(j, path, "role", true)) {
      if (auto role = parse_role(*r)) {
        g.role = *role;
      } else {
        rd.errors.push_back(path + ".role: expected source, relay or destination");
      }
    }
  }
  g.count = rd.get<int>(j, path, "count", true).value_or(0);
  g.id_start = rd.get<int>(j, path, "id_start", true).value_or(0);
  g.region_min_m = rd.vec3(j, path, "region_min_m", false);
  g.region_max_m = rd.vec3(j, path, "region_max_m", false);
  g.tx_power_w = rd.get<double>(j, path, "tx_power_w", false).value_or(0.1);
  g.radio_count = rd.get<int>(j, path, "radio_count", false).value_or(1);
  g.quota = rd.get<int>(j, path, "quota", false);
  g.resource_capacity_units = rd.get<int>(j, path, "resource_capacity_units", false).value_or(0);
  g.priority = rd.get<int>(j, path, "priority", false).value_or(1);
  g.destination_id = rd.get<int>(j, path, "destination_id", false);
  if (j.is_object() && j.contains("demand_bps")) {
    const json& d = j.at("demand_bps");
    if (d.is_number()) {
      g.demand_min_bps = g.demand_max_bps = d.get<double>();
    } else if (d.is_array() && d.size() == 2 && d[0].is_number() && d[1].is_number()) {
      g.demand_min_bps = d[0].get<double>();
      g.demand_max_bps = d[1].get<double>();
    } else {
      rd.errors.push_back(path + ".demand_bps: expected a number or [min, max]");
    }
  }
  rd.check(g.count >= 0, path + ".count: must be >= 0");
  rd.check(g.tx_power_w > 0.0, path + ".tx_power_w: must be > 0");
  rd.check(g.demand_min_bps <= g.demand_max_bps, path + ".demand_bps: min above max");
  if (g.role == Role::kSource) {
    rd.check(g.demand_min_bps > 0.0, path + ".demand_bps: sources need a demand > 0");
  }
  if (g.role == Role::kRelay) rd.check(g.radio_count >= 1, path + ".radio_count: must be >= 1");
  if (g.quota) {
    rd.check(*g.quota >= 1, path + ".quota: must be >= 1");
    rd.check(*g.quota <= g.radio_count, path + ".quota: must not exceed radio_count");
  }
  rd.check(g.resource_capacity_units >= 0, path + ".resource_capacity_units: must be >= 0");
  return g;
}

inline DroneSpec read_drone(SchemaReader& rd, const json& j, const std::string& path) {
  rd.object(j, path, {"id", "role", "position_m", "tx_power_w", "radio_count", "quota",
                      "resource_capacity_units", "demand_bps", "priority", "destination_id",
                      "trajectory"});
  DroneSpec spec;
  Drone& d = spec.drone;
  d.id = rd.get<int>(j, path, "id", true).value_or(0);
  if (auto r = rd.get<std::string>(j, path, "role", true)) {
    if (auto role = parse_role(*r)) {
      d.role = *role;
    } else {
      rd.errors.push_back(path + ".role: expected source, relay or destination");
    }
  }
  d.position = rd.vec3(j, path, "position_m", true).value_or(Vec3{});
  d.tx_power_w = rd.get<double>(j, path, "tx_power_w", false).value_or(0.1);
  d.radio_count = rd.get<int>(j, path, "radio_count", false).value_or(1);
  spec.quota = rd.get<int>(j, path, "quota", false);
  d.resource_capacity = rd.get<int>(j, path, "resource_capacity_units", false).value_or(0);
  d.demand_bps = rd.get<double>(j, path, "demand_bps", false).value_or(0.0);
  d.priority = rd.get<int>(j, path, "priority", false).value_or(1);
  spec.destination_id = rd.get<int>(j, path, "destination_id", false);
  if (spec.quota) {
    rd.check(*spec.quota >= 1, path + ".quota: must be >= 1");
    rd.check(*spec.quota <= d.radio_count, path + ".quota: must not exceed radio_count");
  }
  if (j.is_object() && j.contains("trajectory")) {
    const json& t = j.at("trajectory");
    if (!t.is_array() || t.empty()) {
      rd.errors.push_back(path + ".trajectory: expected a non-empty array of waypoints");
    } else {
      std::vector<Waypoint> wps;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string wp = path + ".trajectory[" + std::to_string(i) + "]";
        rd.object(t[i], wp, {"t_s", "position_m"});
        Waypoint w;
        w.time_s = rd.get<double>(t[i], wp, "t_s", true).value_or(0.0);
        w.position = rd.vec3(t[i], wp, "position_m", true).value_or(Vec3{});
        wps.push_back(w);
      }
      try {
        spec.trajectory = Trajectory(std::move(wps));
        spec.drone.position = spec.trajectory->at(0.0);
      } catch (const Error& e) {
        rd.errors.push_back(path + ".trajectory: " + e.what());
      }
    }
  }
  if (auto v = drone_violations(d); !v.empty()) rd.errors.push_back(path + ": " + v);
  return spec;
}

inline int line_of_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace detail

// Parses and validates a scenario document held in memory.
inline Scenario parse_scenario(const std::string& text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, "line " + std::to_string(detail::line_of_byte(text, e.byte)) +
                                       ": " + e.what());
  }
  detail::SchemaReader rd;
  const std::string top = "scenario";
  rd.object(root, top, {"name", "seed", "area_m", "link", "matching_class", "resource_unit_bps",
                        "direct_links", "priority_weight", "drones", "generate", "perturbations",
                        "iterations", "max_engine_iterations", "dynamics", "oracle"});
  Scenario sc;
  sc.name = rd.get<std::string>(root, top, "name", true).value_or("");
  sc.seed = rd.get<std::uint64_t>(root, top, "seed", true).value_or(0);
  sc.area_m = rd.vec3(root, top, "area_m", true).value_or(Vec3{});
  rd.check(sc.area_m.x > 0 && sc.area_m.y > 0 && sc.area_m.z >= 0,
           top + ".area_m: extents must be positive (altitude extent >= 0)");
  if (root.is_object() && root.contains("link")) {
    const json& l = root.at("link");
    const std::string p = top + ".link";
    rd.object(l, p, {"carrier_freq_hz", "bandwidth_hz", "noise_power_w", "path_loss_exponent",
                     "half_duplex_factor"});
    sc.link.carrier_freq_hz = rd.get<double>(l, p, "carrier_freq_hz", true).value_or(0.0);
    sc.link.bandwidth_hz = rd.get<double>(l, p, "bandwidth_hz", true).value_or(0.0);
    sc.link.noise_power_w = rd.get<double>(l, p, "noise_power_w", true).value_or(0.0);
    sc.link.path_loss_exponent = rd.get<double>(l, p, "path_loss_exponent", false).value_or(2.0);
    sc.link.half_duplex_factor = rd.get<double>(l, p, "half_duplex_factor", false).value_or(0.5);
    if (auto v = link_violations(sc.link); !v.empty()) rd.errors.push_back(p + ": " + v);
  } else {
    rd.errors.push_back(top + ".link: required");
  }
  if (auto c = rd.get<std::string>(root, top, "matching_class", true)) {
    if (auto cls = parse_matching_class(*c)) {
      sc.matching_class = *cls;
    } else {
      rd.errors.push_back(top + ".matching_class: expected I, II or III");
    }
  }
  sc.market.resource_unit_bps = rd.get<double>(root, top, "resource_unit_bps", false).value_or(0.0);
  rd.check(sc.market.resource_unit_bps >= 0.0, top + ".resource_unit_bps: must be >= 0");
  sc.market.direct_links = rd.get<bool>(root, top, "direct_links", false).value_or(true);
  sc.market.priority_weight = rd.get<double>(root, top, "priority_weight", false).value_or(0.0);
  rd.check(sc.market.priority_weight >= 0.0, top + ".priority_weight: must be >= 0");
  sc.iterations = rd.get<int>(root, top, "iterations", false).value_or(45);
  rd.check(sc.iterations >= 1, top + ".iterations: must be >= 1");
  sc.max_engine_iterations = rd.get<int>(root, top, "max_engine_iterations", false).value_or(1000);
  rd.check(sc.max_engine_iterations >= 1, top + ".max_engine_iterations: must be >= 1");

  auto array_of = [&](const char* key) -> const json* {
    if (!root.is_object() || !root.contains(key)) return nullptr;
    if (!root.at(key).is_array()) {
      rd.errors.push_back(top + "." + key + ": expected an array");
      return nullptr;
    }
    return &root.at(key);
  };
  if (const json* a = array_of("drones")) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      sc.drones.push_back(detail::read_drone(rd, (*a)[i], top + ".drones[" + std::to_string(i) + "]"));
    }
  }
  if (const json* a = array_of("generate")) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      sc.generate.push_back(
          detail::read_generator(rd, (*a)[i], top + ".generate[" + std::to_string(i) + "]", true));
    }
  }
  if (const json* a = array_of("perturbations")) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      const json& e = (*a)[i];
      const std::string p = top + ".perturbations[" + std::to_string(i) + "]";
      rd.object(e, p, {"at_iteration", "departures", "depart_count", "arrivals"});
      PerturbationSpec ev;
      ev.at_iteration = rd.get<int>(e, p, "at_iteration", true).value_or(0);
      rd.check(ev.at_iteration >= 0, p + ".at_iteration: must be >= 0");
      if (e.is_object() && e.contains("departures")) {
        const json& d = e.at("departures");
        if (!d.is_array() ||
            !std::all_of(d.begin(), d.end(), [](const json& x) { return x.is_number_integer(); })) {
          rd.errors.push_back(p + ".departures: expected an array of source ids");
        } else {
          ev.departures = d.get<std::vector<int>>();
        }
      }
      ev.depart_count = rd.get<int>(e, p, "depart_count", false).value_or(0);
      rd.check(ev.depart_count >= 0, p + ".depart_count: must be >= 0");
      if (e.is_object() && e.contains("arrivals")) {
        ev.arrivals = detail::read_generator(rd, e.at("arrivals"), p + ".arrivals", false);
      }
      sc.perturbations.push_back(std::move(ev));
    }
  }
  if (root.is_object() && root.contains("dynamics")) {
    const json& d = root.at("dynamics");
    const std::string p = top + ".dynamics";
    rd.object(d, p, {"horizon_s", "step_s"});
    sc.horizon_s = rd.get<double>(d, p, "horizon_s", false).value_or(kDefaultHorizonS);
    sc.step_s = rd.get<double>(d, p, "step_s", false).value_or(kDefaultStepS);
    rd.check(sc.horizon_s > 0.0, p + ".horizon_s: must be > 0");
    rd.check(sc.step_s > 0.0, p + ".step_s: must be > 0");
  }
  if (root.is_object() && root.contains("oracle")) {
    const json& o = root.at("oracle");
    const std::string p = top + ".oracle";
    rd.object(o, p, {"enabled", "cap"});
    sc.oracle_enabled = rd.get<bool>(o, p, "enabled", false).value_or(false);
    sc.oracle_cap = rd.get<std::uint64_t>(o, p, "cap", false).value_or(kDefaultOracleCap);
  }

  // Cross-field invariants.
  std::set<int> ids;
  std::set<int> destinations;
  auto claim = [&](int id, const std::string& where) {
    if (!ids.insert(id).second) rd.errors.push_back(where + ": duplicate drone id " + std::to_string(id));
  };
  for (std::size_t i = 0; i < sc.drones.size(); ++i) {
    claim(sc.drones[i].drone.id, top + ".drones[" + std::to_string(i) + "]");
    if (sc.drones[i].drone.role == Role::kDestination) destinations.insert(sc.drones[i].drone.id);
  }
  for (std::size_t i = 0; i < sc.generate.size(); ++i) {
    const GeneratorSpec& g = sc.generate[i];
    for (int k = 0; k < g.count; ++k) {
      claim(g.id_start + k, top + ".generate[" + std::to_string(i) + "]");
      if (g.role == Role::kDestination) destinations.insert(g.id_start + k);
    }
  }
  auto check_destination = [&](const std::optional<int>& dest, const std::string& where) {
    if (dest) {
      rd.check(destinations.contains(*dest),
               where + ".destination_id: " + std::to_string(*dest) + " is not a destination");
    } else {
      rd.check(destinations.size() == 1,
               where + ": destination_id required unless exactly one destination exists");
    }
  };
  for (std::size_t i = 0; i < sc.drones.size(); ++i) {
    if (sc.drones[i].drone.role == Role::kSource) {
      check_destination(sc.drones[i].destination_id, top + ".drones[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t i = 0; i < sc.generate.size(); ++i) {
    if (sc.generate[i].role == Role::kSource && sc.generate[i].count > 0) {
      check_destination(sc.generate[i].destination_id, top + ".generate[" + std::to_string(i) + "]");
    }
  }
  // Departures must name live sources at event time; arrivals must be fresh.
  std::set<int> live;
  for (const auto& d : sc.drones) {
    if (d.drone.role == Role::kSource) live.insert(d.drone.id);
  }
  for (const auto& g : sc.generate) {
    if (g.role == Role::kSource) {
      for (int k = 0; k < g.count; ++k) live.insert(g.id_start + k);
    }
  }
  std::vector<std::size_t> order(sc.perturbations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sc.perturbations[a].at_iteration < sc.perturbations[b].at_iteration;
  });
  for (std::size_t i : order) {
    const PerturbationSpec& ev = sc.perturbations[i];
    const std::string p = top + ".perturbations[" + std::to_string(i) + "]";
    rd.check(ev.at_iteration < sc.iterations, p + ".at_iteration: must be below iterations");
    for (int id : ev.departures) {
      if (!live.erase(id)) rd.errors.push_back(p + ".departures: " + std::to_string(id) + " is not a live source");
    }
    if (ev.depart_count > static_cast<int>(live.size())) {
      rd.errors.push_back(p + ".depart_count: more than the live sources");
    } else {
      // Random departures are resolved at run time; only the count matters here.
      for (int k = 0; k < ev.depart_count; ++k) live.erase(live.begin());
    }
    if (ev.arrivals) {
      for (int k = 0; k < ev.arrivals->count; ++k) {
        claim(ev.arrivals->id_start + k, p + ".arrivals");
        live.insert(ev.arrivals->id_start + k);
      }
      check_destination(ev.arrivals->destination_id, p + ".arrivals");
    }
  }

  if (!rd.errors.empty()) {
    std::string msg = "invalid scenario '" + sc.name + "':";
    for (const auto& e : rd.errors) msg += "\n  - " + e;
    throw Error(ErrorKind::kValidation, msg);
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// Drones generated from one block, positions uniform in its region.
inline std::vector<Drone> generate_drones(const GeneratorSpec& g, const Scenario& sc, Rng& rng) {
  const Vec3 lo = g.region_min_m.value_or(Vec3{0.0, 0.0, 0.0});
  const Vec3 hi = g.region_max_m.value_or(sc.area_m);
  std::vector<Drone> out;
  for (int k = 0; k < g.count; ++k) {
    Drone d;
    d.id = g.id_start + k;
    d.role = g.role;
    d.position = {rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
    d.tx_power_w = g.tx_power_w;
    d.radio_count = g.radio_count;
    d.resource_capacity = g.resource_capacity_units;
    d.priority = g.priority;
    if (g.role == Role::kSource) {
      double demand = g.demand_min_bps == g.demand_max_bps
                          ? g.demand_min_bps
                          : rng.uniform(g.demand_min_bps, g.demand_max_bps);
      // Heterogeneous demands are quantized to whole resource units.
      const double unit = sc.market.resource_unit_bps;
      if (unit > 0.0) demand = std::max(1.0, std::ceil(demand / unit - 1e-12)) * unit;
      d.demand_bps = demand;
    }
    out.push_back(d);
  }
  return out;
}

inline std::uint64_t generator_stream(std::size_t index) {
  return Rng::stream_id("generate") + index;
}

// Fully materialized scenario: drone snapshot, destinations and quotas.
struct Deployment {
  std::vector<Drone> drones;
  std::map<int, int> destination_of;
  std::map<int, int> quotas;
  std::map<int, Trajectory> trajectories;
};

inline int only_destination(const std::vector<Drone>& drones) {
  for (const Drone& d : drones) {
    if (d.role == Role::kDestination) return d.id;
  }
  return -1;
}

inline Deployment deploy(const Scenario& sc) {
  Deployment out;
  for (const DroneSpec& spec : sc.drones) out.drones.push_back(spec.drone);
  for (std::size_t i = 0; i < sc.generate.size(); ++i) {
    Rng rng(sc.seed, generator_stream(i));
    for (const Drone& d : generate_drones(sc.generate[i], sc, rng)) out.drones.push_back(d);
  }
  const int fallback = only_destination(out.drones);
  for (const DroneSpec& spec : sc.drones) {
    if (spec.drone.role == Role::kSource) out.destination_of[spec.drone.id] = spec.destination_id.value_or(fallback);
    if (spec.quota) out.quotas[spec.drone.id] = *spec.quota;
    out.trajectories[spec.drone.id] = spec.trajectory.value_or(Trajectory::fixed(spec.drone.position));
  }
  std::size_t next = sc.drones.size();
  for (const GeneratorSpec& g : sc.generate) {
    for (int k = 0; k < g.count; ++k, ++next) {
      const Drone& d = out.drones[next];
      if (g.role == Role::kSource) out.destination_of[d.id] = g.destination_id.value_or(fallback);
      if (g.quota) out.quotas[d.id] = *g.quota;
      out.trajectories[d.id] = Trajectory::fixed(d.position);
    }
  }
  return out;
}

// Class I scenarios with resource accounting run fixed-quota relays.
inline Market build_market(const Scenario& sc, const Deployment& dep) {
  MarketOptions options = sc.market;
  options.fixed_blocks =
      sc.matching_class == MatchingClass::kSubstitutable && options.resource_unit_bps > 0.0;
  return build_market(dep.drones, dep.destination_of, sc.link, options, dep.quotas);
}

// Resolves the scheduled perturbations against the live source set. Random
// departures and arrival positions draw from per-event streams of the seed.
inline std::vector<PerturbationEvent> resolve_events(const Scenario& sc, const Deployment& dep) {
  std::set<int> live;
  for (const Drone& d : dep.drones) {
    if (d.role == Role::kSource) live.insert(d.id);
  }
  const int fallback = only_destination(dep.drones);
  std::vector<std::size_t> order(sc.perturbations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sc.perturbations[a].at_iteration < sc.perturbations[b].at_iteration;
  });
  std::vector<PerturbationEvent> out;
  for (std::size_t i : order) {
    const PerturbationSpec& spec = sc.perturbations[i];
    PerturbationEvent ev;
    ev.at_iteration = spec.at_iteration;
    ev.departures = spec.departures;
    for (int id : spec.departures) live.erase(id);
    if (spec.depart_count > 0) {
      Rng rng(sc.seed, Rng::stream_id("departures") + i);
      std::vector<int> pool(live.begin(), live.end());
      // Partial Fisher-Yates over the id-sorted live set.
      for (int k = 0; k < spec.depart_count; ++k) {
        const std::size_t j = static_cast<std::size_t>(k) +
                              rng.below(pool.size() - static_cast<std::size_t>(k));
        std::swap(pool[static_cast<std::size_t>(k)], pool[j]);
        ev.departures.push_back(pool[static_cast<std::size_t>(k)]);
        live.erase(pool[static_cast<std::size_t>(k)]);
      }
    }
    std::sort(ev.departures.begin(), ev.departures.end());
    if (spec.arrivals) {
      GeneratorSpec g = *spec.arrivals;
      g.role = Role::kSource;
      Rng rng(sc.seed, Rng::stream_id("arrivals") + i);
      for (const Drone& d : generate_drones(g, sc, rng)) {
        ev.arrivals.push_back(d);
        ev.arrival_destination[d.id] = g.destination_id.value_or(fallback);
        live.insert(d.id);
      }
    }
    out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace uavmatch
