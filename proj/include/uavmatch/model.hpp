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

// Physical layer: drones, the free-space link budget, Shannon rates and the
// per-source satisfaction metric that every matching engine optimizes.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "uavmatch/error.hpp"

namespace uavmatch {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
};

inline double distance(Vec3 a, Vec3 b) {
  const Vec3 d = a - b;
  return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

enum class Role { kSource, kRelay, kDestination };

constexpr std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSource: return "source";
    case Role::kRelay: return "relay";
    case Role::kDestination: return "destination";
  }
  return "unknown";
}

struct Drone {
  int id = 0;
  Role role = Role::kSource;
  Vec3 position;               // meters
  double tx_power_w = 0.1;     // watts
  int radio_count = 1;         // relays
  int resource_capacity = 0;   // resource units, partially substitutable relays
  double demand_bps = 0.0;     // sources
  int priority = 1;            // 1 is the most urgent

  friend bool operator==(const Drone&, const Drone&) = default;
};

// Returns an empty string when the drone is well formed, otherwise a
// human-readable list of violations separated by "; ".
inline std::string drone_violations(const Drone& d) {
  std::ostringstream out;
  auto add = [&out](const std::string& msg) {
    if (out.tellp() > 0) out << "; ";
    out << msg;
  };
  const std::string tag = "drone " + std::to_string(d.id) + ": ";
  if (!std::isfinite(d.position.x) || !std::isfinite(d.position.y) ||
      !std::isfinite(d.position.z)) {
    add(tag + "position must be finite");
  } else if (d.position.z < 0.0) {
    add(tag + "altitude must be >= 0");
  }
  if (!(d.tx_power_w > 0.0) || !std::isfinite(d.tx_power_w)) add(tag + "tx_power_w must be > 0");
  if (d.role == Role::kRelay && d.radio_count < 1) add(tag + "radio_count must be >= 1");
  if (d.resource_capacity < 0) add(tag + "resource_capacity must be >= 0");
  if (d.role == Role::kSource && !(d.demand_bps > 0.0)) add(tag + "demand_bps must be > 0");
  if (d.priority < 1) add(tag + "priority must be >= 1");
  return out.str();
}

struct LinkModel {
  double carrier_freq_hz = 2.4e9;
  double bandwidth_hz = 1.0e6;  // per radio
  double noise_power_w = 1.0e-12;
  double path_loss_exponent = 2.0;
  double half_duplex_factor = 0.5;
};

inline std::string link_violations(const LinkModel& l) {
  std::string out;
  auto check = [&out](bool ok, const char* msg) {
    if (ok) return;
    if (!out.empty()) out += "; ";
    out += msg;
  };
  check(l.carrier_freq_hz > 0.0, "carrier_freq_hz must be > 0");
  check(l.bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  check(l.noise_power_w > 0.0, "noise_power_w must be > 0");
  check(l.path_loss_exponent > 0.0, "path_loss_exponent must be > 0");
  check(l.half_duplex_factor > 0.0 && l.half_duplex_factor <= 1.0,
        "half_duplex_factor must be in (0, 1]");
  return out;
}

// Log-distance path loss in dB anchored to the free-space constant
// 20 log10(f) - 147.55; alpha = 2 is exactly free space.
inline double path_loss_db(double distance_m, const LinkModel& link) {
  if (!(distance_m > 0.0)) {
    throw Error(ErrorKind::kDegenerateGeometry,
                "path loss needs a positive distance, got " + std::to_string(distance_m));
  }
  return 10.0 * link.path_loss_exponent * std::log10(distance_m) +
         20.0 * std::log10(link.carrier_freq_hz) - 147.55;
}

inline double snr_at(double tx_power_w, double distance_m, const LinkModel& link) {
  return tx_power_w * std::pow(10.0, -path_loss_db(distance_m, link) / 10.0) / link.noise_power_w;
}

inline double shannon_rate(double snr, const LinkModel& link) {
  return link.bandwidth_hz * std::log2(1.0 + snr);
}

// Single-hop Shannon rate from tx to rx, bits/s.
inline double link_rate(const Drone& tx, const Drone& rx, const LinkModel& link) {
  if (tx.id == rx.id) {
    throw Error(ErrorKind::kDegenerateGeometry,
                "link from drone " + std::to_string(tx.id) + " to itself");
  }
  const double d = distance(tx.position, rx.position);
  if (!(d > 0.0)) {
    throw Error(ErrorKind::kDegenerateGeometry, "drones " + std::to_string(tx.id) + " and " +
                                                    std::to_string(rx.id) + " are coincident");
  }
  return shannon_rate(snr_at(tx.tx_power_w, d, link), link);
}

// Two-hop half-duplex rate from hop rates, with the relay's time split
// equally among `sharers` sources.
inline double two_hop_rate(double first_hop_bps, double second_hop_bps, int sharers,
                           const LinkModel& link) {
  if (sharers < 1) {
    throw Error(ErrorKind::kConfiguration, "sharers must be >= 1");
  }
  return link.half_duplex_factor * std::min(first_hop_bps, second_hop_bps) / sharers;
}

inline double relay_rate(const Drone& src, const Drone& relay, const Drone& dst, int sharers,
                         const LinkModel& link) {
  return two_hop_rate(link_rate(src, relay, link), link_rate(relay, dst, link), sharers, link);
}

// Fraction of a source's demand that is met, capped at one.
class Satisfaction {
 public:
  constexpr Satisfaction() = default;
  explicit Satisfaction(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw Error(ErrorKind::kValidation,
                  "satisfaction out of [0,1]: " + std::to_string(value));
    }
  }
  constexpr double value() const { return value_; }
  friend constexpr auto operator<=>(const Satisfaction&, const Satisfaction&) = default;

 private:
  double value_ = 0.0;
};

inline Satisfaction satisfaction(double achieved_bps, double demanded_bps) {
  if (!(demanded_bps > 0.0)) {
    throw Error(ErrorKind::kInvalidDemand,
                "demand must be > 0, got " + std::to_string(demanded_bps));
  }
  if (!(achieved_bps >= 0.0)) {
    throw Error(ErrorKind::kInvalidDemand,
                "achieved rate must be >= 0, got " + std::to_string(achieved_bps));
  }
  return Satisfaction(std::min(1.0, achieved_bps / demanded_bps));
}

}  // namespace uavmatch
