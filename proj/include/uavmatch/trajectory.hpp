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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uavmatch/error.hpp"
#include "uavmatch/model.hpp"

namespace uavmatch {

struct Waypoint {
  double time_s = 0.0;
  Vec3 position;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

// Piecewise-linear path; constant before the first and after the last
// waypoint.
class Trajectory {
 public:
  Trajectory() = default;

  explicit Trajectory(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
    if (waypoints_.empty()) throw Error(ErrorKind::kValidation, "trajectory needs a waypoint");
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
      if (!(waypoints_[i].time_s > waypoints_[i - 1].time_s)) {
        throw Error(ErrorKind::kValidation, "trajectory times must be strictly increasing");
      }
    }
  }

  static Trajectory fixed(Vec3 position) { return Trajectory({Waypoint{0.0, position}}); }

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }

  bool is_static() const {
    return std::all_of(waypoints_.begin(), waypoints_.end(),
                       [&](const Waypoint& w) { return w.position == waypoints_.front().position; });
  }

  Vec3 at(double t) const {
    if (waypoints_.empty()) throw Error(ErrorKind::kValidation, "empty trajectory");
    if (t <= waypoints_.front().time_s) return waypoints_.front().position;
    if (t >= waypoints_.back().time_s) return waypoints_.back().position;
    auto hi = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                               [](double v, const Waypoint& w) { return v < w.time_s; });
    auto lo = hi - 1;
    const double u = (t - lo->time_s) / (hi->time_s - lo->time_s);
    return lo->position + u * (hi->position - lo->position);
  }

 private:
  std::vector<Waypoint> waypoints_;
};

// Sample times 0, step, ..., up to and including horizon.
inline std::vector<double> sample_times(double horizon_s, double step_s) {
  if (!(horizon_s > 0.0) || !(step_s > 0.0)) {
    throw Error(ErrorKind::kConfiguration, "horizon and step must be > 0");
  }
  std::vector<double> out;
  const long n = static_cast<long>(std::floor(horizon_s / step_s + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(static_cast<double>(k) * step_s);
  return out;
}

}  // namespace uavmatch
