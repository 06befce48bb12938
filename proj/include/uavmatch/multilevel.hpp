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

// Multi-hop route formation as a cascade of class I markets, one per pair of
// adjacent levels. Each flow (keyed by its source id) proposes from its
// current head drone to the next level. A candidate's score is the flow's
// bottleneck rate so far times a lookahead factor: the best hop rate the
// candidate could reach at the level after. Flows that stall at an
// intermediate level mark their stalled relay unacceptable and retry on the
// next sweep; completed routes are frozen and never displaced.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uavmatch/deferred_acceptance.hpp"
#include "uavmatch/model.hpp"
#include "uavmatch/preferences.hpp"

namespace uavmatch {

struct LevelGraph {
  // levels[0] holds sources, levels.back() destinations.
  std::vector<std::vector<int>> levels;
  // Candidate next-level players per player id.
  std::map<int, std::vector<int>> candidates;
};

inline std::string level_graph_violations(const LevelGraph& g) {
  std::string out;
  auto add = [&out](const std::string& msg) {
    if (!out.empty()) out += "; ";
    out += msg;
  };
  std::map<int, std::size_t> level_of;
  for (std::size_t k = 0; k < g.levels.size(); ++k) {
    for (int id : g.levels[k]) {
      if (!level_of.emplace(id, k).second) add("drone " + std::to_string(id) + " on two levels");
    }
  }
  for (const auto& [from, tos] : g.candidates) {
    auto it = level_of.find(from);
    if (it == level_of.end()) {
      add("edge from unknown drone " + std::to_string(from));
      continue;
    }
    for (int to : tos) {
      auto jt = level_of.find(to);
      if (jt == level_of.end() || jt->second != it->second + 1) {
        add("edge " + std::to_string(from) + "->" + std::to_string(to) + " skips a level");
      }
    }
  }
  return out;
}

// Candidate edges between adjacent levels whose single-hop rate reaches
// `min_hop_bps` (a power-limited range).
inline LevelGraph make_level_graph(std::vector<std::vector<int>> levels,
                                   const std::map<int, Drone>& drones, const LinkModel& link,
                                   double min_hop_bps) {
  LevelGraph g;
  g.levels = std::move(levels);
  for (std::size_t k = 0; k + 1 < g.levels.size(); ++k) {
    for (int from : g.levels[k]) {
      auto& out = g.candidates[from];
      for (int to : g.levels[k + 1]) {
        if (link_rate(drones.at(from), drones.at(to), link) >= min_hop_bps) out.push_back(to);
      }
    }
  }
  return g;
}

struct Route {
  int source = 0;
  std::vector<int> relays;  // one per intermediate level
  int destination = 0;
  double rate_bps = 0.0;
  std::vector<double> hop_bps;

  friend bool operator==(const Route&, const Route&) = default;
};

struct MultilevelOptions {
  int max_sweeps = 0;  // 0: four sweeps per level
  bool lookahead = true;
  std::map<int, int> quotas;  // per drone id; default radio_count
};

struct MultilevelResult {
  std::vector<Route> routes;           // completed routes, ascending source id
  std::map<int, int> reached_level;    // deepest level reached by each routeless source
  bool converged = false;
  int sweeps = 0;
};

class MultilevelMatcher {
 public:
  MultilevelMatcher(const LevelGraph& graph, const std::map<int, Drone>& drones,
                    const LinkModel& link, MultilevelOptions options)
      : graph_(graph), drones_(drones), link_(link), options_(std::move(options)) {
    if (graph_.levels.size() < 2) {
      throw Error(ErrorKind::kConfiguration, "multi-level matching needs at least two levels");
    }
    if (auto v = level_graph_violations(graph_); !v.empty()) {
      throw Error(ErrorKind::kValidation, v);
    }
    for (const auto& level : graph_.levels) {
      for (int id : level) {
        if (!drones_.contains(id)) {
          throw Error(ErrorKind::kValidation, "level graph references unknown drone " + std::to_string(id));
        }
      }
    }
  }

  double hop(int from, int to) const {
    auto key = std::make_pair(from, to);
    auto it = hop_cache_.find(key);
    if (it != hop_cache_.end()) return it->second;
    const double r = link_rate(drones_.at(from), drones_.at(to), link_);
    hop_cache_.emplace(key, r);
    return r;
  }

  int quota(int id) const {
    auto it = options_.quotas.find(id);
    return it != options_.quotas.end() ? it->second : std::max(1, drones_.at(id).radio_count);
  }

  const std::vector<int>& next_of(int id) const {
    static const std::vector<int> kNone;
    auto it = graph_.candidates.find(id);
    return it == graph_.candidates.end() ? kNone : it->second;
  }

  // Best-case next-level hop rate from `id`; 1 when lookahead is off or
  // `id` is on the last two levels.
  double lookahead(int id, std::size_t level) const {
    if (!options_.lookahead || level + 1 >= graph_.levels.size()) return 1.0;
    double best = 0.0;
    for (int next : next_of(id)) best = std::max(best, hop(id, next));
    return best;
  }

  MultilevelResult run() {
    const std::size_t levels = graph_.levels.size();
    const int max_sweeps =
        options_.max_sweeps > 0 ? options_.max_sweeps : static_cast<int>(levels) * 4;
    MultilevelResult result;
    std::map<int, int> used;                       // quota consumed by frozen routes
    std::set<std::pair<int, int>> banned;          // (flow source, relay)
    std::set<int> done;                            // sources with a frozen route
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
      result.sweeps = sweep;
      std::vector<Flow> flows;
      for (int sid : graph_.levels[0]) {
        if (!done.contains(sid)) flows.push_back(Flow{sid, {sid}, {}, std::numeric_limits<double>::infinity()});
      }
      for (std::size_t k = 0; k + 1 < levels; ++k) forward(flows, k, used, banned);
      bool new_bans = false;
      for (const Flow& f : flows) {
        const std::size_t reached = f.path.size() - 1;
        if (reached + 1 == levels) {
          Route route;
          route.source = f.path.front();
          route.relays.assign(f.path.begin() + 1, f.path.end() - 1);
          route.destination = f.path.back();
          route.hop_bps = f.hops;
          route.rate_bps = link_.half_duplex_factor * *std::min_element(f.hops.begin(), f.hops.end());
          for (std::size_t i = 1; i < f.path.size(); ++i) ++used[f.path[i]];
          done.insert(route.source);
          result.routes.push_back(std::move(route));
          result.reached_level.erase(f.path.front());
          continue;
        }
        int& deepest = result.reached_level[f.path.front()];
        deepest = std::max(deepest, static_cast<int>(reached));
        if (reached >= 1 && banned.emplace(f.path.front(), f.path.back()).second) new_bans = true;
      }
      if (!new_bans) {
        result.converged = true;
        break;
      }
    }
    std::sort(result.routes.begin(), result.routes.end(),
              [](const Route& a, const Route& b) { return a.source < b.source; });
    return result;
  }

 private:
  struct Flow {
    int id;
    std::vector<int> path;
    std::vector<double> hops;
    double bottleneck;
  };

  // Runs the level-k market for the flows whose head sits on level k.
  void forward(std::vector<Flow>& flows, std::size_t k, const std::map<int, int>& used,
               const std::set<std::pair<int, int>>& banned) const {
    std::vector<Flow*> active;
    for (Flow& f : flows) {
      if (f.path.size() == k + 1) active.push_back(&f);
    }
    if (active.empty()) return;
    std::vector<int> acceptors;
    std::vector<int> residual;
    for (int id : graph_.levels[k + 1]) {
      auto it = used.find(id);
      const int left = quota(id) - (it == used.end() ? 0 : it->second);
      if (left > 0) {
        acceptors.push_back(id);
        residual.push_back(left);
      }
    }
    if (acceptors.empty()) return;
    std::vector<PreferenceList> flow_prefs;
    std::map<int, std::vector<Candidate>> applicants;
    for (Flow* f : active) {
      std::vector<Candidate> cands;
      for (int j : next_of(f->path.back())) {
        if (std::find(acceptors.begin(), acceptors.end(), j) == acceptors.end()) continue;
        if (banned.contains({f->id, j})) continue;
        const double through = std::min(f->bottleneck, hop(f->path.back(), j));
        cands.push_back({j, through * lookahead(j, k + 1), 1});
        applicants[j].push_back({f->id, through, 1});
      }
      flow_prefs.push_back(make_preference_list(f->id, std::move(cands), 0.0));
    }
    std::vector<PreferenceList> relay_prefs;
    for (int j : acceptors) relay_prefs.push_back(make_preference_list(j, applicants[j], 0.0));
    const Market market = market_from_preferences(std::move(flow_prefs), std::move(relay_prefs), residual);
    const Matching m = match_class1(market);
    for (Flow* f : active) {
      const auto a = m.of(f->id);
      if (!a) continue;
      const double h = hop(f->path.back(), a->relay_id);
      f->bottleneck = std::min(f->bottleneck, h);
      f->hops.push_back(h);
      f->path.push_back(a->relay_id);
    }
  }

  const LevelGraph& graph_;
  const std::map<int, Drone>& drones_;
  LinkModel link_;
  MultilevelOptions options_;
  mutable std::map<std::pair<int, int>, double> hop_cache_;
};

inline MultilevelResult multilevel_match(const LevelGraph& graph, const std::map<int, Drone>& drones,
                                         const LinkModel& link, MultilevelOptions options = {}) {
  MultilevelMatcher matcher(graph, drones, link, std::move(options));
  return matcher.run();
}

}  // namespace uavmatch
