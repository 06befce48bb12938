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

// Shared generators for randomized tests.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "uavmatch/uavmatch.hpp"

namespace uavmatch::testing {

// Low-SNR link in which relays beat most direct links.
inline LinkModel weak_link() {
  LinkModel l;
  l.noise_power_w = 1e-10;
  return l;
}

struct RandomMarketSpec {
  int sources = 5;
  int relays = 3;
  int max_quota = 2;
  double min_demand_bps = 1e5;
  double max_demand_bps = 5e5;
  MarketOptions options;
};

inline RandomMarketSpec market_spec(int sources, int relays, int max_quota) {
  RandomMarketSpec spec;
  spec.sources = sources;
  spec.relays = relays;
  spec.max_quota = max_quota;
  return spec;
}

// Sources on the west side, relays in the middle, one destination east.
inline Market random_physical_market(Rng& rng, const RandomMarketSpec& spec,
                                     const LinkModel& link = weak_link()) {
  std::vector<Drone> drones;
  Drone dst;
  dst.id = 0;
  dst.role = Role::kDestination;
  dst.position = {1000.0, 500.0, 50.0};
  drones.push_back(dst);
  std::map<int, int> dest;
  for (int i = 0; i < spec.sources; ++i) {
    Drone s;
    s.id = 1 + i;
    s.role = Role::kSource;
    s.position = {rng.uniform(0.0, 300.0), rng.uniform(0.0, 1000.0), rng.uniform(0.0, 20.0)};
    s.tx_power_w = rng.uniform(0.05, 0.2);
    s.demand_bps = rng.uniform(spec.min_demand_bps, spec.max_demand_bps);
    s.priority = 1 + static_cast<int>(rng.below(3));
    drones.push_back(s);
    dest[s.id] = 0;
  }
  for (int j = 0; j < spec.relays; ++j) {
    Drone r;
    r.id = 100 + j;
    r.role = Role::kRelay;
    r.position = {rng.uniform(350.0, 750.0), rng.uniform(0.0, 1000.0), rng.uniform(40.0, 100.0)};
    r.tx_power_w = rng.uniform(0.05, 0.2);
    r.radio_count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_quota)));
    r.resource_capacity = static_cast<int>(rng.below(12));
    drones.push_back(r);
  }
  return build_market(drones, dest, link, spec.options);
}

// Abstract market: random acceptability and random strict orders on both
// sides, random quotas.
inline Market random_preference_market(Rng& rng, int sources, int relays, int max_quota,
                                       double accept_prob = 0.8) {
  std::vector<PreferenceList> sp, rp;
  std::vector<int> quotas;
  for (int i = 0; i < sources; ++i) {
    std::vector<Candidate> c;
    for (int j = 0; j < relays; ++j) {
      if (rng.uniform() < accept_prob) c.push_back({100 + j, rng.uniform(0.1, 1.0), 1});
    }
    sp.push_back(make_preference_list(1 + i, c, 0.0));
  }
  for (int j = 0; j < relays; ++j) {
    std::vector<Candidate> c;
    for (int i = 0; i < sources; ++i) {
      if (rng.uniform() < accept_prob) c.push_back({1 + i, rng.uniform(0.1, 1.0), 1});
    }
    rp.push_back(make_preference_list(100 + j, c, 0.0));
    quotas.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_quota))));
  }
  return market_from_preferences(sp, rp, quotas);
}

inline Drone make_drone(int id, Role role, Vec3 p, double demand = 0.0, int radios = 1) {
  Drone d;
  d.id = id;
  d.role = role;
  d.position = p;
  d.demand_bps = demand;
  d.radio_count = radios;
  return d;
}

// Every class I matching of a small market (relay-level, radios by rank).
inline std::vector<Matching> all_class1_matchings(const Market& m) {
  std::vector<Matching> out;
  Matching cur = Matching::empty_for(m);
  std::vector<int> load(m.num_relays(), 0);
  std::function<void(std::size_t)> go = [&](std::size_t s) {
    if (s == m.num_sources()) {
      Matching full = Matching::empty_for(m);
      for (std::size_t r = 0; r < m.num_relays(); ++r) {
        std::vector<int> held = cur.held_by(m.relays[r].id);
        const PreferenceList& rp = m.relay_prefs[r];
        std::sort(held.begin(), held.end(),
                  [&](int a, int b) { return rp.rank_of(a) < rp.rank_of(b); });
        for (std::size_t k = 0; k < held.size(); ++k) {
          full.assign(held[k], m.relays[r].id, static_cast<int>(k));
        }
      }
      out.push_back(full);
      return;
    }
    go(s + 1);
    const int sid = m.sources[s].id;
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      const int rid = m.relays[r].id;
      if (!m.source_prefs[s].accepts(rid) || !m.relay_prefs[r].accepts(sid)) continue;
      if (load[r] >= m.quotas[r]) continue;
      ++load[r];
      cur.assign(sid, rid, 0);
      go(s + 1);
      cur.unassign(sid);
      --load[r];
    }
  };
  go(0);
  return out;
}

struct RandomLevels {
  std::map<int, Drone> drones;
  LevelGraph graph;
};

// Layered geometry moving east level by level; edges only where the hop rate
// clears a random floor, so some players have few or no candidates.
inline RandomLevels random_levels(Rng& rng, const LinkModel& link = weak_link()) {
  RandomLevels out;
  const int relay_levels = 1 + static_cast<int>(rng.below(3));
  std::vector<std::vector<int>> levels;
  int next_id = 1;
  const int total = relay_levels + 2;
  for (int k = 0; k < total; ++k) {
    int count = 2 + static_cast<int>(rng.below(3));
    if (k == 0) count = 2 + static_cast<int>(rng.below(5));
    if (k == total - 1) count = 1 + static_cast<int>(rng.below(2));
    std::vector<int> ids;
    for (int i = 0; i < count; ++i) {
      Drone d;
      d.id = next_id++;
      d.role = k == 0 ? Role::kSource : (k == total - 1 ? Role::kDestination : Role::kRelay);
      d.position = {300.0 * k + rng.uniform(-60.0, 60.0), rng.uniform(0.0, 600.0),
                    k == 0 ? 0.0 : rng.uniform(20.0, 80.0)};
      d.tx_power_w = rng.uniform(0.02, 0.2);
      d.radio_count = 1 + static_cast<int>(rng.below(2));
      d.demand_bps = d.role == Role::kSource ? 1e5 : 0.0;
      out.drones[d.id] = d;
      ids.push_back(d.id);
    }
    levels.push_back(ids);
  }
  out.graph = make_level_graph(levels, out.drones, link, rng.uniform(0.0, 4e5));
  return out;
}

// Reference cascade: one class I market per adjacent level pair, scored by
// the bottleneck so far, no lookahead and no feedback.
inline std::vector<Route> per_level_cascade(const LevelGraph& g, const std::map<int, Drone>& drones,
                                            const LinkModel& link) {
  struct Flow {
    std::vector<int> path;
    std::vector<double> hops;
    double bottleneck = std::numeric_limits<double>::infinity();
  };
  std::vector<Flow> flows;
  for (int s : g.levels[0]) flows.push_back(Flow{{s}, {}});
  for (std::size_t k = 0; k + 1 < g.levels.size(); ++k) {
    std::vector<PreferenceList> flow_prefs;
    std::map<int, std::vector<Candidate>> by_relay;
    std::vector<Flow*> active;
    for (Flow& f : flows) {
      if (f.path.size() != k + 1) continue;
      active.push_back(&f);
      std::vector<Candidate> c;
      auto it = g.candidates.find(f.path.back());
      if (it != g.candidates.end()) {
        for (int j : it->second) {
          const double through =
              std::min(f.bottleneck, link_rate(drones.at(f.path.back()), drones.at(j), link));
          c.push_back({j, through, 1});
          by_relay[j].push_back({f.path.front(), through, 1});
        }
      }
      flow_prefs.push_back(make_preference_list(f.path.front(), c, 0.0));
    }
    std::vector<PreferenceList> relay_prefs;
    std::vector<int> quotas;
    for (int j : g.levels[k + 1]) {
      relay_prefs.push_back(make_preference_list(j, by_relay[j], 0.0));
      quotas.push_back(std::max(1, drones.at(j).radio_count));
    }
    const Market m = market_from_preferences(flow_prefs, relay_prefs, quotas);
    const Matching mt = match_class1(m);
    for (Flow* f : active) {
      if (auto a = mt.of(f->path.front())) {
        const double h = link_rate(drones.at(f->path.back()), drones.at(a->relay_id), link);
        f->hops.push_back(h);
        f->bottleneck = std::min(f->bottleneck, h);
        f->path.push_back(a->relay_id);
      }
    }
  }
  std::vector<Route> routes;
  for (const Flow& f : flows) {
    if (f.path.size() != g.levels.size()) continue;
    Route r;
    r.source = f.path.front();
    r.relays.assign(f.path.begin() + 1, f.path.end() - 1);
    r.destination = f.path.back();
    r.hop_bps = f.hops;
    r.rate_bps = link.half_duplex_factor * *std::min_element(f.hops.begin(), f.hops.end());
    routes.push_back(r);
  }
  std::sort(routes.begin(), routes.end(),
            [](const Route& a, const Route& b) { return a.source < b.source; });
  return routes;
}

}  // namespace uavmatch::testing
