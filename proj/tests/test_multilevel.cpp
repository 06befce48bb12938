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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace uavmatch {
namespace {

using testing::make_drone;

std::map<int, Drone> by_id(const std::vector<Drone>& drones) {
  std::map<int, Drone> out;
  for (const Drone& d : drones) out[d.id] = d;
  return out;
}

TEST(Multilevel, ChainHasTheUniqueRoute) {
  const LinkModel l = testing::weak_link();
  const auto drones = by_id({make_drone(1, Role::kSource, {0, 0, 0}, 1e5),
                             make_drone(2, Role::kRelay, {300, 0, 50}),
                             make_drone(3, Role::kRelay, {600, 0, 50}),
                             make_drone(4, Role::kDestination, {900, 0, 10})});
  const LevelGraph g = make_level_graph({{1}, {2}, {3}, {4}}, drones, l, 0.0);
  const MultilevelResult r = multilevel_match(g, drones, l);
  ASSERT_EQ(r.routes.size(), 1u);
  const Route& route = r.routes[0];
  EXPECT_EQ(route.relays, (std::vector<int>{2, 3}));
  EXPECT_EQ(route.destination, 4);
  const double h1 = link_rate(drones.at(1), drones.at(2), l);
  const double h2 = link_rate(drones.at(2), drones.at(3), l);
  const double h3 = link_rate(drones.at(3), drones.at(4), l);
  EXPECT_EQ(route.hop_bps, (std::vector<double>{h1, h2, h3}));
  EXPECT_DOUBLE_EQ(route.rate_bps, 0.5 * std::min({h1, h2, h3}));
  EXPECT_TRUE(r.converged);
}

TEST(Multilevel, TwoSourcesOneBottleneckRelay) {
  const LinkModel l = testing::weak_link();
  const auto drones = by_id({make_drone(1, Role::kSource, {0, 0, 0}, 1e5),
                             make_drone(2, Role::kSource, {0, 200, 0}, 1e5),
                             make_drone(3, Role::kRelay, {300, 0, 50}),
                             make_drone(4, Role::kRelay, {300, 200, 50}),
                             make_drone(5, Role::kRelay, {600, 100, 50}),
                             make_drone(6, Role::kDestination, {900, 100, 10}, 0.0, 2)});
  const LevelGraph g = make_level_graph({{1, 2}, {3, 4}, {5}, {6}}, drones, l, 0.0);
  const MultilevelResult r = multilevel_match(g, drones, l);
  ASSERT_EQ(r.routes.size(), 1u);
  EXPECT_EQ(r.routes[0].relays.size(), 2u);
  EXPECT_EQ(r.routes[0].relays[1], 5);
  const int loser = r.routes[0].source == 1 ? 2 : 1;
  ASSERT_TRUE(r.reached_level.contains(loser));
  EXPECT_EQ(r.reached_level.at(loser), 1);
  EXPECT_TRUE(r.converged);
}

TEST(Multilevel, LookaheadAvoidsADeadEndRelay) {
  const LinkModel l = testing::weak_link();
  Drone weak = make_drone(10, Role::kRelay, {400, 0, 50});
  weak.tx_power_w = 0.001;  // strong uplink, feeble onward hop
  const auto drones = by_id({make_drone(1, Role::kSource, {0, 0, 0}, 1e5), weak,
                             make_drone(11, Role::kRelay, {450, 0, 50}),
                             make_drone(20, Role::kDestination, {1000, 0, 10})});
  const LevelGraph g = make_level_graph({{1}, {10, 11}, {20}}, drones, l, 0.0);
  MultilevelOptions greedy;
  greedy.lookahead = false;
  const MultilevelResult plain = multilevel_match(g, drones, l, greedy);
  const MultilevelResult ahead = multilevel_match(g, drones, l);
  ASSERT_EQ(plain.routes.size(), 1u);
  ASSERT_EQ(ahead.routes.size(), 1u);
  // Exhaustive over the two possible routes.
  double best = 0.0;
  int best_relay = -1;
  for (int relay : {10, 11}) {
    const double rate = 0.5 * std::min(link_rate(drones.at(1), drones.at(relay), l),
                                       link_rate(drones.at(relay), drones.at(20), l));
    if (rate > best) {
      best = rate;
      best_relay = relay;
    }
  }
  EXPECT_EQ(plain.routes[0].relays[0], 10);
  EXPECT_EQ(ahead.routes[0].relays[0], best_relay);
  EXPECT_DOUBLE_EQ(ahead.routes[0].rate_bps, best);
  EXPECT_GT(ahead.routes[0].rate_bps, plain.routes[0].rate_bps);
}

TEST(Multilevel, ReducesToPerLevelDeferredAcceptance) {
  Rng rng(400);
  const LinkModel l = testing::weak_link();
  for (int t = 0; t < 300; ++t) {
    const testing::RandomLevels inst = testing::random_levels(rng);
    MultilevelOptions o;
    o.lookahead = false;
    o.max_sweeps = 1;
    const MultilevelResult r = multilevel_match(inst.graph, inst.drones, l, o);
    EXPECT_EQ(r.routes, testing::per_level_cascade(inst.graph, inst.drones, l));
  }
}

TEST(Multilevel, RoutesRespectBottleneckAndQuota) {
  Rng rng(401);
  const LinkModel l = testing::weak_link();
  for (int t = 0; t < 300; ++t) {
    const testing::RandomLevels inst = testing::random_levels(rng);
    const MultilevelResult r = multilevel_match(inst.graph, inst.drones, l);
    std::map<int, int> load;
    for (const Route& route : r.routes) {
      std::vector<int> path{route.source};
      path.insert(path.end(), route.relays.begin(), route.relays.end());
      path.push_back(route.destination);
      ASSERT_EQ(route.hop_bps.size(), path.size() - 1);
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const auto& next = inst.graph.candidates.at(path[i]);
        EXPECT_NE(std::find(next.begin(), next.end(), path[i + 1]), next.end());
        EXPECT_EQ(route.hop_bps[i], link_rate(inst.drones.at(path[i]), inst.drones.at(path[i + 1]), l));
        EXPECT_LE(route.rate_bps, route.hop_bps[i]);
        ++load[path[i + 1]];
      }
    }
    for (const auto& [id, n] : load) EXPECT_LE(n, std::max(1, inst.drones.at(id).radio_count));
    EXPECT_LE(r.sweeps, 4 * static_cast<int>(inst.graph.levels.size()));
  }
}

TEST(Multilevel, RejectsMalformedGraphs) {
  const LinkModel l = testing::weak_link();
  const auto drones = by_id({make_drone(1, Role::kSource, {0, 0, 0}, 1e5),
                             make_drone(2, Role::kRelay, {300, 0, 50}),
                             make_drone(3, Role::kDestination, {600, 0, 10})});
  LevelGraph skip;
  skip.levels = {{1}, {2}, {3}};
  skip.candidates[1] = {3};
  EXPECT_FALSE(level_graph_violations(skip).empty());
  EXPECT_THROW(multilevel_match(skip, drones, l), Error);
  LevelGraph flat;
  flat.levels = {{1}};
  EXPECT_THROW(multilevel_match(flat, drones, l), Error);
}

}  // namespace
}  // namespace uavmatch
