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

#include <functional>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace uavmatch {
namespace {

using testing::make_drone;
constexpr auto kI = MatchingClass::kSubstitutable;
constexpr auto kII = MatchingClass::kPartial;
constexpr auto kIII = MatchingClass::kNonSubstitutable;

double sat(const Market& m, std::size_t s, double rate) {
  return std::min(1.0, rate / m.sources[s].demand_bps);
}

bool mutual(const Market& m, std::size_t s, std::size_t r) {
  return m.source_prefs[s].accepts(m.relays[r].id) && m.relay_prefs[r].accepts(m.sources[s].id);
}

TEST(Oracle, OneSourceOneRelay) {
  std::vector<Drone> drones{make_drone(0, Role::kDestination, {1000, 0, 10}),
                            make_drone(1, Role::kSource, {0, 0, 0}, 5e5),
                            make_drone(10, Role::kRelay, {500, 0, 50})};
  const Market m = build_market(drones, {{1, 0}}, testing::weak_link());
  ASSERT_EQ(m.source_prefs[0].size(), 1u);
  const OracleResult o = brute_force_optimum(m, kI);
  EXPECT_EQ(o.enumerated, 2u);
  EXPECT_DOUBLE_EQ(o.optimum, std::max(sat(m, 0, m.direct_bps[0]), sat(m, 0, m.relay_bps[0][0])));
  EXPECT_TRUE(o.best.of(1));
}

TEST(Oracle, TwoByTwoGridByHand) {
  Rng rng(300);
  for (int t = 0; t < 200; ++t) {
    testing::RandomMarketSpec spec = testing::market_spec(2, 2, 1);
    const Market m = testing::random_physical_market(rng, spec);
    // 3 x 3 grid of (unmatched, relay 0, relay 1) minus shared relays and
    // unacceptable cells.
    double best = -1.0;
    std::uint64_t feasible = 0;
    for (int a = -1; a < 2; ++a) {
      for (int b = -1; b < 2; ++b) {
        if (a >= 0 && a == b) continue;
        if (a >= 0 && !mutual(m, 0, static_cast<std::size_t>(a))) continue;
        if (b >= 0 && !mutual(m, 1, static_cast<std::size_t>(b))) continue;
        ++feasible;
        const double v =
            (sat(m, 0, a < 0 ? m.direct_bps[0] : m.relay_bps[0][static_cast<std::size_t>(a)]) +
             sat(m, 1, b < 0 ? m.direct_bps[1] : m.relay_bps[1][static_cast<std::size_t>(b)])) /
            2.0;
        best = std::max(best, v);
      }
    }
    const OracleResult o = brute_force_optimum(m, kI);
    EXPECT_LE(feasible, 9u);
    EXPECT_EQ(o.enumerated, feasible);
    EXPECT_NEAR(o.optimum, best, 1e-12);
  }
}

// Independent class III optimum: radio-level enumeration with the shared
// rate computed from scratch.
double class3_by_hand(const Market& m) {
  const std::size_t ns = m.num_sources();
  std::vector<std::pair<int, int>> opts{{-1, -1}};
  for (std::size_t r = 0; r < m.num_relays(); ++r) {
    for (int k = 0; k < m.relays[r].radio_count; ++k) opts.push_back({static_cast<int>(r), k});
  }
  std::vector<std::size_t> pick(ns, 0);
  double best = 0.0;
  std::function<void(std::size_t)> go = [&](std::size_t s) {
    if (s == ns) {
      double total = 0.0;
      for (std::size_t i = 0; i < ns; ++i) {
        const auto [r, k] = opts[pick[i]];
        if (r < 0) {
          total += sat(m, i, m.direct_bps[i]);
          continue;
        }
        int sharers = 0;
        for (std::size_t j = 0; j < ns; ++j) sharers += opts[pick[j]] == opts[pick[i]] ? 1 : 0;
        total += sat(m, i, m.relay_bps[i][static_cast<std::size_t>(r)] / sharers);
      }
      best = std::max(best, total / static_cast<double>(ns));
      return;
    }
    for (std::size_t o = 0; o < opts.size(); ++o) {
      if (opts[o].first >= 0 && !mutual(m, s, static_cast<std::size_t>(opts[o].first))) continue;
      pick[s] = o;
      go(s + 1);
    }
  };
  go(0);
  return best;
}

TEST(Oracle, Class3MatchesHandEnumeration) {
  Rng rng(301);
  for (int t = 0; t < 40; ++t) {
    const Market m = testing::random_physical_market(rng, testing::market_spec(4, 2, 2));
    const OracleResult o = brute_force_optimum(m, kIII);
    EXPECT_NEAR(o.optimum, class3_by_hand(m), 1e-12);
    EXPECT_TRUE(matching_violations(m, o.best, kIII).empty());
  }
}

TEST(Oracle, BoundsEveryEngine) {
  Rng rng(302);
  testing::RandomMarketSpec spec = testing::market_spec(5, 3, 2);
  spec.options.resource_unit_bps = 5e4;
  for (int t = 0; t < 60; ++t) {
    const Market m = testing::random_physical_market(rng, spec);
    EXPECT_GE(brute_force_optimum(m, kI).optimum + 1e-12, global_satisfaction(m, match_class1(m), kI));
    EXPECT_GE(brute_force_optimum(m, kII).optimum + 1e-12, global_satisfaction(m, match_class2(m), kII));
    EXPECT_GE(brute_force_optimum(m, kIII).optimum + 1e-12,
              global_satisfaction(m, match_class3(m), kIII));
  }
}

TEST(Oracle, RefusesOversizedInstances) {
  Rng rng(303);
  const Market m = testing::random_physical_market(rng, testing::market_spec(20, 5, 2));
  try {
    brute_force_optimum(m, kIII, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInstanceTooLarge);
  }
}

// A source has an improving unilateral move when some feasible option beats
// its current own rate.
bool has_unilateral_improvement(const Market& m, const Matching& mt) {
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    const int sid = m.sources[s].id;
    const double here = achieved_bps(m, mt, kIII, sid);
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      if (!mutual(m, s, r)) continue;
      for (int k = 0; k < m.relays[r].radio_count; ++k) {
        const auto cur = mt.of(sid);
        if (cur && cur->relay_id == m.relays[r].id && cur->radio == k) continue;
        Matching alt = mt;
        alt.assign(sid, m.relays[r].id, k);
        if (achieved_bps(m, alt, kIII, sid) > here * (1 + 1e-12) + 1e-9) return true;
      }
    }
    if (mt.of(sid) && m.direct_bps[s] > here * (1 + 1e-12) + 1e-9) return true;
  }
  return false;
}

TEST(BestResponse, SingleSourceConvergesInOneSweep) {
  std::vector<Drone> drones{make_drone(0, Role::kDestination, {1000, 0, 10}),
                            make_drone(1, Role::kSource, {0, 0, 0}, 5e5),
                            make_drone(10, Role::kRelay, {500, 0, 50}),
                            make_drone(11, Role::kRelay, {500, 300, 50})};
  const Market m = build_market(drones, {{1, 0}}, testing::weak_link());
  const BestResponseResult br = best_response(m, 10);
  EXPECT_TRUE(br.converged);
  EXPECT_EQ(br.sweeps, 1);
  EXPECT_EQ(br.matching.of(1)->relay_id, m.source_prefs[0].ranked.front().id);
}

TEST(BestResponse, SelfishSharingLosesToExchangeSearch) {
  // Both sources gain individually by sharing the radio, which drags the
  // mean below one-relayed-one-direct.
  std::vector<Drone> drones{make_drone(0, Role::kDestination, {1000, 0, 10}),
                            make_drone(1, Role::kSource, {0, 40, 0}, 1e7),
                            make_drone(2, Role::kSource, {0, -40, 0}, 1e7),
                            make_drone(10, Role::kRelay, {500, 0, 50})};
  LinkModel steep = testing::weak_link();
  steep.path_loss_exponent = 3.0;
  steep.noise_power_w = 1e-13;
  const Market m = build_market(drones, {{1, 0}, {2, 0}}, steep);
  ASSERT_GT(m.relay_bps[1][0] / 2, m.direct_bps[1]);
  const BestResponseResult br = best_response(m, 10);
  ASSERT_TRUE(br.converged);
  EXPECT_EQ(br.matching.matched_count(), 2u);
  const double selfish = global_satisfaction(m, br.matching, kIII);
  const double social = global_satisfaction(m, match_class3(m), kIII);
  EXPECT_LT(selfish, social);
  EXPECT_DOUBLE_EQ(social, brute_force_optimum(m, kIII).optimum);
}

TEST(BestResponse, FixedPointsHaveNoUnilateralImprovement) {
  Rng rng(304);
  for (int t = 0; t < 100; ++t) {
    const Market m = testing::random_physical_market(rng, testing::market_spec(10, 4, 2));
    const BestResponseResult br = best_response(m, 200);
    EXPECT_TRUE(matching_violations(m, br.matching, kIII).empty());
    if (br.converged) {
      EXPECT_FALSE(has_unilateral_improvement(m, br.matching));
    }
  }
  EXPECT_THROW(best_response(testing::random_physical_market(rng, testing::market_spec(2, 1, 1)), 0),
               Error);
}

TEST(RandomAssignment, DeterministicAndFeasible) {
  Rng rng(305);
  testing::RandomMarketSpec spec = testing::market_spec(10, 4, 3);
  spec.options.resource_unit_bps = 5e4;
  const Market m = testing::random_physical_market(rng, spec);
  for (MatchingClass cls : {kI, kII, kIII}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Matching a = random_assignment(m, cls, seed);
      EXPECT_EQ(a, random_assignment(m, cls, seed));
      EXPECT_TRUE(matching_violations(m, a, cls).empty());
    }
  }
}

TEST(RandomAssignment, EmptyMarket) {
  const Market m = market_from_preferences({}, {}, {});
  EXPECT_TRUE(random_assignment(m, kIII, 1).assignment.empty());
}

TEST(RandomAssignment, AverageBelowExchangeSearch) {
  Rng rng(306);
  for (int t = 0; t < 5; ++t) {
    const Market m = testing::random_physical_market(rng, testing::market_spec(8, 3, 2));
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      mean += global_satisfaction(m, random_assignment(m, kIII, seed), kIII);
    }
    mean /= 1000.0;
    EXPECT_LE(mean, global_satisfaction(m, match_class3(m), kIII));
  }
}

}  // namespace
}  // namespace uavmatch
