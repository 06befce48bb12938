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

#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace uavmatch {
namespace {

using testing::make_drone;

LinkModel unit_link() {
  LinkModel l;
  l.bandwidth_hz = 1e6;
  return l;
}

TEST(PathLoss, OneMeterAtTwoPointFourGigahertz) {
  // 20 log10(2.4e9) - 147.55, evaluated offline.
  EXPECT_NEAR(path_loss_db(1.0, unit_link()), 40.054224, 1e-6);
}

TEST(PathLoss, DoublingDistanceAddsSixDecibels) {
  const LinkModel l = unit_link();
  EXPECT_NEAR(path_loss_db(200.0, l) - path_loss_db(100.0, l), 6.0205999, 1e-6);
}

TEST(PathLoss, ExponentScalesDistanceTerm) {
  LinkModel l = unit_link();
  l.path_loss_exponent = 3.0;
  EXPECT_NEAR(path_loss_db(10.0, l) - path_loss_db(1.0, l), 30.0, 1e-9);
}

TEST(PathLoss, NonPositiveDistanceIsDegenerate) {
  for (double d : {0.0, -1.0}) {
    try {
      path_loss_db(d, unit_link());
      FAIL() << "expected an error for d=" << d;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kDegenerateGeometry);
    }
  }
}

TEST(PathLoss, MonotoneInDistance) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    LinkModel l = unit_link();
    l.path_loss_exponent = rng.uniform(0.5, 5.0);
    const double a = rng.uniform(0.01, 5000.0);
    const double b = rng.uniform(0.01, 5000.0);
    EXPECT_LE(path_loss_db(std::min(a, b), l), path_loss_db(std::max(a, b), l));
  }
}

TEST(Shannon, UnitAndThreeSnr) {
  EXPECT_DOUBLE_EQ(shannon_rate(1.0, unit_link()), 1.0e6);
  EXPECT_DOUBLE_EQ(shannon_rate(3.0, unit_link()), 2.0e6);
}

TEST(LinkRate, VanishesWithPower) {
  const Drone rx = make_drone(2, Role::kRelay, {100, 0, 0});
  double previous = INFINITY;
  for (double p : {1.0, 1e-3, 1e-6, 1e-9, 1e-12}) {
    Drone tx = make_drone(1, Role::kSource, {0, 0, 0}, 1.0);
    tx.tx_power_w = p;
    const double r = link_rate(tx, rx, unit_link());
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, previous);
    previous = r;
  }
  EXPECT_LT(previous, 1.0);
}

TEST(LinkRate, DecreasingInDistance) {
  const Drone tx = make_drone(1, Role::kSource, {0, 0, 0}, 1.0);
  double previous = INFINITY;
  for (double x : {1.0, 10.0, 100.0, 1000.0}) {
    const double r = link_rate(tx, make_drone(2, Role::kRelay, {x, 0, 0}), unit_link());
    EXPECT_LT(r, previous);
    previous = r;
  }
}

TEST(LinkRate, CoincidentOrSelfIsDegenerate) {
  const Drone a = make_drone(1, Role::kSource, {5, 5, 5}, 1.0);
  const Drone b = make_drone(2, Role::kRelay, {5, 5, 5});
  EXPECT_THROW(link_rate(a, b, unit_link()), Error);
  EXPECT_THROW(link_rate(a, a, unit_link()), Error);
}

TEST(RelayRate, ContractArithmetic) {
  const LinkModel l = unit_link();
  EXPECT_DOUBLE_EQ(two_hop_rate(4e6, 6e6, 1, l), 2e6);
  EXPECT_DOUBLE_EQ(two_hop_rate(4e6, 6e6, 2, l), 1e6);
  EXPECT_THROW(two_hop_rate(4e6, 6e6, 0, l), Error);
}

TEST(RelayRate, SymmetricGeometrySwapsEndpoints) {
  const Drone s = make_drone(1, Role::kSource, {0, 0, 0}, 1.0);
  const Drone r = make_drone(2, Role::kRelay, {50, 10, 20});
  const Drone d = make_drone(3, Role::kDestination, {100, 0, 0});
  EXPECT_DOUBLE_EQ(relay_rate(s, r, d, 1, unit_link()), relay_rate(d, r, s, 1, unit_link()));
}

TEST(RelayRate, SharingDividesExactly) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Drone s = make_drone(1, Role::kSource, {rng.uniform(0, 100), rng.uniform(0, 100), 0}, 1.0);
    const Drone r = make_drone(2, Role::kRelay, {rng.uniform(200, 300), rng.uniform(0, 100), 50});
    const Drone d = make_drone(3, Role::kDestination, {rng.uniform(400, 500), rng.uniform(0, 100), 10});
    const double one = relay_rate(s, r, d, 1, unit_link());
    const int k = 1 + static_cast<int>(rng.below(9));
    EXPECT_EQ(relay_rate(s, r, d, k, unit_link()), one / k);
  }
}

TEST(Satisfaction, CappedRatio) {
  EXPECT_EQ(satisfaction(5.0, 5.0).value(), 1.0);
  EXPECT_EQ(satisfaction(0.0, 5.0).value(), 0.0);
  EXPECT_EQ(satisfaction(10.0, 5.0).value(), 1.0);
  EXPECT_DOUBLE_EQ(satisfaction(1.0, 4.0).value(), 0.25);
}

TEST(Satisfaction, InvalidDemand) {
  try {
    satisfaction(1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidDemand);
  }
  EXPECT_THROW(Satisfaction(1.5), Error);
  EXPECT_THROW(Satisfaction(-0.1), Error);
}

TEST(Invariants, DroneAndLinkViolations) {
  Drone d = make_drone(1, Role::kSource, {0, 0, -1}, 0.0);
  d.priority = 0;
  const std::string v = drone_violations(d);
  EXPECT_NE(v.find("altitude"), std::string::npos);
  EXPECT_NE(v.find("demand"), std::string::npos);
  EXPECT_NE(v.find("priority"), std::string::npos);
  Drone relay = make_drone(2, Role::kRelay, {0, 0, 10}, 0.0, 0);
  EXPECT_NE(drone_violations(relay).find("radio_count"), std::string::npos);
  LinkModel l;
  EXPECT_TRUE(link_violations(l).empty());
  l.half_duplex_factor = 1.5;
  l.noise_power_w = 0.0;
  EXPECT_NE(link_violations(l).find("half_duplex"), std::string::npos);
  EXPECT_NE(link_violations(l).find("noise"), std::string::npos);
}

TEST(GlobalSatisfaction, InvariantUnderRelabeling) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Market m = testing::random_physical_market(rng, testing::market_spec(6, 3, 2));
    for (MatchingClass cls : {MatchingClass::kSubstitutable, MatchingClass::kNonSubstitutable}) {
      const Matching mt = cls == MatchingClass::kSubstitutable ? match_class1(m) : match_class3(m);
      // Reverse the id order of every role and carry the matching across.
      auto src = [](int id) { return 2000 - id; };
      auto rel = [](int id) { return 5000 - id; };
      std::vector<Drone> drones;
      std::map<int, int> dest;
      for (Drone d : m.destinations) {
        d.id += 1000;
        drones.push_back(d);
      }
      for (std::size_t s = 0; s < m.num_sources(); ++s) {
        Drone c = m.sources[s];
        c.id = src(c.id);
        drones.push_back(c);
        dest[c.id] = m.destination_of[s] + 1000;
      }
      for (Drone d : m.relays) {
        d.id = rel(d.id);
        drones.push_back(d);
      }
      const Market relabeled = build_market(drones, dest, m.link, m.options);
      Matching moved = Matching::empty_for(relabeled);
      for (const auto& [sid, a] : mt.assignment) {
        if (a) moved.assign(src(sid), rel(a->relay_id), a->radio);
      }
      EXPECT_NEAR(global_satisfaction(m, mt, cls), global_satisfaction(relabeled, moved, cls), 1e-12);
    }
  }
}

}  // namespace
}  // namespace uavmatch
