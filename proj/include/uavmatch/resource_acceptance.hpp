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

// Proposal rounds for partially substitutable (class II) markets. A relay
// does not simply keep its top-ranked applicants: it keeps the subset of
// held plus new applicants with the largest total efficiency score that fits
// its residual resource, so a lower-ranked but complementary applicant can
// displace a higher-ranked one.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "uavmatch/deferred_acceptance.hpp"
#include "uavmatch/knapsack.hpp"
#include "uavmatch/matching.hpp"

namespace uavmatch {

// Relay-side choice: indices into `pool` (ordered best-ranked first) of the
// capacity-feasible subset maximizing total score.
inline std::vector<std::size_t> choose_applicants(std::span<const Candidate> pool, int capacity) {
  std::vector<KnapsackItem> items;
  items.reserve(pool.size());
  for (const Candidate& c : pool) items.push_back({c.score, c.units});
  const KnapsackSolution sol = solve_knapsack(items, capacity);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (sol.chosen[i]) kept.push_back(i);
  }
  return kept;
}

class ResourceAcceptance {
 public:
  explicit ResourceAcceptance(const Market& market)
      : market_(&market),
        next_(market.num_sources(), 0),
        held_at_(market.num_sources(), -1),
        holds_(market.num_relays()) {}

  // Warm start: sources in `snapshot.held_by` keep their relay (the caller
  // guarantees capacity); every other source starts its list from the top
  // so freed resource is offered again.
  ResourceAcceptance(const Market& market, const ProposalSnapshot& snapshot)
      : ResourceAcceptance(market) {
    for (std::size_t s = 0; s < market.num_sources(); ++s) {
      const int id = market.sources[s].id;
      auto held = snapshot.held_by.find(id);
      if (held == snapshot.held_by.end()) continue;
      const int r = market.relay_index(held->second);
      const int rank = market.source_prefs[s].rank_of(held->second);
      if (r < 0 || rank < 0) continue;
      held_at_[s] = r;
      holds_[static_cast<std::size_t>(r)].push_back(static_cast<int>(s));
      next_[s] = static_cast<std::size_t>(rank) + 1;
    }
  }

  bool step() {
    const Market& m = *market_;
    std::vector<std::vector<int>> applicants(m.num_relays());
    bool proposed = false;
    for (std::size_t s = 0; s < m.num_sources(); ++s) {
      if (held_at_[s] >= 0) continue;
      const PreferenceList& prefs = m.source_prefs[s];
      if (next_[s] >= prefs.size()) continue;
      const int r = m.relay_index(prefs.ranked[next_[s]].id);
      ++next_[s];
      ++proposals_;
      proposed = true;
      if (r >= 0) applicants[static_cast<std::size_t>(r)].push_back(static_cast<int>(s));
    }
    if (!proposed) return false;
    ++rounds_;
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      if (applicants[r].empty()) continue;
      const PreferenceList& rp = m.relay_prefs[r];
      std::vector<int> pool = holds_[r];
      for (int s : applicants[r]) {
        if (rp.accepts(m.sources[static_cast<std::size_t>(s)].id)) pool.push_back(s);
      }
      std::sort(pool.begin(), pool.end(), [&](int a, int b) {
        return rp.rank_of(m.sources[static_cast<std::size_t>(a)].id) <
               rp.rank_of(m.sources[static_cast<std::size_t>(b)].id);
      });
      std::vector<Candidate> cands;
      cands.reserve(pool.size());
      for (int s : pool) {
        cands.push_back(rp.ranked[static_cast<std::size_t>(
            rp.rank_of(m.sources[static_cast<std::size_t>(s)].id))]);
      }
      const auto kept = choose_applicants(cands, m.relays[r].resource_capacity);
      for (int s : holds_[r]) held_at_[static_cast<std::size_t>(s)] = -1;
      holds_[r].clear();
      for (std::size_t i : kept) {
        holds_[r].push_back(pool[i]);
        held_at_[static_cast<std::size_t>(pool[i])] = static_cast<int>(r);
      }
    }
    return true;
  }

  void run() {
    while (step()) {
    }
  }

  int rounds() const { return rounds_; }
  std::size_t proposals() const { return proposals_; }

  // Resource units are the shared medium here, so every source sits on radio 0.
  Matching matching() const {
    const Market& m = *market_;
    Matching out = Matching::empty_for(m);
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      for (int s : holds_[r]) out.assign(m.sources[static_cast<std::size_t>(s)].id, m.relays[r].id, 0);
    }
    return out;
  }

  ProposalSnapshot snapshot() const {
    const Market& m = *market_;
    ProposalSnapshot snap;
    for (std::size_t s = 0; s < m.num_sources(); ++s) {
      snap.proposals_made[m.sources[s].id] = next_[s];
      if (held_at_[s] >= 0) {
        snap.held_by[m.sources[s].id] = m.relays[static_cast<std::size_t>(held_at_[s])].id;
      }
    }
    return snap;
  }

 private:
  const Market* market_;
  std::vector<std::size_t> next_;
  std::vector<int> held_at_;
  std::vector<std::vector<int>> holds_;
  int rounds_ = 0;
  std::size_t proposals_ = 0;
};

inline Matching match_class2(const Market& market) {
  ResourceAcceptance engine(market);
  engine.run();
  return engine.matching();
}

}  // namespace uavmatch
