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

// Source-proposing deferred acceptance with relay quotas (class I markets).

#include <algorithm>
#include <cstddef>
#include <map>
#include <vector>

#include "uavmatch/matching.hpp"
#include "uavmatch/preferences.hpp"

namespace uavmatch {

// Proposal progress keyed by player id, so a run can be resumed on a market
// that gained players.
struct ProposalSnapshot {
  std::map<int, std::size_t> proposals_made;  // source id -> entries of its list tried
  std::map<int, int> held_by;                 // source id -> relay id
};

class DeferredAcceptance {
 public:
  explicit DeferredAcceptance(const Market& market)
      : market_(&market),
        next_(market.num_sources(), 0),
        held_at_(market.num_sources(), -1),
        holds_(market.num_relays()) {}

  // Continues a previous run. Valid whenever the earlier proposals are still
  // a legal prefix of a run on `market`: sources only arrived, or departed
  // sources never proposed. Deferred acceptance is order independent, so the
  // result equals a cold run.
  DeferredAcceptance(const Market& market, const ProposalSnapshot& snapshot)
      : DeferredAcceptance(market) {
    for (std::size_t s = 0; s < market.num_sources(); ++s) {
      const int id = market.sources[s].id;
      if (auto it = snapshot.proposals_made.find(id); it != snapshot.proposals_made.end()) {
        next_[s] = std::min(it->second, market.source_prefs[s].size());
      }
      if (auto it = snapshot.held_by.find(id); it != snapshot.held_by.end()) {
        const int r = market.relay_index(it->second);
        if (r >= 0) {
          held_at_[s] = r;
          holds_[static_cast<std::size_t>(r)].push_back(static_cast<int>(s));
        }
      }
    }
    for (std::size_t r = 0; r < holds_.size(); ++r) sort_holds(r);
  }

  // One round: every free source with a remaining candidate proposes to its
  // next choice; each relay keeps its best `quota` applicants. Returns false
  // when nobody could propose (the run is complete).
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
      for (int s : applicants[r]) {
        if (rp.accepts(m.sources[static_cast<std::size_t>(s)].id)) {
          holds_[r].push_back(s);
          held_at_[static_cast<std::size_t>(s)] = static_cast<int>(r);
        }
      }
      sort_holds(r);
      const std::size_t quota = static_cast<std::size_t>(std::max(0, m.quotas[r]));
      while (holds_[r].size() > quota) {
        held_at_[static_cast<std::size_t>(holds_[r].back())] = -1;
        holds_[r].pop_back();
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

  // Radios are handed out by the relay's ranking: its favourite holds radio 0.
  Matching matching() const {
    const Market& m = *market_;
    Matching out = Matching::empty_for(m);
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      for (std::size_t k = 0; k < holds_[r].size(); ++k) {
        out.assign(m.sources[static_cast<std::size_t>(holds_[r][k])].id, m.relays[r].id,
                   static_cast<int>(k));
      }
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
  void sort_holds(std::size_t r) {
    const Market& m = *market_;
    const PreferenceList& rp = m.relay_prefs[r];
    std::sort(holds_[r].begin(), holds_[r].end(), [&](int a, int b) {
      return rp.rank_of(m.sources[static_cast<std::size_t>(a)].id) <
             rp.rank_of(m.sources[static_cast<std::size_t>(b)].id);
    });
  }

  const Market* market_;
  std::vector<std::size_t> next_;
  std::vector<int> held_at_;
  std::vector<std::vector<int>> holds_;
  int rounds_ = 0;
  std::size_t proposals_ = 0;
};

// Source-optimal stable matching of a class I market.
inline Matching match_class1(const Market& market) {
  DeferredAcceptance da(market);
  da.run();
  return da.matching();
}

}  // namespace uavmatch
