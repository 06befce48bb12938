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

// Stability certificates for all three market classes. An empty result
// means the matching is stable under the class's notion of stability.

#include <cstddef>
#include <optional>
#include <vector>

#include "uavmatch/exchange_search.hpp"
#include "uavmatch/knapsack.hpp"
#include "uavmatch/matching.hpp"

namespace uavmatch {

struct BlockingCertificate {
  enum class Kind { kPair, kMove, kSwap };
  Kind kind = Kind::kPair;
  int source = 0;
  int relay = -1;                    // blocking relay (kPair)
  std::optional<Assignment> target;  // kMove destination, nullopt = unmatched
  int other_source = -1;             // kSwap partner
  double gain = 0.0;                 // kPair (class II): score gain at the relay; kMove/kSwap: mean satisfaction gain
};

// Class I: relay r and source s block when s ranks r above its partner and r
// has a free slot or ranks s above its worst holder.
inline std::vector<BlockingCertificate> blocking_pairs_substitutable(const Market& m,
                                                                     const Matching& matching) {
  std::vector<BlockingCertificate> out;
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    const int sid = m.sources[s].id;
    const PreferenceList& sp = m.source_prefs[s];
    const auto cur = matching.of(sid);
    const int stop = cur ? sp.rank_of(cur->relay_id) : static_cast<int>(sp.size());
    for (int i = 0; i < stop; ++i) {
      const int rid = sp.ranked[static_cast<std::size_t>(i)].id;
      const std::size_t r = static_cast<std::size_t>(m.relay_index(rid));
      const PreferenceList& rp = m.relay_prefs[r];
      if (!rp.accepts(sid)) continue;
      const auto held = matching.held_by(rid);
      bool blocks = static_cast<int>(held.size()) < m.quotas[r];
      for (int h : held) blocks = blocks || rp.prefers(sid, h);
      if (blocks) {
        BlockingCertificate c;
        c.kind = BlockingCertificate::Kind::kPair;
        c.source = sid;
        c.relay = rid;
        out.push_back(c);
      }
    }
  }
  return out;
}

// Class II: the pair must also be resource-feasible. r blocks with s when
// the best capacity-feasible subset of its holders plus s that contains s
// scores strictly higher than what r holds now.
inline std::vector<BlockingCertificate> blocking_pairs_partial(const Market& m,
                                                               const Matching& matching) {
  std::vector<BlockingCertificate> out;
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    const int sid = m.sources[s].id;
    const PreferenceList& sp = m.source_prefs[s];
    const auto cur = matching.of(sid);
    const int stop = cur ? sp.rank_of(cur->relay_id) : static_cast<int>(sp.size());
    for (int i = 0; i < stop; ++i) {
      const int rid = sp.ranked[static_cast<std::size_t>(i)].id;
      const std::size_t r = static_cast<std::size_t>(m.relay_index(rid));
      const PreferenceList& rp = m.relay_prefs[r];
      const int rank = rp.rank_of(sid);
      if (rank < 0) continue;
      const Candidate& applicant = rp.ranked[static_cast<std::size_t>(rank)];
      const int room = m.relays[r].resource_capacity - applicant.units;
      if (room < 0) continue;
      std::vector<KnapsackItem> items;
      double current = 0.0;
      for (int h : matching.held_by(rid)) {
        const Candidate& c = rp.ranked[static_cast<std::size_t>(rp.rank_of(h))];
        items.push_back({c.score, c.units});
        current += c.score;
      }
      const double with_s = solve_knapsack(items, room).value + applicant.score;
      if (with_s > current + kScoreTolerance) {
        BlockingCertificate c;
        c.kind = BlockingCertificate::Kind::kPair;
        c.source = sid;
        c.relay = rid;
        c.gain = with_s - current;
        out.push_back(c);
      }
    }
  }
  return out;
}

// Class III: every single move or pairwise swap that raises global
// satisfaction by more than the tolerance.
inline std::vector<BlockingCertificate> improving_exchanges(const Market& m,
                                                            const Matching& matching,
                                                            ExchangeOptions options = {}) {
  std::vector<BlockingCertificate> out;
  const ExchangeSearch probe(m, matching, options);
  for (const ExchangeStep& step : probe.improving_steps_available()) {
    BlockingCertificate c;
    c.kind = step.other_source < 0 ? BlockingCertificate::Kind::kMove
                                   : BlockingCertificate::Kind::kSwap;
    c.source = step.source;
    c.target = step.target;
    c.other_source = step.other_source;
    c.gain = step.gain;
    out.push_back(c);
  }
  return out;
}

inline std::vector<BlockingCertificate> verify_stability(const Market& m, const Matching& matching,
                                                         MatchingClass cls) {
  validate_matching(m, matching, cls);
  switch (cls) {
    case MatchingClass::kSubstitutable: return blocking_pairs_substitutable(m, matching);
    case MatchingClass::kPartial: return blocking_pairs_partial(m, matching);
    case MatchingClass::kNonSubstitutable: return improving_exchanges(m, matching);
  }
  return {};
}

}  // namespace uavmatch
