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

// Reference algorithms: exhaustive optimum, selfish best-response dynamics
// and a seeded random feasible assignment.

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "uavmatch/matching.hpp"
#include "uavmatch/rng.hpp"

namespace uavmatch {

inline constexpr std::uint64_t kDefaultOracleCap = 10'000'000;

struct OracleResult {
  Matching best;
  double optimum = 0.0;
  std::uint64_t enumerated = 0;  // feasible assignments evaluated
};

namespace detail {

struct Option {
  int relay = -1;  // relay index, -1 = unmatched
  int radio = 0;
};

inline bool allowed(const Market& m, std::size_t s, std::size_t r) {
  return m.source_prefs[s].accepts(m.relays[r].id) && m.relay_prefs[r].accepts(m.sources[s].id);
}

// Per-source choices: unmatched first, then relays ascending (and radios
// ascending in class III, where the radio changes who shares with whom).
inline std::vector<std::vector<Option>> enumerate_options(const Market& m, MatchingClass cls) {
  std::vector<std::vector<Option>> out(m.num_sources());
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    out[s].push_back({-1, 0});
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      if (!allowed(m, s, r)) continue;
      const int radios = cls == MatchingClass::kNonSubstitutable ? std::max(1, m.relays[r].radio_count) : 1;
      for (int k = 0; k < radios; ++k) out[s].push_back({static_cast<int>(r), k});
    }
  }
  return out;
}

class Enumerator {
 public:
  Enumerator(const Market& m, MatchingClass cls)
      : m_(m), cls_(cls), options_(enumerate_options(m, cls)), choice_(m.num_sources(), 0),
        load_(m.num_relays(), 0), units_(m.num_relays(), 0) {
    radio_base_.resize(m.num_relays() + 1, 0);
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      radio_base_[r + 1] = radio_base_[r] + static_cast<std::size_t>(std::max(1, m.relays[r].radio_count));
    }
    sharers_.assign(radio_base_.back(), 0);
  }

  double space_size() const {
    double size = 1.0;
    for (const auto& o : options_) size *= static_cast<double>(o.size());
    return size;
  }

  void run() { descend(0); }

  std::uint64_t enumerated = 0;
  double best_value = -1.0;
  std::vector<std::size_t> best_choice;

 private:
  bool fits(std::size_t s, const Option& o) const {
    if (o.relay < 0) return true;
    const std::size_t r = static_cast<std::size_t>(o.relay);
    switch (cls_) {
      case MatchingClass::kSubstitutable: return load_[r] < m_.quotas[r];
      case MatchingClass::kPartial:
        return units_[r] + m_.demand_units[s] <= m_.relays[r].resource_capacity;
      case MatchingClass::kNonSubstitutable: return true;
    }
    return false;
  }

  void descend(std::size_t s) {
    if (s == choice_.size()) {
      evaluate();
      return;
    }
    for (std::size_t i = 0; i < options_[s].size(); ++i) {
      const Option& o = options_[s][i];
      if (!fits(s, o)) continue;
      choice_[s] = i;
      if (o.relay >= 0) {
        const std::size_t r = static_cast<std::size_t>(o.relay);
        ++load_[r];
        units_[r] += m_.demand_units[s];
        ++sharers_[radio_base_[r] + static_cast<std::size_t>(o.radio)];
      }
      descend(s + 1);
      if (o.relay >= 0) {
        const std::size_t r = static_cast<std::size_t>(o.relay);
        --load_[r];
        units_[r] -= m_.demand_units[s];
        --sharers_[radio_base_[r] + static_cast<std::size_t>(o.radio)];
      }
    }
  }

  // Same arithmetic, in the same order, as global_satisfaction.
  void evaluate() {
    ++enumerated;
    double total = 0.0;
    for (std::size_t s = 0; s < choice_.size(); ++s) {
      const Option& o = options_[s][choice_[s]];
      double rate = m_.direct_bps[s];
      if (o.relay >= 0) {
        const std::size_t r = static_cast<std::size_t>(o.relay);
        rate = assigned_bps(m_, cls_, s, r, sharers_[radio_base_[r] + static_cast<std::size_t>(o.radio)]);
      }
      total += std::min(1.0, rate / m_.sources[s].demand_bps);
    }
    const double value = choice_.empty() ? 0.0 : total / static_cast<double>(choice_.size());
    if (value > best_value) {
      best_value = value;
      best_choice = choice_;
    }
  }

 public:
  Matching to_matching(const std::vector<std::size_t>& choice) const {
    Matching out = Matching::empty_for(m_);
    std::vector<int> next_radio(m_.num_relays(), 0);
    for (std::size_t s = 0; s < choice.size(); ++s) {
      const Option& o = options_[s][choice[s]];
      if (o.relay < 0) continue;
      const std::size_t r = static_cast<std::size_t>(o.relay);
      int radio = o.radio;
      if (cls_ == MatchingClass::kSubstitutable) radio = next_radio[r]++;
      out.assign(m_.sources[s].id, m_.relays[r].id, radio);
    }
    return out;
  }

 private:
  const Market& m_;
  MatchingClass cls_;
  std::vector<std::vector<Option>> options_;
  std::vector<std::size_t> choice_;
  std::vector<int> load_;
  std::vector<int> units_;
  std::vector<std::size_t> radio_base_;
  std::vector<int> sharers_;
};

}  // namespace detail

// Exhaustive search over every feasible assignment. Refuses (never samples)
// when the raw search space exceeds `cap`. Ties go to the lexicographically
// smallest choice vector (sources by id, unmatched before relays).
inline OracleResult brute_force_optimum(const Market& m, MatchingClass cls,
                                        std::uint64_t cap = kDefaultOracleCap) {
  detail::Enumerator e(m, cls);
  const double size = e.space_size();
  if (size > static_cast<double>(cap)) {
    char text[64];
    std::snprintf(text, sizeof text, "%.0f", size);
    throw Error(ErrorKind::kInstanceTooLarge, std::string("search space of ") + text +
                                                  " assignments exceeds cap " + std::to_string(cap));
  }
  e.run();
  OracleResult out;
  out.best = e.to_matching(e.best_choice);
  out.optimum = global_satisfaction(m, out.best, cls);
  out.enumerated = e.enumerated;
  return out;
}

struct BestResponseResult {
  Matching matching;
  bool converged = false;
  int sweeps = 0;  // sweeps in which some source moved
};

// Round-robin selfish dynamics from the empty matching: each source in id
// order moves to the feasible option with the highest own rate, given
// everybody else fixed. Stops at a fixed point or after `max_iters` sweeps.
inline BestResponseResult best_response(const Market& m, int max_iters,
                                        MatchingClass cls = MatchingClass::kNonSubstitutable) {
  if (max_iters < 1) throw Error(ErrorKind::kConfiguration, "max_iters must be >= 1");
  BestResponseResult out;
  out.matching = Matching::empty_for(m);
  Matching& cur = out.matching;
  for (int sweep = 1; sweep <= max_iters; ++sweep) {
    bool moved = false;
    for (std::size_t s = 0; s < m.num_sources(); ++s) {
      const int sid = m.sources[s].id;
      const auto here = cur.of(sid);
      cur.unassign(sid);
      double best_rate = m.direct_bps[s];
      std::optional<Assignment> best;
      for (std::size_t r = 0; r < m.num_relays(); ++r) {
        if (!detail::allowed(m, s, r)) continue;
        const int rid = m.relays[r].id;
        const int radios = std::max(1, m.relays[r].radio_count);
        for (int k = 0; k < radios; ++k) {
          double rate = 0.0;
          if (cls == MatchingClass::kNonSubstitutable) {
            rate = assigned_bps(m, cls, s, r, static_cast<int>(cur.occupants(rid, k).size()) + 1);
          } else if (cls == MatchingClass::kSubstitutable) {
            if (!cur.occupants(rid, k).empty() ||
                static_cast<int>(cur.held_by(rid).size()) >= m.quotas[r]) {
              continue;
            }
            rate = assigned_bps(m, cls, s, r, 1);
          } else {
            if (k > 0 || used_units(m, cur, rid) + m.demand_units[s] > m.relays[r].resource_capacity) continue;
            rate = assigned_bps(m, cls, s, r, 1);
          }
          if (rate > best_rate) {
            best_rate = rate;
            best = Assignment{rid, k};
          }
        }
      }
      // Stay put unless the best option is strictly better than the current one.
      double here_rate = m.direct_bps[s];
      if (here) {
        cur.assignment[sid] = here;
        here_rate = achieved_bps(m, cur, cls, sid);
        cur.unassign(sid);
      }
      if (best_rate > here_rate * (1.0 + 1e-12) + 1e-9 && best != here) {
        cur.assignment[sid] = best;
        moved = true;
      } else {
        cur.assignment[sid] = here;
      }
    }
    if (!moved) {
      out.converged = true;
      return out;
    }
    ++out.sweeps;
  }
  return out;
}

// Each source in id order draws uniformly among the options still feasible
// given earlier draws (unmatched included). With shared radios every
// combination is feasible, so the draw is uniform over assignments.
inline Matching random_assignment(const Market& m, MatchingClass cls, std::uint64_t seed) {
  Rng rng(seed, Rng::stream_id("random_assignment"));
  const auto options = detail::enumerate_options(m, cls);
  Matching out = Matching::empty_for(m);
  std::vector<int> load(m.num_relays(), 0), units(m.num_relays(), 0), next_radio(m.num_relays(), 0);
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    std::vector<detail::Option> feasible;
    for (const auto& o : options[s]) {
      if (o.relay >= 0) {
        const std::size_t r = static_cast<std::size_t>(o.relay);
        if (cls == MatchingClass::kSubstitutable && load[r] >= m.quotas[r]) continue;
        if (cls == MatchingClass::kPartial &&
            units[r] + m.demand_units[s] > m.relays[r].resource_capacity) {
          continue;
        }
      }
      feasible.push_back(o);
    }
    const detail::Option pick = feasible[rng.below(feasible.size())];
    if (pick.relay < 0) continue;
    const std::size_t r = static_cast<std::size_t>(pick.relay);
    ++load[r];
    units[r] += m.demand_units[s];
    const int radio = cls == MatchingClass::kSubstitutable ? next_radio[r]++ : pick.radio;
    out.assign(m.sources[s].id, m.relays[r].id, radio);
  }
  return out;
}

}  // namespace uavmatch
