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

// Non-substitutable (class III) markets: sources share relay radios and a
// relay's time is split equally among the sources on a radio, so whether a
// connection is worth keeping depends on everybody else's choices. The
// engine places sources greedily and then runs a local search over single
// moves and pairwise swaps, accepting a step only when global satisfaction
// rises by more than the tolerance.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "uavmatch/matching.hpp"

namespace uavmatch {

struct ExchangeOptions {
  int max_iterations = 1000;
  double tolerance = 1e-9;  // on the mean satisfaction
};

// An improving step found in a state: a single move (other_source < 0) or a
// swap of two sources' assignments.
struct ExchangeStep {
  int source = 0;
  std::optional<Assignment> target;  // move destination, nullopt = unmatched
  int other_source = -1;             // swap partner id
  double gain = 0.0;                 // increase of the mean satisfaction
};

class ExchangeSearch {
 public:
  explicit ExchangeSearch(const Market& market, ExchangeOptions options = {})
      : ExchangeSearch(market, Matching{}, options) {}

  // Warm start. Sources with an entry in `initial` keep it (when still
  // feasible); sources without an entry are placed greedily on the first
  // step.
  ExchangeSearch(const Market& market, const Matching& initial, ExchangeOptions options = {})
      : market_(&market), options_(options) {
    const std::size_t ns = market.num_sources();
    const std::size_t nr = market.num_relays();
    relay_of_.assign(ns, -1);
    radio_of_.assign(ns, -1);
    occupants_.resize(nr);
    allowed_.assign(ns, std::vector<char>(nr, 0));
    for (std::size_t r = 0; r < nr; ++r) {
      occupants_[r].resize(static_cast<std::size_t>(std::max(1, market.relays[r].radio_count)));
    }
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t r = 0; r < nr; ++r) {
        allowed_[s][r] = market.source_prefs[s].accepts(market.relays[r].id) &&
                         market.relay_prefs[r].accepts(market.sources[s].id);
      }
      const int id = market.sources[s].id;
      auto it = initial.assignment.find(id);
      if (it == initial.assignment.end()) {
        pending_.push_back(s);
        continue;
      }
      if (!it->second) continue;
      const int r = market.relay_index(it->second->relay_id);
      const int k = it->second->radio;
      if (r >= 0 && allowed_[s][static_cast<std::size_t>(r)] && k >= 0 &&
          k < static_cast<int>(occupants_[static_cast<std::size_t>(r)].size())) {
        place(s, r, k);
      }
    }
  }

  // One engine iteration: the greedy placement of pending sources if any,
  // otherwise (or if it placed nobody) one local-search pass. Returns true when the state changed.
  bool step() {
    ++steps_;
    bool changed = !pending_.empty() && greedy_pass();
    if (!changed) changed = search_pass();
    if (changed) {
      ++improving_steps_;
    } else {
      converged_ = true;
    }
    return changed;
  }

  // Runs to an exchange-stable state; throws TerminationCapError carrying
  // the current (best so far) matching when the cap is hit first.
  void run() {
    while (!converged_) {
      if (steps_ >= options_.max_iterations) {
        throw TerminationCapError(
            "exchange search did not converge within " + std::to_string(options_.max_iterations) +
                " iterations",
            matching(), global_satisfaction(*market_, matching(), MatchingClass::kNonSubstitutable));
      }
      step();
    }
  }

  bool converged() const { return converged_; }
  int steps() const { return steps_; }
  // Iterations that changed the state.
  int improving_steps() const { return improving_steps_; }

  Matching matching() const {
    const Market& m = *market_;
    Matching out = Matching::empty_for(m);
    for (std::size_t s = 0; s < m.num_sources(); ++s) {
      if (relay_of_[s] >= 0) {
        out.assign(m.sources[s].id, m.relays[static_cast<std::size_t>(relay_of_[s])].id,
                   radio_of_[s]);
      }
    }
    return out;
  }

  // Every improving single move and swap available in the current state,
  // in scan order.
  std::vector<ExchangeStep> improving_steps_available() const {
    std::vector<ExchangeStep> out;
    const Market& m = *market_;
    const double n = static_cast<double>(m.num_sources());
    for (std::size_t s = 0; s < m.num_sources(); ++s) {
      for_each_target(s, [&](int r, int k) {
        const double g = move_gain(s, r, k) / n;
        if (g > options_.tolerance) {
          ExchangeStep step;
          step.source = m.sources[s].id;
          if (r >= 0) step.target = Assignment{m.relays[static_cast<std::size_t>(r)].id, k};
          step.gain = g;
          out.push_back(step);
        }
      });
    }
    for (std::size_t a = 0; a < m.num_sources(); ++a) {
      for (std::size_t b = a + 1; b < m.num_sources(); ++b) {
        if (!swappable(a, b)) continue;
        const double g = swap_gain(a, b) / n;
        if (g > options_.tolerance) {
          ExchangeStep step;
          step.source = m.sources[a].id;
          step.other_source = m.sources[b].id;
          step.gain = g;
          out.push_back(step);
        }
      }
    }
    return out;
  }

 private:
  double sat(std::size_t s, double rate) const {
    return std::min(1.0, rate / market_->sources[s].demand_bps);
  }

  double shared_sat(std::size_t s, std::size_t r, std::size_t sharers) const {
    return sat(s, market_->relay_bps[s][r] / static_cast<double>(sharers));
  }

  // Sum of satisfactions on a radio holding `occ` plus optionally one extra
  // source and minus optionally one member.
  double radio_sum(std::size_t r, const std::vector<std::size_t>& occ, std::optional<std::size_t> add,
                   std::optional<std::size_t> remove) const {
    std::size_t count = occ.size() + (add ? 1 : 0) - (remove ? 1 : 0);
    if (count == 0) return 0.0;
    double total = 0.0;
    for (std::size_t t : occ) {
      if (remove && t == *remove) continue;
      total += shared_sat(t, r, count);
    }
    if (add) total += shared_sat(*add, r, count);
    return total;
  }

  // Change in total (not mean) satisfaction when s moves to (r, k); r < 0
  // means unmatched.
  double move_gain(std::size_t s, int r, int k) const {
    double gain = 0.0;
    const int cr = relay_of_[s];
    const int ck = radio_of_[s];
    if (cr >= 0) {
      const auto& occ = occupants_[static_cast<std::size_t>(cr)][static_cast<std::size_t>(ck)];
      gain += radio_sum(static_cast<std::size_t>(cr), occ, std::nullopt, s) -
              radio_sum(static_cast<std::size_t>(cr), occ, std::nullopt, std::nullopt);
    } else {
      gain -= sat(s, market_->direct_bps[s]);
    }
    if (r >= 0) {
      const auto& occ = occupants_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      gain += radio_sum(static_cast<std::size_t>(r), occ, s, std::nullopt) -
              radio_sum(static_cast<std::size_t>(r), occ, std::nullopt, std::nullopt);
    } else {
      gain += sat(s, market_->direct_bps[s]);
    }
    return gain;
  }

  bool swappable(std::size_t a, std::size_t b) const {
    const int ra = relay_of_[a];
    const int rb = relay_of_[b];
    if (ra < 0 && rb < 0) return false;
    if (ra == rb) return false;
    if (rb >= 0 && !allowed_[a][static_cast<std::size_t>(rb)]) return false;
    if (ra >= 0 && !allowed_[b][static_cast<std::size_t>(ra)]) return false;
    return true;
  }

  // Sharer counts are unchanged by a swap, so only the two sources move.
  double own_sat(std::size_t s, int r, int k) const {
    if (r < 0) return sat(s, market_->direct_bps[s]);
    return shared_sat(s, static_cast<std::size_t>(r),
                      occupants_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)].size());
  }

  double swap_gain(std::size_t a, std::size_t b) const {
    const int ra = relay_of_[a], ka = radio_of_[a];
    const int rb = relay_of_[b], kb = radio_of_[b];
    return own_sat(a, rb, kb) + own_sat(b, ra, ka) - own_sat(a, ra, ka) - own_sat(b, rb, kb);
  }

  template <typename Fn>
  void for_each_target(std::size_t s, Fn&& fn) const {
    if (relay_of_[s] >= 0) fn(-1, -1);
    for (std::size_t r = 0; r < occupants_.size(); ++r) {
      if (!allowed_[s][r]) continue;
      for (std::size_t k = 0; k < occupants_[r].size(); ++k) {
        if (relay_of_[s] == static_cast<int>(r) && radio_of_[s] == static_cast<int>(k)) continue;
        fn(static_cast<int>(r), static_cast<int>(k));
      }
    }
  }

  void place(std::size_t s, int r, int k) {
    auto& occ = occupants_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    occ.insert(std::lower_bound(occ.begin(), occ.end(), s), s);
    relay_of_[s] = r;
    radio_of_[s] = k;
  }

  void remove(std::size_t s) {
    if (relay_of_[s] < 0) return;
    auto& occ = occupants_[static_cast<std::size_t>(relay_of_[s])][static_cast<std::size_t>(radio_of_[s])];
    occ.erase(std::find(occ.begin(), occ.end(), s));
    relay_of_[s] = -1;
    radio_of_[s] = -1;
  }

  void move(std::size_t s, int r, int k) {
    remove(s);
    if (r >= 0) place(s, r, k);
  }

  bool greedy_pass() {
    bool changed = false;
    const Market& m = *market_;
    for (std::size_t s : pending_) {
      int best_r = -1, best_k = -1;
      double best = m.direct_bps[s];
      for (std::size_t r = 0; r < occupants_.size(); ++r) {
        if (!allowed_[s][r]) continue;
        for (std::size_t k = 0; k < occupants_[r].size(); ++k) {
          const double rate =
              m.relay_bps[s][r] / static_cast<double>(occupants_[r][k].size() + 1);
          if (rate > best) {
            best = rate;
            best_r = static_cast<int>(r);
            best_k = static_cast<int>(k);
          }
        }
      }
      if (best_r >= 0) {
        place(s, best_r, best_k);
        changed = true;
      }
    }
    pending_.clear();
    return changed;
  }

  bool search_pass() {
    bool changed = false;
    const Market& m = *market_;
    const double n = static_cast<double>(m.num_sources());
    for (std::size_t s = 0; s < m.num_sources(); ++s) {
      double best_gain = 0.0;
      int best_r = -2, best_k = -1;
      for_each_target(s, [&](int r, int k) {
        const double g = move_gain(s, r, k);
        if (g > best_gain) {
          best_gain = g;
          best_r = r;
          best_k = k;
        }
      });
      if (best_r != -2 && best_gain / n > options_.tolerance) {
        move(s, best_r, best_k);
        changed = true;
      }
    }
    for (std::size_t a = 0; a < m.num_sources(); ++a) {
      for (std::size_t b = a + 1; b < m.num_sources(); ++b) {
        if (!swappable(a, b)) continue;
        if (swap_gain(a, b) / n > options_.tolerance) {
          const int ra = relay_of_[a], ka = radio_of_[a];
          const int rb = relay_of_[b], kb = radio_of_[b];
          remove(a);
          remove(b);
          if (rb >= 0) place(a, rb, kb);
          if (ra >= 0) place(b, ra, ka);
          changed = true;
        }
      }
    }
    return changed;
  }

  const Market* market_;
  ExchangeOptions options_;
  std::vector<int> relay_of_;
  std::vector<int> radio_of_;
  std::vector<std::vector<std::vector<std::size_t>>> occupants_;  // [relay][radio]
  std::vector<std::vector<char>> allowed_;
  std::vector<std::size_t> pending_;
  int steps_ = 0;
  int improving_steps_ = 0;
  bool converged_ = false;
};

inline Matching match_class3(const Market& market, ExchangeOptions options = {}) {
  ExchangeSearch search(market, options);
  search.run();
  return search.matching();
}

}  // namespace uavmatch
