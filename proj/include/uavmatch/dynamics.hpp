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

// Time-evolving markets: trajectory-aware relay scoring (static relaying
// versus store-and-forward ferrying), source arrivals and departures, and
// re-matching that starts from the previous outcome.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "uavmatch/deferred_acceptance.hpp"
#include "uavmatch/exchange_search.hpp"
#include "uavmatch/matching.hpp"
#include "uavmatch/preferences.hpp"
#include "uavmatch/resource_acceptance.hpp"
#include "uavmatch/trajectory.hpp"

namespace uavmatch {

inline constexpr double kDefaultHorizonS = 30.0;
inline constexpr double kDefaultStepS = 1.0;

enum class RelayMode { kStatic, kFerry };

constexpr std::string_view to_string(RelayMode m) {
  return m == RelayMode::kFerry ? "ferry" : "static";
}

// Mean of sampled values; exactly the common value when all samples agree,
// so static geometry reproduces the snapshot rate bit for bit.
inline double sampled_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    return values.front();
  }
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

namespace detail {

inline Drone at_position(Drone d, Vec3 p) {
  d.position = p;
  return d;
}

// Rate of a hop at one sample; coincident positions carry nothing.
inline double sampled_link(const Drone& tx, const Drone& rx, const LinkModel& link) {
  if (distance(tx.position, rx.position) <= 0.0) return 0.0;
  return link_rate(tx, rx, link);
}

}  // namespace detail

struct RelayScores {
  double link_bps = 0.0;   // time-averaged two-hop rate
  double ferry_bps = 0.0;  // store-and-forward average rate, 0 for static relays
};

// Scores one relay for one source over the sampled horizon.
//
// Ferry model: the relay collects from the source on every sample up to the
// midpoint between its closest approach to the source and its later closest
// approach to the destination, and delivers on the samples after it.
// Deliverable bits are the smaller of the two totals (unbounded buffer),
// averaged over the sampled duration.
inline RelayScores score_relay(const Drone& src, const Trajectory& src_path, const Drone& relay,
                               const Trajectory& relay_path, const Drone& dst,
                               const Trajectory& dst_path, const std::vector<double>& times,
                               double step_s, const LinkModel& link) {
  RelayScores out;
  std::vector<double> two_hop;
  std::vector<double> up, down, d_src, d_dst;
  for (double t : times) {
    const Drone s = detail::at_position(src, src_path.at(t));
    const Drone r = detail::at_position(relay, relay_path.at(t));
    const Drone d = detail::at_position(dst, dst_path.at(t));
    const double a = detail::sampled_link(s, r, link);
    const double b = detail::sampled_link(r, d, link);
    two_hop.push_back(two_hop_rate(a, b, 1, link));
    up.push_back(a);
    down.push_back(b);
    d_src.push_back(distance(s.position, r.position));
    d_dst.push_back(distance(r.position, d.position));
  }
  out.link_bps = sampled_mean(two_hop);
  if (relay_path.is_static() || times.size() < 2) return out;

  const std::size_t near_src = static_cast<std::size_t>(
      std::min_element(d_src.begin(), d_src.end()) - d_src.begin());
  if (near_src + 1 >= times.size()) return out;
  const std::size_t near_dst = static_cast<std::size_t>(
      std::min_element(d_dst.begin() + static_cast<long>(near_src) + 1, d_dst.end()) - d_dst.begin());
  const std::size_t split = (near_src + near_dst) / 2;
  double collected = 0.0, delivered = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k <= split) {
      collected += up[k] * step_s;
    } else {
      delivered += down[k] * step_s;
    }
  }
  out.ferry_bps = std::min(collected, delivered) / (static_cast<double>(times.size()) * step_s);
  return out;
}

struct TrajectoryScenario {
  std::vector<Drone> drones;
  std::map<int, int> destination_of;
  std::map<int, Trajectory> trajectories;  // one per drone; single waypoint = static
  LinkModel link;
  MarketOptions options;
  std::map<int, int> quota_override;
};

struct DynamicMatchResult {
  Market market;                   // rates replaced by trajectory-aware scores
  Matching matching;
  std::map<int, RelayMode> modes;  // per matched source
};

// Scores every (source, relay) pair by max(time-averaged relay rate, ferry
// rate), ranks on those scores and runs deferred acceptance.
inline DynamicMatchResult dynamic_match(const TrajectoryScenario& in,
                                        double horizon_s = kDefaultHorizonS,
                                        double step_s = kDefaultStepS) {
  const std::vector<double> times = sample_times(horizon_s, step_s);
  std::vector<Drone> snapshot;
  for (const Drone& d : in.drones) {
    auto it = in.trajectories.find(d.id);
    if (it == in.trajectories.end()) {
      throw Error(ErrorKind::kConfiguration, "drone " + std::to_string(d.id) + " has no trajectory");
    }
    snapshot.push_back(detail::at_position(d, it->second.at(0.0)));
  }
  DynamicMatchResult out;
  Market& m = out.market;
  m = build_market(snapshot, in.destination_of, in.link, in.options, in.quota_override);
  std::vector<std::vector<RelayMode>> mode(m.num_sources(),
                                           std::vector<RelayMode>(m.num_relays(), RelayMode::kStatic));
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    const Drone& src = m.sources[s];
    const Drone& dst = *m.destination(m.destination_of[s]);
    const Trajectory& sp = in.trajectories.at(src.id);
    const Trajectory& dp = in.trajectories.at(dst.id);
    if (m.options.direct_links) {
      std::vector<double> direct;
      for (double t : times) {
        direct.push_back(detail::sampled_link(detail::at_position(src, sp.at(t)),
                                              detail::at_position(dst, dp.at(t)), m.link));
      }
      m.direct_bps[s] = sampled_mean(direct);
    }
    for (std::size_t r = 0; r < m.num_relays(); ++r) {
      const Drone& relay = m.relays[r];
      const RelayScores sc = score_relay(src, sp, relay, in.trajectories.at(relay.id), dst, dp,
                                         times, step_s, m.link);
      if (sc.ferry_bps > sc.link_bps) {
        m.relay_bps[s][r] = sc.ferry_bps;
        mode[s][r] = RelayMode::kFerry;
      } else {
        m.relay_bps[s][r] = sc.link_bps;
      }
    }
  }
  for (std::size_t s = 0; s < m.num_sources(); ++s) m.source_prefs[s] = build_source_prefs(m, s);
  for (std::size_t r = 0; r < m.num_relays(); ++r) m.relay_prefs[r] = build_relay_prefs(m, r);
  out.matching = match_class1(m);
  for (const auto& [sid, a] : out.matching.assignment) {
    if (!a) continue;
    out.modes[sid] = mode[static_cast<std::size_t>(m.source_index(sid))]
                         [static_cast<std::size_t>(m.relay_index(a->relay_id))];
  }
  return out;
}

struct PerturbationEvent {
  int at_iteration = 0;
  std::vector<int> departures;            // source ids
  std::vector<Drone> arrivals;            // new sources
  std::map<int, int> arrival_destination;  // arrival id -> destination id

  bool empty() const { return departures.empty() && arrivals.empty(); }

  std::string tag() const {
    std::string out;
    if (!departures.empty()) out += "departure:" + std::to_string(departures.size());
    if (!arrivals.empty()) {
      if (!out.empty()) out += ";";
      out += "arrival:" + std::to_string(arrivals.size());
    }
    return out;
  }
};

struct DynamicState {
  Market market;
  Matching matching;
  std::map<int, PreferenceList> cache;  // last preference list per player id
  int iteration = 0;
  int events_applied = 0;
  // Deferred-acceptance progress; resumable while no departed source ever
  // proposed.
  ProposalSnapshot proposals;
  bool proposals_resumable = true;
  std::set<int> unplaced;  // arrivals not yet seen by the engine
};

inline DynamicState make_dynamic_state(Market market) {
  DynamicState st;
  st.market = std::move(market);
  st.matching = Matching::empty_for(st.market);
  for (const PreferenceList& p : st.market.source_prefs) st.cache[p.owner] = p;
  for (const PreferenceList& p : st.market.relay_prefs) st.cache[p.owner] = p;
  return st;
}

namespace detail {

inline void erase_source(Market& m, std::size_t s) {
  const auto at = static_cast<long>(s);
  m.sources.erase(m.sources.begin() + at);
  m.destination_of.erase(m.destination_of.begin() + at);
  m.demand_units.erase(m.demand_units.begin() + at);
  m.direct_bps.erase(m.direct_bps.begin() + at);
  m.relay_bps.erase(m.relay_bps.begin() + at);
  m.source_prefs.erase(m.source_prefs.begin() + at);
}

inline std::size_t insert_source(Market& m, const Drone& d, int destination) {
  auto pos = std::lower_bound(m.sources.begin(), m.sources.end(), d.id,
                              [](const Drone& x, int id) { return x.id < id; });
  const auto at = pos - m.sources.begin();
  m.sources.insert(pos, d);
  m.destination_of.insert(m.destination_of.begin() + at, destination);
  m.demand_units.insert(m.demand_units.begin() + at, 1);
  m.direct_bps.insert(m.direct_bps.begin() + at, 0.0);
  m.relay_bps.insert(m.relay_bps.begin() + at, std::vector<double>{});
  m.source_prefs.insert(m.source_prefs.begin() + at, PreferenceList{});
  const std::size_t s = static_cast<std::size_t>(at);
  compute_source_row(m, s);
  m.source_prefs[s] = build_source_prefs(m, s);
  return s;
}

}  // namespace detail

// Removes departing sources and inserts arrivals. Surviving sources keep
// their cached preference lists and assignments; relay lists are rebuilt
// because their applicant pool changed.
inline DynamicState apply_perturbation(DynamicState state, const PerturbationEvent& event) {
  if (event.at_iteration != state.iteration) {
    throw Error(ErrorKind::kValidation, "perturbation scheduled at iteration " +
                                            std::to_string(event.at_iteration) +
                                            " applied at iteration " + std::to_string(state.iteration));
  }
  Market& m = state.market;
  std::set<int> leaving;
  for (int id : event.departures) {
    if (m.source_index(id) < 0 || !leaving.insert(id).second) {
      throw Error(ErrorKind::kValidation, "departure of unknown source " + std::to_string(id));
    }
  }
  for (const Drone& d : event.arrivals) {
    if (m.source_index(d.id) >= 0 || m.relay_index(d.id) >= 0 || m.destination(d.id) != nullptr) {
      throw Error(ErrorKind::kValidation, "arriving drone id " + std::to_string(d.id) + " is not fresh");
    }
    if (!event.arrival_destination.contains(d.id)) {
      throw Error(ErrorKind::kConfiguration, "arriving source " + std::to_string(d.id) + " has no destination");
    }
    if (auto v = drone_violations(d); !v.empty()) throw Error(ErrorKind::kValidation, v);
  }
  ++state.events_applied;
  if (event.empty()) return state;

  for (int id : leaving) {
    detail::erase_source(m, static_cast<std::size_t>(m.source_index(id)));
    state.matching.assignment.erase(id);
    state.cache.erase(id);
    state.unplaced.erase(id);
    auto made = state.proposals.proposals_made.find(id);
    if (made != state.proposals.proposals_made.end()) {
      if (made->second > 0) state.proposals_resumable = false;
      state.proposals.proposals_made.erase(made);
    }
    state.proposals.held_by.erase(id);
  }
  for (const Drone& d : event.arrivals) {
    Drone src = d;
    src.role = Role::kSource;
    const std::size_t s = detail::insert_source(m, src, event.arrival_destination.at(d.id));
    state.cache[src.id] = m.source_prefs[s];
    state.matching.assignment[src.id] = std::nullopt;
    state.unplaced.insert(src.id);
  }
  for (std::size_t r = 0; r < m.num_relays(); ++r) {
    m.relay_prefs[r] = build_relay_prefs(m, r);
    state.cache[m.relays[r].id] = m.relay_prefs[r];
  }
  return state;
}

// Any of the three engines behind one steppable interface.
class EngineRun {
 public:
  EngineRun(const Market& market, MatchingClass cls, ExchangeOptions options = {})
      : cls_(cls), engine_(make_cold(market, cls, options)) {}

  // Seeded from the previous outcome held in `state`.
  EngineRun(const DynamicState& state, MatchingClass cls, ExchangeOptions options = {})
      : cls_(cls), engine_(make_warm(state, cls, options)) {}

  // One engine iteration. Returns true when the state changed.
  bool step() {
    if (finished_) return false;
    return std::visit(
        [this](auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, ExchangeSearch>) {
            const bool changed = e.step();
            finished_ = e.converged();
            return changed;
          } else {
            const bool changed = e.step();
            finished_ = !changed;
            return changed;
          }
        },
        engine_);
  }

  bool finished() const { return finished_; }
  MatchingClass matching_class() const { return cls_; }

  Matching matching() const {
    return std::visit([](const auto& e) { return e.matching(); }, engine_);
  }

  // Iterations that did work: proposal rounds, or state-changing exchange
  // iterations.
  int iterations_used() const {
    return std::visit(
        [](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, ExchangeSearch>) {
            return e.improving_steps();
          } else {
            return e.rounds();
          }
        },
        engine_);
  }

  int steps() const {
    return std::visit(
        [](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, ExchangeSearch>) {
            return e.steps();
          } else {
            return e.rounds() + 1;
          }
        },
        engine_);
  }

  std::optional<ProposalSnapshot> snapshot() const {
    return std::visit(
        [](const auto& e) -> std::optional<ProposalSnapshot> {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, ExchangeSearch>) {
            return std::nullopt;
          } else {
            return e.snapshot();
          }
        },
        engine_);
  }

 private:
  using Engine = std::variant<DeferredAcceptance, ResourceAcceptance, ExchangeSearch>;

  static Engine make_cold(const Market& m, MatchingClass cls, ExchangeOptions options) {
    switch (cls) {
      case MatchingClass::kSubstitutable: return Engine(std::in_place_type<DeferredAcceptance>, m);
      case MatchingClass::kPartial: return Engine(std::in_place_type<ResourceAcceptance>, m);
      case MatchingClass::kNonSubstitutable: break;
    }
    return Engine(std::in_place_type<ExchangeSearch>, m, options);
  }

  static Engine make_warm(const DynamicState& st, MatchingClass cls, ExchangeOptions options) {
    switch (cls) {
      case MatchingClass::kSubstitutable:
        if (st.proposals_resumable) {
          return Engine(std::in_place_type<DeferredAcceptance>, st.market, st.proposals);
        }
        return Engine(std::in_place_type<DeferredAcceptance>, st.market);
      case MatchingClass::kPartial: {
        ProposalSnapshot held;
        for (const auto& [sid, a] : st.matching.assignment) {
          if (a) held.held_by[sid] = a->relay_id;
        }
        return Engine(std::in_place_type<ResourceAcceptance>, st.market, held);
      }
      case MatchingClass::kNonSubstitutable: break;
    }
    Matching initial = st.matching;
    for (int id : st.unplaced) initial.assignment.erase(id);
    return Engine(std::in_place_type<ExchangeSearch>, st.market, initial, options);
  }

  MatchingClass cls_;
  Engine engine_;
  bool finished_ = false;
};

struct RematchResult {
  Matching matching;
  int iterations_used = 0;
};

// Stores the engine outcome back into `state` after a run.
inline void commit(DynamicState& state, const EngineRun& run) {
  state.matching = run.matching();
  if (auto snap = run.snapshot()) {
    state.proposals = *snap;
    state.proposals_resumable = true;
  } else {
    state.proposals = {};
    state.proposals_resumable = false;
  }
  state.unplaced.clear();
}

// Re-runs `cls` seeded from the previous matching: kept assignments are the
// starting point and only displaced or new sources search.
inline RematchResult rematch_incremental(DynamicState& state, MatchingClass cls,
                                         ExchangeOptions options = {}) {
  EngineRun run(state, cls, options);
  while (!run.finished()) {
    if (cls == MatchingClass::kNonSubstitutable && run.steps() >= options.max_iterations) {
      const Matching best = run.matching();
      throw TerminationCapError("incremental re-matching hit its iteration cap", best,
                                global_satisfaction(state.market, best, cls));
    }
    run.step();
  }
  commit(state, run);
  return {state.matching, run.iterations_used()};
}

// Cold reference run on the same market, for comparison.
inline RematchResult rematch_cold(const Market& market, MatchingClass cls,
                                  ExchangeOptions options = {}) {
  EngineRun run(market, cls, options);
  while (!run.finished()) {
    if (cls == MatchingClass::kNonSubstitutable && run.steps() >= options.max_iterations) {
      const Matching best = run.matching();
      throw TerminationCapError("cold re-matching hit its iteration cap", best,
                                global_satisfaction(market, best, cls));
    }
    run.step();
  }
  return {run.matching(), run.iterations_used()};
}

}  // namespace uavmatch
