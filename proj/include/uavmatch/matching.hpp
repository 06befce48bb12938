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

// Matching outcomes, class semantics, feasibility checks and the global
// satisfaction objective.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uavmatch/error.hpp"
#include "uavmatch/model.hpp"
#include "uavmatch/preferences.hpp"

namespace uavmatch {

// The three market classes, by how applicants compete for a relay.
enum class MatchingClass {
  kSubstitutable,     // fixed quotas, rank alone decides (class I)
  kPartial,           // resource-constrained acceptance (class II)
  kNonSubstitutable,  // shared radios, global outcome decides (class III)
};

constexpr std::string_view to_string(MatchingClass c) {
  switch (c) {
    case MatchingClass::kSubstitutable: return "I";
    case MatchingClass::kPartial: return "II";
    case MatchingClass::kNonSubstitutable: return "III";
  }
  return "?";
}

inline std::optional<MatchingClass> parse_matching_class(std::string_view s) {
  if (s == "I" || s == "1") return MatchingClass::kSubstitutable;
  if (s == "II" || s == "2") return MatchingClass::kPartial;
  if (s == "III" || s == "3") return MatchingClass::kNonSubstitutable;
  return std::nullopt;
}

struct Assignment {
  int relay_id = -1;
  int radio = 0;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

// Source id -> (relay, radio) or unmatched. Every source of the market has
// an entry; relay-side occupancy is derived.
struct Matching {
  std::map<int, std::optional<Assignment>> assignment;

  static Matching empty_for(const Market& m) {
    Matching out;
    for (const Drone& s : m.sources) out.assignment.emplace(s.id, std::nullopt);
    return out;
  }

  std::optional<Assignment> of(int source_id) const {
    auto it = assignment.find(source_id);
    return it == assignment.end() ? std::nullopt : it->second;
  }

  void assign(int source_id, int relay_id, int radio) {
    assignment[source_id] = Assignment{relay_id, radio};
  }
  void unassign(int source_id) { assignment[source_id] = std::nullopt; }

  std::size_t matched_count() const {
    std::size_t n = 0;
    for (const auto& [id, a] : assignment) n += a.has_value() ? 1 : 0;
    return n;
  }

  // Sources on one radio, ascending id.
  std::vector<int> occupants(int relay_id, int radio) const {
    std::vector<int> out;
    for (const auto& [id, a] : assignment) {
      if (a && a->relay_id == relay_id && a->radio == radio) out.push_back(id);
    }
    return out;
  }

  // Sources held by a relay over all radios, ascending id.
  std::vector<int> held_by(int relay_id) const {
    std::vector<int> out;
    for (const auto& [id, a] : assignment) {
      if (a && a->relay_id == relay_id) out.push_back(id);
    }
    return out;
  }

  friend bool operator==(const Matching&, const Matching&) = default;
};

// Resource units in use at a relay under `matching`.
inline int used_units(const Market& m, const Matching& matching, int relay_id) {
  int used = 0;
  for (int sid : matching.held_by(relay_id)) {
    used += m.demand_units[static_cast<std::size_t>(m.source_index(sid))];
  }
  return used;
}

inline int residual_units(const Market& m, const Matching& matching, int relay_id) {
  const int r = m.relay_index(relay_id);
  return m.relays[static_cast<std::size_t>(r)].resource_capacity -
         used_units(m, matching, relay_id);
}

// Rate a source achieves on relay index r given `sharers` sources on its
// radio. Only class III shares radios.
inline double assigned_bps(const Market& m, MatchingClass cls, std::size_t s, std::size_t r,
                           int sharers) {
  switch (cls) {
    case MatchingClass::kSubstitutable:
      return std::min(m.relay_bps[s][r], m.block_bps[r]);
    case MatchingClass::kPartial:
      return m.relay_bps[s][r];
    case MatchingClass::kNonSubstitutable:
      return m.relay_bps[s][r] / static_cast<double>(std::max(1, sharers));
  }
  return 0.0;
}

inline double achieved_bps(const Market& m, const Matching& matching, MatchingClass cls,
                           int source_id) {
  const std::size_t s = static_cast<std::size_t>(m.source_index(source_id));
  const auto a = matching.of(source_id);
  if (!a) return m.direct_bps[s];
  const std::size_t r = static_cast<std::size_t>(m.relay_index(a->relay_id));
  const int sharers = cls == MatchingClass::kNonSubstitutable
                          ? static_cast<int>(matching.occupants(a->relay_id, a->radio).size())
                          : 1;
  return assigned_bps(m, cls, s, r, sharers);
}

// Mean over sources of min(1, achieved / demanded). Unmatched sources count
// with their direct-link rate. An empty market scores 0.
inline double global_satisfaction(const Market& m, const Matching& matching, MatchingClass cls) {
  if (m.num_sources() == 0) return 0.0;
  std::map<Assignment, int> sharers;
  for (const auto& [id, a] : matching.assignment) {
    if (a) ++sharers[*a];
  }
  double total = 0.0;
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    const auto a = matching.of(m.sources[s].id);
    double rate = m.direct_bps[s];
    if (a) {
      const std::size_t r = static_cast<std::size_t>(m.relay_index(a->relay_id));
      rate = assigned_bps(m, cls, s, r, sharers[*a]);
    }
    total += satisfaction(rate, m.sources[s].demand_bps).value();
  }
  return total / static_cast<double>(m.num_sources());
}

// Every violated feasibility invariant of `matching` under `cls`.
inline std::vector<std::string> matching_violations(const Market& m, const Matching& matching,
                                                    MatchingClass cls) {
  std::vector<std::string> out;
  for (const Drone& s : m.sources) {
    if (!matching.assignment.contains(s.id)) {
      out.push_back("source " + std::to_string(s.id) + " missing from matching");
    }
  }
  std::map<int, int> per_relay;
  std::map<Assignment, int> per_radio;
  std::map<int, int> units;
  for (const auto& [sid, a] : matching.assignment) {
    const int s = m.source_index(sid);
    if (s < 0) {
      out.push_back("matching references unknown source " + std::to_string(sid));
      continue;
    }
    if (!a) continue;
    const int r = m.relay_index(a->relay_id);
    if (r < 0) {
      out.push_back("source " + std::to_string(sid) + " assigned to unknown relay " +
                    std::to_string(a->relay_id));
      continue;
    }
    const Drone& relay = m.relays[static_cast<std::size_t>(r)];
    if (a->radio < 0 || a->radio >= std::max(1, relay.radio_count)) {
      out.push_back("source " + std::to_string(sid) + " on radio " + std::to_string(a->radio) +
                    " of relay " + std::to_string(relay.id) + " which has " +
                    std::to_string(relay.radio_count));
    }
    if (!m.source_prefs[static_cast<std::size_t>(s)].accepts(relay.id)) {
      out.push_back("relay " + std::to_string(relay.id) + " unacceptable to source " +
                    std::to_string(sid));
    }
    if (!m.relay_prefs[static_cast<std::size_t>(r)].accepts(sid)) {
      out.push_back("source " + std::to_string(sid) + " unacceptable to relay " +
                    std::to_string(relay.id));
    }
    ++per_relay[relay.id];
    ++per_radio[*a];
    units[relay.id] += m.demand_units[static_cast<std::size_t>(s)];
  }
  for (std::size_t r = 0; r < m.num_relays(); ++r) {
    const int id = m.relays[r].id;
    if (cls == MatchingClass::kSubstitutable && per_relay[id] > m.quotas[r]) {
      out.push_back("relay " + std::to_string(id) + " holds " + std::to_string(per_relay[id]) +
                    " sources over quota " + std::to_string(m.quotas[r]));
    }
    if (cls == MatchingClass::kPartial && units[id] > m.relays[r].resource_capacity) {
      out.push_back("relay " + std::to_string(id) + " uses " + std::to_string(units[id]) +
                    " units over capacity " + std::to_string(m.relays[r].resource_capacity));
    }
  }
  if (cls == MatchingClass::kSubstitutable) {
    for (const auto& [a, n] : per_radio) {
      if (n > 1) {
        out.push_back("radio " + std::to_string(a.radio) + " of relay " +
                      std::to_string(a.relay_id) + " serves " + std::to_string(n) + " sources");
      }
    }
  }
  return out;
}

inline void validate_matching(const Market& m, const Matching& matching, MatchingClass cls) {
  const auto violations = matching_violations(m, matching, cls);
  if (violations.empty()) return;
  std::string msg = "inconsistent matching:";
  for (const auto& v : violations) msg += "\n  - " + v;
  throw Error(ErrorKind::kValidation, msg);
}

// Raised when an iterative engine hits its iteration cap; carries the best
// matching seen so far.
class TerminationCapError : public Error {
 public:
  TerminationCapError(const std::string& what, Matching best, double best_satisfaction)
      : Error(ErrorKind::kTerminationCap, what),
        best_(std::move(best)),
        best_satisfaction_(best_satisfaction) {}

  const Matching& best() const { return best_; }
  double best_satisfaction() const { return best_satisfaction_; }

 private:
  Matching best_;
  double best_satisfaction_;
};

}  // namespace uavmatch
