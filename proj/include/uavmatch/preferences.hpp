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

// Ranked preference lists and the two-sided market they define.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uavmatch/error.hpp"
#include "uavmatch/model.hpp"

namespace uavmatch {

// Scores closer than this are treated as tied and ordered by id.
inline constexpr double kScoreTolerance = 1e-9;

struct Candidate {
  int id = 0;
  double score = 0.0;
  int units = 1;  // resource units the candidate would consume (relay side)

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Strict ranking held by one player over acceptable players of the other
// side. `ranked` only holds candidates whose score exceeds `cutoff`.
struct PreferenceList {
  int owner = 0;
  std::vector<Candidate> ranked;
  double cutoff = 0.0;

  std::size_t size() const { return ranked.size(); }
  bool empty() const { return ranked.empty(); }

  // Position in the ranking, or -1 when unacceptable.
  int rank_of(int id) const {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (ranked[i].id == id) return static_cast<int>(i);
    }
    return -1;
  }

  bool accepts(int id) const { return rank_of(id) >= 0; }

  // True when `a` is ranked strictly above `b`. `b` may be unacceptable (or
  // -1 meaning "nobody"), in which case any acceptable `a` wins.
  bool prefers(int a, int b) const {
    const int ra = rank_of(a);
    if (ra < 0) return false;
    const int rb = b < 0 ? -1 : rank_of(b);
    return rb < 0 || ra < rb;
  }

  friend bool operator==(const PreferenceList&, const PreferenceList&) = default;
};

inline bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score > b.score + kScoreTolerance) return true;
  if (b.score > a.score + kScoreTolerance) return false;
  return a.id < b.id;
}

// Builds a ranked list from raw scores. Ties within kScoreTolerance go to
// the lower id. Insertion sort: the tolerant comparison is not a strict weak
// order, so std::sort is not an option, and lists are short.
inline PreferenceList make_preference_list(int owner, std::vector<Candidate> candidates,
                                           double cutoff) {
  PreferenceList list;
  list.owner = owner;
  list.cutoff = cutoff;
  for (const Candidate& c : candidates) {
    if (c.id == owner) {
      throw Error(ErrorKind::kValidation,
                  "player " + std::to_string(owner) + " listed in its own preferences");
    }
    if (!(c.score > cutoff)) continue;
    auto pos = list.ranked.end();
    while (pos != list.ranked.begin() && ranks_before(c, *(pos - 1))) --pos;
    for (const Candidate& held : list.ranked) {
      if (held.id == c.id) {
        throw Error(ErrorKind::kValidation, "candidate " + std::to_string(c.id) +
                                                " listed twice by " + std::to_string(owner));
      }
    }
    list.ranked.insert(pos, c);
  }
  return list;
}

// Ceiling division of a demand into resource units; one unit when resource
// accounting is off.
inline int resource_units(double demand_bps, double unit_bps) {
  if (!(unit_bps > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::ceil(demand_bps / unit_bps - 1e-12)));
}

struct MarketOptions {
  // Throughput carried by one resource unit; 0 disables resource accounting.
  double resource_unit_bps = 0.0;
  // Unmatched sources fall back to their direct link when enabled.
  bool direct_links = true;
  // Optional task-priority term in relay scores, off by default.
  double priority_weight = 0.0;
  // Fixed-quota relays: capacity is split into quota equal blocks and every
  // held source is capped at one block. Needs resource accounting.
  bool fixed_blocks = false;
};

// Ranks relays for one source by two-hop rate (sharers = 1). Relays that do
// not beat the direct link fall below the cutoff.
inline PreferenceList rank_relays(int source_id, std::span<const int> relay_ids,
                                  std::span<const double> relay_bps, double direct_bps) {
  std::vector<Candidate> candidates;
  candidates.reserve(relay_ids.size());
  for (std::size_t r = 0; r < relay_ids.size(); ++r) {
    candidates.push_back({relay_ids[r], relay_bps[r], 1});
  }
  return make_preference_list(source_id, std::move(candidates), direct_bps);
}

inline PreferenceList build_source_prefs(const Drone& source, const Drone* destination,
                                         std::span<const Drone> relays, const LinkModel& link,
                                         bool direct_links = true) {
  if (destination == nullptr) {
    throw Error(ErrorKind::kConfiguration,
                "source " + std::to_string(source.id) + " has no destination");
  }
  std::vector<int> ids;
  std::vector<double> rates;
  for (const Drone& relay : relays) {
    ids.push_back(relay.id);
    rates.push_back(relay_rate(source, relay, *destination, 1, link));
  }
  const double direct = direct_links ? link_rate(source, *destination, link) : 0.0;
  return rank_relays(source.id, ids, rates, direct);
}

struct Applicant {
  int id = 0;
  double rate_bps = 0.0;  // achievable through this relay, sharers = 1
  int units = 1;          // resource units the applicant would consume
  int priority = 1;
};

// Efficiency score: rate delivered per resource unit consumed.
inline double efficiency_score(const Applicant& a, double priority_weight = 0.0) {
  double score = a.rate_bps / static_cast<double>(std::max(1, a.units));
  if (priority_weight > 0.0) score *= 1.0 + priority_weight / static_cast<double>(a.priority);
  return score;
}

inline PreferenceList build_relay_prefs(const Drone& relay, std::span<const Applicant> applicants,
                                        double priority_weight = 0.0) {
  std::vector<Candidate> candidates;
  candidates.reserve(applicants.size());
  for (const Applicant& a : applicants) {
    candidates.push_back({a.id, efficiency_score(a, priority_weight), a.units});
  }
  return make_preference_list(relay.id, std::move(candidates), 0.0);
}

// One matching instance. All per-player vectors are aligned with the
// id-sorted `sources` / `relays` vectors.
struct Market {
  LinkModel link;
  MarketOptions options;
  std::vector<Drone> sources;
  std::vector<Drone> relays;
  std::vector<Drone> destinations;
  std::vector<int> destination_of;                 // per source: destination id
  std::vector<int> quotas;                         // per relay
  std::vector<int> demand_units;                   // per source
  std::vector<double> direct_bps;                  // per source, 0 without direct link
  std::vector<std::vector<double>> relay_bps;      // [source][relay], sharers = 1
  std::vector<double> block_bps;                   // per relay, fixed-quota block cap
  std::vector<PreferenceList> source_prefs;
  std::vector<PreferenceList> relay_prefs;

  std::size_t num_sources() const { return sources.size(); }
  std::size_t num_relays() const { return relays.size(); }

  int source_index(int id) const { return index_in(sources, id); }
  int relay_index(int id) const { return index_in(relays, id); }

  const Drone* destination(int id) const {
    const int i = index_in(destinations, id);
    return i < 0 ? nullptr : &destinations[static_cast<std::size_t>(i)];
  }

 private:
  static int index_in(const std::vector<Drone>& drones, int id) {
    auto it = std::lower_bound(drones.begin(), drones.end(), id,
                               [](const Drone& d, int key) { return d.id < key; });
    if (it == drones.end() || it->id != id) return -1;
    return static_cast<int>(it - drones.begin());
  }
};

// Per-relay fixed block cap used by fixed-quota (substitutable) engines when
// resource accounting is on: the capacity split evenly across the quota.
inline double fixed_block_bps(const Drone& relay, int quota, double unit_bps) {
  if (!(unit_bps > 0.0)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(relay.resource_capacity / std::max(1, quota)) * unit_bps;
}

inline PreferenceList build_relay_prefs(const Market& m, std::size_t relay) {
  std::vector<Applicant> applicants;
  applicants.reserve(m.num_sources());
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    applicants.push_back({m.sources[s].id, std::min(m.relay_bps[s][relay], m.block_bps[relay]),
                          m.demand_units[s], m.sources[s].priority});
  }
  return build_relay_prefs(m.relays[relay], applicants, m.options.priority_weight);
}

inline PreferenceList build_source_prefs(const Market& m, std::size_t source) {
  std::vector<int> ids;
  std::vector<double> rates(m.num_relays());
  for (std::size_t r = 0; r < m.num_relays(); ++r) {
    ids.push_back(m.relays[r].id);
    rates[r] = std::min(m.relay_bps[source][r], m.block_bps[r]);
  }
  return rank_relays(m.sources[source].id, ids, rates, m.direct_bps[source]);
}

// Fills rate tables and preference lists for one source row.
inline void compute_source_row(Market& m, std::size_t s) {
  const Drone& src = m.sources[s];
  const Drone* dst = m.destination(m.destination_of[s]);
  if (dst == nullptr) {
    throw Error(ErrorKind::kConfiguration, "source " + std::to_string(src.id) +
                                               " references unknown destination " +
                                               std::to_string(m.destination_of[s]));
  }
  m.demand_units[s] = resource_units(src.demand_bps, m.options.resource_unit_bps);
  m.direct_bps[s] = m.options.direct_links ? link_rate(src, *dst, m.link) : 0.0;
  m.relay_bps[s].assign(m.num_relays(), 0.0);
  for (std::size_t r = 0; r < m.num_relays(); ++r) {
    m.relay_bps[s][r] = relay_rate(src, m.relays[r], *dst, 1, m.link);
  }
}

// Builds a market from a drone snapshot. `destination_of` maps every source
// id to a destination id; `quota_override` replaces the default quota
// (radio_count) per relay id.
inline Market build_market(std::vector<Drone> drones, const std::map<int, int>& destination_of,
                           const LinkModel& link, const MarketOptions& options = {},
                           const std::map<int, int>& quota_override = {}) {
  Market m;
  m.link = link;
  m.options = options;
  std::sort(drones.begin(), drones.end(),
            [](const Drone& a, const Drone& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < drones.size(); ++i) {
    if (drones[i].id == drones[i - 1].id) {
      throw Error(ErrorKind::kValidation, "duplicate drone id " + std::to_string(drones[i].id));
    }
  }
  for (Drone& d : drones) {
    switch (d.role) {
      case Role::kSource: m.sources.push_back(d); break;
      case Role::kRelay: m.relays.push_back(d); break;
      case Role::kDestination: m.destinations.push_back(d); break;
    }
  }
  const std::size_t ns = m.num_sources();
  const std::size_t nr = m.num_relays();
  m.destination_of.resize(ns);
  m.demand_units.resize(ns);
  m.direct_bps.resize(ns);
  m.relay_bps.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    auto it = destination_of.find(m.sources[s].id);
    if (it == destination_of.end()) {
      throw Error(ErrorKind::kConfiguration,
                  "source " + std::to_string(m.sources[s].id) + " has no destination");
    }
    m.destination_of[s] = it->second;
    compute_source_row(m, s);
  }
  m.quotas.resize(nr);
  m.block_bps.resize(nr);
  for (std::size_t r = 0; r < nr; ++r) {
    auto it = quota_override.find(m.relays[r].id);
    m.quotas[r] = it == quota_override.end() ? m.relays[r].radio_count : it->second;
    if (m.quotas[r] < 1) {
      throw Error(ErrorKind::kValidation,
                  "relay " + std::to_string(m.relays[r].id) + " has quota < 1");
    }
    if (m.quotas[r] > m.relays[r].radio_count) {
      throw Error(ErrorKind::kValidation, "relay " + std::to_string(m.relays[r].id) +
                                              " has quota above its radio count");
    }
    m.block_bps[r] = options.fixed_blocks
                         ? fixed_block_bps(m.relays[r], m.quotas[r], options.resource_unit_bps)
                         : std::numeric_limits<double>::infinity();
  }
  m.source_prefs.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) m.source_prefs[s] = build_source_prefs(m, s);
  m.relay_prefs.resize(nr);
  for (std::size_t r = 0; r < nr; ++r) m.relay_prefs[r] = build_relay_prefs(m, r);
  return m;
}

// A market given directly by preference lists, for callers (multi-level
// route formation, tests) whose players are not physical sources/relays.
// Rates are left at zero, so only rank-based engines apply.
inline Market market_from_preferences(std::vector<PreferenceList> source_prefs,
                                      std::vector<PreferenceList> relay_prefs,
                                      std::vector<int> quotas) {
  if (quotas.size() != relay_prefs.size()) {
    throw Error(ErrorKind::kValidation, "one quota per relay required");
  }
  std::vector<std::size_t> so(source_prefs.size()), ro(relay_prefs.size());
  for (std::size_t i = 0; i < so.size(); ++i) so[i] = i;
  for (std::size_t i = 0; i < ro.size(); ++i) ro[i] = i;
  std::sort(so.begin(), so.end(),
            [&](std::size_t a, std::size_t b) { return source_prefs[a].owner < source_prefs[b].owner; });
  std::sort(ro.begin(), ro.end(),
            [&](std::size_t a, std::size_t b) { return relay_prefs[a].owner < relay_prefs[b].owner; });
  Market m;
  m.options.direct_links = false;
  for (std::size_t i : so) {
    Drone d;
    d.id = source_prefs[i].owner;
    d.role = Role::kSource;
    d.demand_bps = 1.0;
    m.sources.push_back(d);
    m.source_prefs.push_back(std::move(source_prefs[i]));
  }
  for (std::size_t i : ro) {
    Drone d;
    d.id = relay_prefs[i].owner;
    d.role = Role::kRelay;
    d.radio_count = quotas[i];
    m.relays.push_back(d);
    m.relay_prefs.push_back(std::move(relay_prefs[i]));
    if (quotas[i] < 1) {
      throw Error(ErrorKind::kValidation, "relay " + std::to_string(d.id) + " has quota < 1");
    }
    m.quotas.push_back(quotas[i]);
    m.block_bps.push_back(std::numeric_limits<double>::infinity());
  }
  for (std::size_t i = 1; i < m.sources.size(); ++i) {
    if (m.sources[i].id == m.sources[i - 1].id) {
      throw Error(ErrorKind::kValidation, "duplicate source id " + std::to_string(m.sources[i].id));
    }
  }
  const std::size_t ns = m.num_sources();
  m.destination_of.assign(ns, -1);
  m.demand_units.assign(ns, 1);
  m.direct_bps.assign(ns, 0.0);
  m.relay_bps.assign(ns, std::vector<double>(m.num_relays(), 0.0));
  return m;
}

// Checks the structural market invariants; empty string when consistent.
inline std::string market_violations(const Market& m) {
  std::string out;
  auto add = [&out](const std::string& msg) {
    if (!out.empty()) out += "; ";
    out += msg;
  };
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    const PreferenceList& p = m.source_prefs[s];
    if (p.owner != m.sources[s].id) add("source preference owner mismatch");
    for (const Candidate& c : p.ranked) {
      if (m.relay_index(c.id) < 0) {
        add("source " + std::to_string(p.owner) + " ranks non-relay " + std::to_string(c.id));
      }
    }
  }
  for (std::size_t r = 0; r < m.num_relays(); ++r) {
    const PreferenceList& p = m.relay_prefs[r];
    if (p.owner != m.relays[r].id) add("relay preference owner mismatch");
    for (const Candidate& c : p.ranked) {
      if (m.source_index(c.id) < 0) {
        add("relay " + std::to_string(p.owner) + " ranks non-source " + std::to_string(c.id));
      }
    }
    if (m.quotas[r] < 1) add("relay " + std::to_string(m.relays[r].id) + " has quota < 1");
  }
  return out;
}

}  // namespace uavmatch
