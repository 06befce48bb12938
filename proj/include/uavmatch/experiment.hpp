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

// Experiment orchestration: per-iteration metrics, perturbation replay, the
// oracle comparison, and the size sweep.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uavmatch/baselines.hpp"
#include "uavmatch/deferred_acceptance.hpp"
#include "uavmatch/dynamics.hpp"
#include "uavmatch/matching.hpp"
#include "uavmatch/resource_acceptance.hpp"
#include "uavmatch/rng.hpp"
#include "uavmatch/scenario.hpp"
#include "uavmatch/stability.hpp"

namespace uavmatch {

inline constexpr const char* kMetricsFormat = "v1";
inline constexpr const char* kCsvHeader =
    "iteration,global_satisfaction,matched_count,blocking_or_improving_count,event";

struct MetricsRecord {
  int iteration = 0;
  double global_satisfaction = 0.0;
  int matched_count = 0;
  int blocking_or_improving_count = 0;
  std::string event;
};

inline std::string record_violations(const MetricsRecord& r) {
  std::string out;
  if (r.iteration < 0) out += "negative iteration; ";
  if (!(r.global_satisfaction >= 0.0 && r.global_satisfaction <= 1.0)) {
    out += "satisfaction outside [0, 1]; ";
  }
  if (r.matched_count < 0) out += "negative matched_count; ";
  if (r.blocking_or_improving_count < 0) out += "negative blocking count; ";
  return out;
}

// Re-matching statistics for one applied perturbation.
struct EventReport {
  std::string tag;
  int at_iteration = 0;
  int incremental_iterations = 0;
  int cold_iterations = 0;
  // First iteration at which the engine had settled with no blocking pair or
  // improving move; -1 if never reached.
  int restabilized_at = -1;
};

struct ExperimentResult {
  std::string scenario;
  std::uint64_t seed = 0;
  MatchingClass matching_class = MatchingClass::kSubstitutable;
  std::vector<MetricsRecord> records;
  Market final_market;
  Matching final_matching;
  int initial_iterations = 0;
  int initial_settled_at = -1;
  int engine_steps = 0;
  std::vector<EventReport> events;
  std::optional<OracleResult> oracle;
};

namespace detail {

inline MetricsRecord snapshot_record(int iteration, const Market& m, const Matching& matching,
                                     MatchingClass cls, std::string event) {
  MetricsRecord r;
  r.iteration = iteration;
  r.global_satisfaction = global_satisfaction(m, matching, cls);
  r.matched_count = matching.matched_count();
  r.blocking_or_improving_count = static_cast<int>(verify_stability(m, matching, cls).size());
  r.event = std::move(event);
  if (auto v = record_violations(r); !v.empty()) {
    throw Error(ErrorKind::kValidation, "metrics record " + std::to_string(iteration) + ": " + v);
  }
  return r;
}

}  // namespace detail

// Runs one scenario end to end. Record 0 is the empty initial state; each
// later record follows one engine iteration. A perturbation scheduled at
// iteration t is applied after record t and the engine restarts warm from the
// surviving matching.
inline ExperimentResult run_experiment(const Scenario& sc) {
  const Deployment dep = deploy(sc);
  const std::vector<PerturbationEvent> events = resolve_events(sc, dep);
  const MatchingClass cls = sc.matching_class;
  ExchangeOptions opts;
  opts.max_iterations = sc.max_engine_iterations;

  ExperimentResult out;
  out.scenario = sc.name;
  out.seed = sc.seed;
  out.matching_class = cls;

  DynamicState state = make_dynamic_state(build_market(sc, dep));
  std::optional<EngineRun> run(std::in_place, state.market, cls, opts);
  bool committed = false;
  std::optional<std::size_t> current;  // index into out.events
  std::size_t next_event = 0;
  std::string pending_tag;

  for (int t = 0; t <= sc.iterations; ++t) {
    if (t > 0 && !run->finished()) {
      if (run->steps() >= sc.max_engine_iterations) {
        const Matching best = run->matching();
        throw TerminationCapError("scenario '" + sc.name + "': engine hit " +
                                      std::to_string(sc.max_engine_iterations) +
                                      " iterations without settling",
                                  best, global_satisfaction(state.market, best, cls));
      }
      run->step();
      ++out.engine_steps;
    }
    state.matching = run->matching();
    out.records.push_back(
        detail::snapshot_record(t, state.market, state.matching, cls, std::move(pending_tag)));
    pending_tag.clear();

    if (run->finished()) {
      if (!committed) {
        commit(state, *run);
        committed = true;
        if (current) {
          out.events[*current].incremental_iterations = run->iterations_used();
        } else {
          out.initial_iterations = run->iterations_used();
        }
      }
      int& settled = current ? out.events[*current].restabilized_at : out.initial_settled_at;
      if (settled < 0 && out.records.back().blocking_or_improving_count == 0) settled = t;
    }

    while (next_event < events.size() && events[next_event].at_iteration == t) {
      const PerturbationEvent& ev = events[next_event++];
      if (!committed) commit(state, *run);
      state.iteration = t;
      state = apply_perturbation(std::move(state), ev);
      EventReport rep;
      rep.tag = ev.tag();
      rep.at_iteration = t;
      rep.cold_iterations = rematch_cold(state.market, cls, opts).iterations_used;
      out.events.push_back(rep);
      current = out.events.size() - 1;
      run.emplace(state, cls, opts);
      committed = false;
      pending_tag += (pending_tag.empty() ? "" : ";") + rep.tag;
    }
  }
  if (!committed && run->finished()) commit(state, *run);
  out.final_market = state.market;
  out.final_matching = run->matching();
  validate_matching(out.final_market, out.final_matching, cls);
  if (sc.oracle_enabled) {
    out.oracle = brute_force_optimum(out.final_market, cls, sc.oracle_cap);
  }
  return out;
}

inline std::string format_fixed(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << kCsvHeader << '\n';
  for (const MetricsRecord& r : records) {
    os << r.iteration << ',' << format_fixed(r.global_satisfaction) << ',' << r.matched_count << ','
       << r.blocking_or_improving_count << ',' << r.event << '\n';
  }
}

// Run summary. Every field is a deterministic function of the scenario;
// wall-clock timings are opt-in because they break byte-identical output.
inline nlohmann::ordered_json summary_json(const ExperimentResult& r,
                                           std::optional<double> wall_seconds = std::nullopt) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["metrics_format"] = kMetricsFormat;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["matching_class"] = to_string(r.matching_class);
  const double final_sat = global_satisfaction(r.final_market, r.final_matching, r.matching_class);
  j["final_satisfaction"] = final_sat;
  j["final_matched_count"] = r.final_matching.matched_count();
  j["final_blocking_or_improving_count"] =
      r.records.empty() ? 0 : r.records.back().blocking_or_improving_count;
  ordered_json assignments = ordered_json::array();
  for (const auto& [sid, a] : r.final_matching.assignment) {
    ordered_json e;
    e["source"] = sid;
    if (a) {
      e["relay"] = a->relay_id;
      e["radio"] = a->radio;
    } else {
      e["relay"] = nullptr;
      e["radio"] = nullptr;
    }
    assignments.push_back(e);
  }
  j["final_matching"] = assignments;
  ordered_json work;
  work["engine_steps"] = r.engine_steps;
  work["initial_iterations"] = r.initial_iterations;
  work["initial_settled_at"] = r.initial_settled_at;
  j["work"] = work;
  ordered_json evs = ordered_json::array();
  for (const EventReport& e : r.events) {
    ordered_json x;
    x["event"] = e.tag;
    x["at_iteration"] = e.at_iteration;
    x["incremental_iterations"] = e.incremental_iterations;
    x["cold_iterations"] = e.cold_iterations;
    x["restabilized_at"] = e.restabilized_at;
    evs.push_back(x);
  }
  j["events"] = evs;
  if (r.oracle) {
    ordered_json o;
    o["optimum"] = r.oracle->optimum;
    o["enumerated"] = r.oracle->enumerated;
    o["gap"] = r.oracle->optimum - final_sat;
    j["oracle"] = o;
  } else {
    j["oracle"] = nullptr;
  }
  if (wall_seconds) j["timings"] = {{"wall_s", *wall_seconds}};
  return j;
}

struct SweepRow {
  int size = 0;
  MatchingClass engine = MatchingClass::kSubstitutable;
  int replications = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

inline std::uint64_t replication_seed(std::uint64_t base, int size, int rep) {
  Rng rng(base, Rng::stream_id("sweep") + (static_cast<std::uint64_t>(size) << 20) +
                    static_cast<std::uint64_t>(rep));
  return rng.next();
}

// Scenario template resized to `sources` by rewriting the first source
// generator block.
inline Scenario resized(const Scenario& tmpl, int sources, std::uint64_t seed) {
  Scenario sc = tmpl;
  sc.seed = seed;
  for (GeneratorSpec& g : sc.generate) {
    if (g.role == Role::kSource) {
      g.count = sources;
      return sc;
    }
  }
  throw Error(ErrorKind::kConfiguration,
              "sweep template '" + tmpl.name + "' has no source generate block");
}

// Class I (fixed quota) versus Class II on identical markets per replication.
inline std::vector<SweepRow> sweep(const Scenario& tmpl, const std::vector<int>& sizes,
                                   int replications) {
  if (sizes.empty()) throw Error(ErrorKind::kConfiguration, "sweep needs at least one size");
  if (replications < 1) throw Error(ErrorKind::kConfiguration, "sweep needs replications >= 1");
  std::vector<SweepRow> rows;
  for (int size : sizes) {
    if (size < 0) throw Error(ErrorKind::kConfiguration, "sweep sizes must be >= 0");
    std::vector<double> s1, s2;
    for (int rep = 0; rep < replications; ++rep) {
      Scenario sc = resized(tmpl, size, replication_seed(tmpl.seed, size, rep));
      const Deployment dep = deploy(sc);
      sc.matching_class = MatchingClass::kSubstitutable;
      const Market m1 = build_market(sc, dep);
      sc.matching_class = MatchingClass::kPartial;
      const Market m2 = build_market(sc, dep);
      s1.push_back(global_satisfaction(m1, match_class1(m1), MatchingClass::kSubstitutable));
      s2.push_back(global_satisfaction(m2, match_class2(m2), MatchingClass::kPartial));
    }
    for (auto [cls, xs] : {std::pair{MatchingClass::kSubstitutable, &s1},
                           std::pair{MatchingClass::kPartial, &s2}}) {
      double mean = 0.0;
      for (double x : *xs) mean += x;
      mean /= static_cast<double>(xs->size());
      double var = 0.0;
      for (double x : *xs) var += (x - mean) * (x - mean);
      var /= static_cast<double>(xs->size());
      rows.push_back({size, cls, replications, mean, std::sqrt(var)});
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "size,engine,replications,mean_satisfaction,std_satisfaction\n";
  for (const SweepRow& r : rows) {
    os << r.size << ',' << to_string(r.engine) << ',' << r.replications << ','
       << format_fixed(r.mean) << ',' << format_fixed(r.stddev) << '\n';
  }
}

}  // namespace uavmatch
