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

// Command-line front end: run, sweep, oracle and validate verbs.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavmatch/uavmatch.hpp"

namespace fs = std::filesystem;
using namespace uavmatch;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string engine;
};

Scenario load_with_overrides(const std::string& path, const Overrides& o) {
  Scenario sc = load_scenario(path);
  if (o.seed) sc.seed = *o.seed;
  if (!o.engine.empty()) {
    auto cls = parse_matching_class(o.engine);
    if (!cls) throw Error(ErrorKind::kConfiguration, "--engine must be I, II or III");
    sc.matching_class = *cls;
  }
  return sc;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kConfiguration, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw Error(ErrorKind::kConfiguration, "cannot write " + (dir / name).string());
  return os;
}

int cmd_run(const std::string& path, const Overrides& o, const fs::path& out, bool timings) {
  const Scenario sc = load_with_overrides(path, o);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(sc);
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;
  {
    auto os = open_output(out, "metrics.csv");
    write_metrics_csv(os, r.records);
  }
  {
    auto os = open_output(out, "summary.json");
    os << summary_json(r, timings ? std::optional<double>(wall.count()) : std::nullopt).dump(2)
       << '\n';
  }
  const MetricsRecord& last = r.records.back();
  std::cout << sc.name << ": class " << to_string(sc.matching_class) << ", satisfaction "
            << format_fixed(last.global_satisfaction, 4) << ", matched " << last.matched_count
            << ", blocking " << last.blocking_or_improving_count << "\n";
  for (const EventReport& e : r.events) {
    std::cout << "  " << e.tag << " @" << e.at_iteration << ": incremental "
              << e.incremental_iterations << " vs cold " << e.cold_iterations
              << " iterations, restabilized at " << e.restabilized_at << "\n";
  }
  if (r.oracle) std::cout << "  oracle optimum " << format_fixed(r.oracle->optimum, 4) << "\n";
  std::cout << "  wrote " << (out / "metrics.csv").string() << " and "
            << (out / "summary.json").string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& path, const Overrides& o, const fs::path& out,
              const std::vector<int>& sizes, int reps) {
  const Scenario sc = load_with_overrides(path, o);
  const std::vector<SweepRow> rows = sweep(sc, sizes, reps);
  write_sweep_csv(std::cout, rows);
  auto os = open_output(out, "sweep.csv");
  write_sweep_csv(os, rows);
  return 0;
}

int cmd_oracle(const std::string& path, const Overrides& o) {
  Scenario sc = load_with_overrides(path, o);
  const Market m = build_market(sc, deploy(sc));
  const OracleResult oracle = brute_force_optimum(m, sc.matching_class, sc.oracle_cap);
  Matching engine;
  switch (sc.matching_class) {
    case MatchingClass::kSubstitutable: engine = match_class1(m); break;
    case MatchingClass::kPartial: engine = match_class2(m); break;
    case MatchingClass::kNonSubstitutable: {
      ExchangeOptions opts;
      opts.max_iterations = sc.max_engine_iterations;
      engine = match_class3(m, opts);
      break;
    }
  }
  const double got = global_satisfaction(m, engine, sc.matching_class);
  std::cout << "optimum " << format_fixed(oracle.optimum) << " over " << oracle.enumerated
            << " assignments; engine " << format_fixed(got) << " (ratio "
            << format_fixed(oracle.optimum > 0 ? got / oracle.optimum : 1.0, 4) << ")\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  const Scenario sc = load_scenario(path);
  const Deployment dep = deploy(sc);
  build_market(sc, dep);
  resolve_events(sc, dep);
  std::cout << sc.name << ": valid (" << dep.drones.size() << " drones, "
            << sc.perturbations.size() << " perturbations)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV relay selection by matching games"};
  app.require_subcommand(1);
  Overrides o;
  std::string scenario;
  std::string out = "out";
  bool timings = false;
  std::vector<int> sizes;
  int reps = 30;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario, "Scenario file")->required();
    sub->add_option("--seed", o.seed, "Override the scenario seed");
    sub->add_option("--engine", o.engine, "Override the matching class (I, II or III)");
  };
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write metrics.csv and summary.json");
  add_common(run);
  run->add_option("--out", out, "Output directory");
  run->add_flag("--timings", timings, "Include wall-clock time in summary.json");
  CLI::App* sw = app.add_subcommand("sweep", "Class I vs Class II satisfaction over source counts");
  add_common(sw);
  sw->add_option("--out", out, "Output directory");
  sw->add_option("--sizes", sizes, "Source counts")->delimiter(',')->required();
  sw->add_option("--reps", reps, "Replications per size")->check(CLI::PositiveNumber);
  CLI::App* orc = app.add_subcommand("oracle", "Compare the engine against the exhaustive optimum");
  add_common(orc);
  CLI::App* val = app.add_subcommand("validate", "Check a scenario file");
  val->add_option("scenario", scenario, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (*run) return cmd_run(scenario, o, out, timings);
    if (*sw) return cmd_sweep(scenario, o, out, sizes, reps);
    if (*orc) return cmd_oracle(scenario, o);
    return cmd_validate(scenario);
  } catch (const TerminationCapError& e) {
    std::cerr << "error: " << e.what() << " (best satisfaction "
              << format_fixed(e.best_satisfaction(), 4) << ")\n";
    return exit_code(e.kind());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}
