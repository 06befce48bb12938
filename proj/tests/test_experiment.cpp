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

#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "uavmatch/uavmatch.hpp"

namespace uavmatch {
namespace {

const std::string kDir = UAVMATCH_SCENARIO_DIR;

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_metrics_csv(os, r.records);
  return os.str();
}

TEST(Experiment, RunsAreByteIdentical) {
  const Scenario sc = load_scenario(kDir + "/perturbation.json");
  const ExperimentResult a = run_experiment(sc);
  const ExperimentResult b = run_experiment(sc);
  EXPECT_EQ(csv_of(a), csv_of(b));
  EXPECT_EQ(summary_json(a).dump(2), summary_json(b).dump(2));
  EXPECT_FALSE(summary_json(a).contains("timings"));
  EXPECT_TRUE(summary_json(a, 1.5).contains("timings"));
}

TEST(Experiment, OneRecordPerIteration) {
  const Scenario sc = load_scenario(kDir + "/perturbation.json");
  const ExperimentResult r = run_experiment(sc);
  ASSERT_EQ(r.records.size(), static_cast<std::size_t>(sc.iterations + 1));
  for (std::size_t t = 0; t < r.records.size(); ++t) {
    const MetricsRecord& rec = r.records[t];
    EXPECT_EQ(rec.iteration, static_cast<int>(t));
    EXPECT_TRUE(record_violations(rec).empty());
    EXPECT_LE(rec.matched_count, 25);
  }
  EXPECT_EQ(r.records[0].matched_count, 0);
  EXPECT_EQ(r.records[16].event, "departure:8");
  EXPECT_EQ(r.records[31].event, "arrival:5");
  EXPECT_EQ(r.events.size(), 2u);
  EXPECT_EQ(r.records.back().blocking_or_improving_count, 0);
  EXPECT_EQ(r.final_market.num_sources(), 17u);

  const std::string csv = csv_of(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), sc.iterations + 2);
}

TEST(Experiment, SummaryFields) {
  const ExperimentResult r = run_experiment(load_scenario(kDir + "/perturbation.json"));
  const auto j = summary_json(r);
  EXPECT_EQ(j.at("metrics_format"), kMetricsFormat);
  EXPECT_EQ(j.at("scenario"), "perturbation");
  EXPECT_EQ(j.at("seed"), 20260417u);
  EXPECT_EQ(j.at("events").size(), 2u);
}

TEST(Experiment, OracleBoundsTheEngine) {
  const Scenario sc = load_scenario(kDir + "/oracle_small.json");
  ASSERT_TRUE(sc.oracle_enabled);
  const ExperimentResult r = run_experiment(sc);
  ASSERT_TRUE(r.oracle.has_value());
  const double engine = r.records.back().global_satisfaction;
  EXPECT_LE(engine, r.oracle->optimum + 1e-12);
  EXPECT_GE(engine, 0.95 * r.oracle->optimum);
  EXPECT_GT(r.oracle->enumerated, 0u);
}

TEST(Experiment, TerminationCapCarriesBestSoFar) {
  Scenario sc = load_scenario(kDir + "/perturbation.json");
  sc.max_engine_iterations = 1;
  try {
    run_experiment(sc);
    FAIL() << "expected the cap to trip";
  } catch (const TerminationCapError& e) {
    EXPECT_EQ(exit_code(e.kind()), 2);
  }
}

TEST(Sweep, RowShapeAndOrdering) {
  const Scenario tmpl = load_scenario(kDir + "/heterogeneous_sweep.json");
  const auto rows = sweep(tmpl, {5, 10, 15, 20}, 2);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].engine, i % 2 == 0 ? MatchingClass::kSubstitutable : MatchingClass::kPartial);
    EXPECT_EQ(rows[i].size, 5 * static_cast<int>(i / 2 + 1));
    EXPECT_GE(rows[i].mean, 0.0);
    EXPECT_LE(rows[i].mean, 1.0);
  }
  std::ostringstream os;
  write_sweep_csv(os, rows);
  const std::string csv = os.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}

TEST(Sweep, SingleReplicationHasZeroSpread) {
  const Scenario tmpl = load_scenario(kDir + "/heterogeneous_sweep.json");
  for (const SweepRow& r : sweep(tmpl, {7}, 1)) EXPECT_EQ(r.stddev, 0.0);
  EXPECT_THROW(sweep(tmpl, {}, 3), Error);
  EXPECT_THROW(sweep(tmpl, {5}, 0), Error);
}

TEST(Sweep, ReplicationSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (int size : {5, 10}) {
    for (int rep = 0; rep < 50; ++rep) seen.insert(replication_seed(1, size, rep));
  }
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Format, FixedDigits) {
  EXPECT_EQ(format_fixed(0.5), "0.500000000");
  EXPECT_EQ(format_fixed(1.0, 2), "1.00");
}

}  // namespace
}  // namespace uavmatch
