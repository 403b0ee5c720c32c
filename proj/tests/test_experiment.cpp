// Copyright 2026 The prefcfr Authors.
//
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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "prefcfr/experiment.hpp"
#include "prefcfr/games/kuhn.hpp"

namespace prefcfr {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("prefcfr_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(StrategyDump, RoundTripsExactly) {
  GameTree tree(KuhnPoker{});
  std::mt19937_64 rng(4);
  const DenseProfile sigma = initial_profile(tree, InitMode::kRandomSimplex, rng);
  const json j = strategy_to_json(tree, sigma);
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(j.at("game"), "kuhn");
  const StrategyDump back = strategy_from_json(json::parse(j.dump()));
  EXPECT_EQ(to_dense(tree, back.profile), sigma);
  EXPECT_EQ(back.actions.at("J|"), (std::vector<std::string>{"Pass", "Bet"}));
}

TEST(StrategyDump, RejectsBadInput) {
  GameTree tree(KuhnPoker{});
  json j = strategy_to_json(tree, uniform_profile(tree));
  json no_version = j;
  no_version.erase("schema_version");
  EXPECT_THROW(strategy_from_json(no_version), IoError);
  json not_simplex = j;
  not_simplex["strategy"][0]["probabilities"] = {0.9, 0.9};
  EXPECT_THROW(strategy_from_json(not_simplex), IoError);
  json dup = j;
  dup["strategy"].push_back(j["strategy"][0]);
  EXPECT_THROW(strategy_from_json(dup), IoError);
}

TEST(TraceCsv, HeaderAndRoundTrip) {
  ConvergenceTrace t = {{1, 0.5, 0.25, {}, 4.0, {}}, {10, 0.1, 0.2, {}, 1.2649110640673518, 3.5}};
  std::ostringstream os;
  write_trace_csv(os, 7, t);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kTraceHeader);
  EXPECT_NE(text.find("7,1,0.5,0.25,,4,\n"), std::string::npos);
  std::istringstream is(text);
  const ConvergenceTrace back = read_trace_csv(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].iteration, 10);
  EXPECT_EQ(*back[1].bound, 1.2649110640673518);
  EXPECT_EQ(*back[1].wall_ms, 3.5);
  EXPECT_FALSE(back[0].cone_distance.has_value());
  std::istringstream bad("iteration,value\n1,2\n");
  EXPECT_THROW(read_trace_csv(bad), IoError);
}

TEST(MatrixFile, RoundTrip) {
  const MatrixGame g = rock_paper_scissors();
  const MatrixGame back = matrix_game_from_json(json::parse(matrix_game_to_json(g).dump()));
  EXPECT_EQ(back.action_counts(), g.action_counts());
  EXPECT_EQ(back.payoff_tensor(0), g.payoff_tensor(0));
  EXPECT_EQ(back.labels(1), g.labels(1));
  json extra = matrix_game_to_json(g);
  extra["colour"] = "red";
  EXPECT_THROW(matrix_game_from_json(extra), IoError);
}

TEST(ConfigFile, RoundTripAndStrictness) {
  ExperimentConfig c = six_config_suite(500, 3, 11)[1];
  c.workers = 2;
  c.output_dir = "out/x";
  const json j = experiment_config_to_json(c);
  const ExperimentConfig back = experiment_config_from_json(json::parse(j.dump()));
  EXPECT_EQ(experiment_config_to_json(back).dump(), j.dump());
  EXPECT_EQ(back.solver.algorithm, Algorithm::kPrefCfrBr);
  EXPECT_EQ(back.runs, 3);

  json unknown = j;
  unknown["solver"]["learning_rate"] = 0.1;
  EXPECT_THROW(experiment_config_from_json(unknown), IoError);
  json no_version = j;
  no_version.erase("schema_version");
  EXPECT_THROW(experiment_config_from_json(no_version), IoError);
  json bad_runs = j;
  bad_runs["runs"] = 0;
  EXPECT_THROW(experiment_config_from_json(bad_runs).validate(), std::invalid_argument);
}

TEST(Summary, ExamplesAndBand) {
  // Identical traces: zero-width band.
  ConvergenceTrace t = {{10, 0.3, 0.2, {}, {}, {}}};
  SummaryStats s = summarize({t, t, t});
  const SummaryRow* e = find_summary(s, 10, "exploitability");
  ASSERT_NE(e, nullptr);
  EXPECT_DOUBLE_EQ(e->lo90, e->hi90);
  EXPECT_DOUBLE_EQ(e->mean, 0.3);
  // Two traces with 0 and 1: mean 0.5.
  ConvergenceTrace a = {{10, 0.0, {}, {}, {}, {}}}, b = {{10, 1.0, {}, {}, {}, {}}};
  s = summarize({a, b});
  EXPECT_DOUBLE_EQ(find_summary(s, 10, "exploitability")->mean, 0.5);
  EXPECT_EQ(find_summary(s, 10, "alpha"), nullptr);
  // Misaligned checkpoints are an error.
  ConvergenceTrace c = {{20, 1.0, {}, {}, {}, {}}};
  EXPECT_THROW(summarize({a, c}), std::invalid_argument);
}

TEST(Summary, UniformSamplePercentiles) {
  std::mt19937_64 rng(123);
  std::vector<ConvergenceTrace> traces;
  for (int k = 0; k < 100; ++k) traces.push_back({{1, uniform_unit(rng), {}, {}, {}, {}}});
  const SummaryRow* r = find_summary(summarize(traces), 1, "exploitability");
  EXPECT_NEAR(r->lo90, 0.05, 0.05);
  EXPECT_NEAR(r->hi90, 0.95, 0.05);
  EXPECT_LE(r->lo90, r->mean);
  EXPECT_LE(r->mean, r->hi90);
}

TEST(Summary, QuantileDefinition) {
  EXPECT_DOUBLE_EQ(empirical_quantile({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(empirical_quantile({0.0, 10.0}, 0.05), 0.5);
  EXPECT_DOUBLE_EQ(empirical_quantile({4.0}, 0.95), 4.0);
  EXPECT_THROW(empirical_quantile({}, 0.5), std::invalid_argument);
}

TEST(Experiment, SingleRunBandIsThePoint) {
  ExperimentConfig c;
  c.solver.iterations = 100;
  const ExperimentResult r = run_experiment(c);
  const SummaryRow& row = r.final_summary("alpha");
  EXPECT_DOUBLE_EQ(row.lo90, row.mean);
  EXPECT_DOUBLE_EQ(row.hi90, row.mean);
}

TEST(Experiment, SameConfigGivesByteIdenticalFiles) {
  ExperimentConfig c = six_config_suite(300, 3, 5)[2];
  c.workers = 2;
  const fs::path d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  c.output_dir = d1.string();
  run_experiment(c);
  c.output_dir = d2.string();
  c.workers = 1;
  run_experiment(c);
  for (const std::string f : {"trace_0.csv", "trace_2.csv", "strategy_1.json", "summary.csv"}) {
    ASSERT_TRUE(fs::exists(d1 / f)) << f;
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  }
  const std::string summary = slurp(d1 / "summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), kSummaryHeader);
  EXPECT_TRUE(fs::exists(d1 / "summary.meta.json"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Experiment, FailedConfigWritesNothing) {
  ExperimentConfig c;
  c.solver.algorithm = Algorithm::kPrefCfrRm;
  c.solver.preferences.add_delta({"Z|", "Bet", 2.0});
  const fs::path d = scratch_dir("fail");
  c.output_dir = d.string();
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  EXPECT_FALSE(fs::exists(d));
}

TEST(Suite, ShapeOfTheSixSettings) {
  const auto suite = six_config_suite();
  ASSERT_EQ(suite.size(), 6u);
  GameTree tree(KuhnPoker{});
  for (const ExperimentConfig& c : suite) {
    EXPECT_EQ(c.runs, 30);
    EXPECT_EQ(c.solver.iterations, 10000);
    const ResolvedPreferences p = c.solver.preferences.resolve(tree);
    for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
      const std::string& key = tree.infoset(static_cast<int>(s)).key;
      const bool opening = key == "J|" || key == "Q|" || key == "K|";
      const bool neutral = p.delta[s] == std::vector<double>{1.0, 1.0};
      EXPECT_EQ(neutral, !opening) << c.label << " " << key;
    }
  }
  EXPECT_EQ(suite[0].solver.algorithm, Algorithm::kPrefCfrBr);
  EXPECT_EQ(suite[2].solver.algorithm, Algorithm::kPrefCfrRm);
  EXPECT_EQ(suite[3].solver.algorithm, Algorithm::kPrefCfrRm);
  EXPECT_EQ(suite[5].solver.preferences.delta_star(), 10.0);
}

}  // namespace
}  // namespace prefcfr
