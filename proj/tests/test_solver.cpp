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

#include <random>

#include "oracles.hpp"
#include "prefcfr/games/kuhn.hpp"
#include "prefcfr/games/registry.hpp"
#include "prefcfr/solver.hpp"

namespace prefcfr {
namespace {

struct FirstActionSampler {
  int sample(std::span<const double>) { return 0; }
};

TEST(CfrTraverse, OneDecisionArithmetic) {
  GameTree tree(testgames::OneDecision({1.0, 0.0}));
  RegretTables tables(tree);
  cfr_traverse(tree, uniform_profile(tree), tables);
  EXPECT_DOUBLE_EQ(tables.average_regret(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(tables.average_regret(0)[1], -0.5);
}

TEST(CfrTraverse, UniformKuhnMatchesEnumerationOracle) {
  GameTree tree(KuhnPoker{});
  RegretTables tables(tree);
  const DenseProfile sigma = uniform_profile(tree);
  const auto inst = cfr_traverse(tree, sigma, tables);
  const oracle::Profile want = oracle::kuhn_counterfactual_regrets(to_behavioral(tree, sigma));
  ASSERT_EQ(want.size(), 12u);
  for (const auto& [key, r] : want) {
    const int s = tree.infoset_index(key);
    for (int a = 0; a < 2; ++a) {
      EXPECT_NEAR(inst[s][a], r[a], 1e-10) << key;
      EXPECT_NEAR(tables.average_regret(s)[a], r[a], 1e-10) << key;
    }
  }
}

TEST(CfrTraverse, RandomKuhnProfilesMatchOracle) {
  GameTree tree(KuhnPoker{});
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    RegretTables tables(tree);
    const DenseProfile sigma = initial_profile(tree, InitMode::kRandomSimplex, rng);
    const auto inst = cfr_traverse(tree, sigma, tables);
    for (const auto& [key, r] :
         oracle::kuhn_counterfactual_regrets(to_behavioral(tree, sigma))) {
      const int s = tree.infoset_index(key);
      for (int a = 0; a < 2; ++a) EXPECT_NEAR(inst[s][a], r[a], 1e-10) << key;
    }
  }
}

// Dominant action: its regret is never negative.
TEST(CfrTraverse, BestActionRegretNonNegative) {
  GameTree tree(testgames::OneDecision({0.1, 0.7, 0.3}));
  RegretTables tables(tree);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    cfr_traverse(tree, DenseProfile{random_simplex(3, rng)}, tables);
    EXPECT_GE(tables.average_regret(0)[1], 0.0);
  }
}

// Store every instantaneous regret and iterate, then compare the solver's
// running tables with plain batch sums.
TEST(RunSolver, RunningMeansMatchBatchRecomputation) {
  GameTree tree(KuhnPoker{});
  for (Algorithm algo : {Algorithm::kCfr, Algorithm::kPrefCfrRm, Algorithm::kPrefCfrBr}) {
    SolverConfig c;
    c.algorithm = algo;
    c.iterations = 200;
    c.seed = 3;
    c.init = InitMode::kRandomSimplex;
    c.store_history = true;
    if (algo != Algorithm::kCfr) c.preferences.add_delta({"K|", "Bet", 3.0});
    const SolverResult r = run_solver(tree, c);
    ASSERT_TRUE(r.history);
    const auto& profiles = r.history->profiles;
    const auto& regrets = r.history->regrets;
    ASSERT_EQ(profiles.size(), 200u);
    std::vector<std::vector<double>> num(tree.infoset_count());
    std::vector<std::vector<double>> rsum(tree.infoset_count());
    for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
      num[s].assign(2, 0.0);
      rsum[s].assign(2, 0.0);
    }
    for (std::size_t t = 0; t < profiles.size(); ++t) {
      const auto reach = reach_probabilities(tree, profiles[t]);
      for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
        const int h = tree.infoset_nodes(static_cast<int>(s)).front();
        const int i = tree.infoset(static_cast<int>(s)).player;
        for (int a = 0; a < 2; ++a) {
          num[s][a] += reach[h].own[i] * profiles[t][s][a];
          rsum[s][a] += regrets[t][s][a];
        }
      }
    }
    for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
      const double den = num[s][0] + num[s][1];
      for (int a = 0; a < 2; ++a) {
        EXPECT_NEAR(r.tables.average_regret(static_cast<int>(s))[a], rsum[s][a] / 200.0, 1e-10);
        EXPECT_NEAR(r.average_strategy[s][a], num[s][a] / den, 1e-10);
      }
    }
  }
}

TEST(RunSolver, NeutralPrefRmReproducesCfrIterates) {
  GameTree tree(KuhnPoker{});
  SolverConfig cfr;
  cfr.iterations = 300;
  cfr.seed = 12;
  cfr.init = InitMode::kRandomSimplex;
  cfr.store_history = true;
  SolverConfig pref = cfr;
  pref.algorithm = Algorithm::kPrefCfrRm;
  pref.preferences.add_delta({std::nullopt, "Bet", 1.0});
  pref.preferences.add_beta({std::nullopt, 0.0});
  const SolverResult a = run_solver(tree, cfr);
  const SolverResult b = run_solver(tree, pref);
  for (std::size_t t = 0; t < a.history->profiles.size(); ++t) {
    EXPECT_EQ(a.history->profiles[t], b.history->profiles[t]) << t;
  }
}

TEST(RunSolver, SameSeedIsBitIdentical) {
  GameTree tree(KuhnPoker{});
  SolverConfig c;
  c.algorithm = Algorithm::kMccfrExternal;
  c.iterations = 500;
  c.seed = 99;
  const SolverResult a = run_solver(tree, c);
  const SolverResult b = run_solver(tree, c);
  EXPECT_EQ(a.average_strategy, b.average_strategy);
  c.seed = 100;
  EXPECT_NE(run_solver(tree, c).average_strategy, a.average_strategy);
}

TEST(RunSolver, ValidatesConfig) {
  GameTree tree(KuhnPoker{});
  SolverConfig c;
  c.iterations = 0;
  EXPECT_THROW(run_solver(tree, c), std::invalid_argument);
  c.iterations = 10;
  c.preferences.add_delta({std::nullopt, "Bet", 2.0});
  EXPECT_THROW(run_solver(tree, c), std::invalid_argument);  // CFR takes no degrees
  c.algorithm = Algorithm::kPrefCfrRm;
  EXPECT_NO_THROW(run_solver(tree, c));
  c.per_player_rule = {UpdateRule::kRegretMatching};
  EXPECT_THROW(run_solver(tree, c), std::invalid_argument);
}

TEST(RunSolver, TraceUsesCheckpointsAndKuhnAlpha) {
  GameTree tree(KuhnPoker{});
  SolverConfig c;
  c.iterations = 250;
  c.checkpoints = CheckpointCadence::parse("50");
  const SolverResult r = run_solver(tree, c);
  ASSERT_EQ(r.trace.size(), 5u);
  EXPECT_EQ(r.trace.back().iteration, 250);
  EXPECT_TRUE(r.trace.back().alpha.has_value());
  EXPECT_FALSE(r.trace.back().wall_ms.has_value());
  EXPECT_TRUE(r.bound_violations.empty());
}

TEST(Checkpoints, Cadences) {
  const auto all = checkpoint_iterations(5, CheckpointCadence::parse("all"));
  EXPECT_EQ(all, (std::vector<long>{1, 2, 3, 4, 5}));
  const auto every = checkpoint_iterations(25, CheckpointCadence::parse("10"));
  EXPECT_EQ(every, (std::vector<long>{10, 20, 25}));
  const auto log = checkpoint_iterations(10000, CheckpointCadence::parse("log"));
  EXPECT_EQ(log.front(), 1);
  EXPECT_EQ(log.back(), 10000);
  EXPECT_TRUE(std::is_sorted(log.begin(), log.end()));
  EXPECT_EQ(std::adjacent_find(log.begin(), log.end()), log.end());
  EXPECT_THROW(CheckpointCadence::parse("sometimes"), std::invalid_argument);
}

TEST(RandomSimplex, IsADistribution) {
  std::mt19937_64 rng(0);
  double mean0 = 0.0;
  for (int k = 0; k < 4000; ++k) {
    const auto p = random_simplex(3, rng);
    EXPECT_TRUE(is_simplex(p));
    mean0 += p[0] / 4000.0;
  }
  EXPECT_NEAR(mean0, 1.0 / 3.0, 0.02);
}

// The sampler always takes action 0, so one external-sampling pass must equal
// a full traversal of the tree pruned to those branches.
TEST(Mccfr, FirstActionSamplerMatchesRestrictedTraversal) {
  KuhnPoker kuhn;
  GameTree tree(kuhn);
  std::mt19937_64 rng(8);
  const DenseProfile sigma = initial_profile(tree, InitMode::kRandomSimplex, rng);
  const oracle::Profile b = to_behavioral(tree, sigma);
  for (PlayerId traverser = 0; traverser < 2; ++traverser) {
    RegretTables tables(tree);
    tables.begin_iteration();
    FirstActionSampler sampler;
    mccfr_external_iteration(tree, sigma, tables, traverser, sampler);
    const oracle::RestrictedPass want = oracle::restricted_pass(kuhn, b, traverser);
    for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
      const InfosetInfo& info = tree.infoset(static_cast<int>(s));
      const auto it = want.regret.find(info.key);
      for (std::size_t a = 0; a < info.actions.size(); ++a) {
        const double expect = it == want.regret.end() ? 0.0 : it->second[a];
        EXPECT_NEAR(tables.average_regret(static_cast<int>(s))[a], expect, 1e-12) << info.key;
      }
      const auto v = want.sampler_visits.find(info.key);
      const double visits = v == want.sampler_visits.end() ? 0.0 : v->second;
      EXPECT_DOUBLE_EQ(tables.strategy_denominator(static_cast<int>(s)), visits) << info.key;
    }
  }
}

TEST(Mccfr, NoSamplerNodesEqualsFullTraversal) {
  GameTree tree(testgames::OneDecision({0.3, -0.2, 0.8}));
  const DenseProfile sigma = {{0.2, 0.5, 0.3}};
  RegretTables full(tree), sampled(tree);
  cfr_traverse(tree, sigma, full);
  sampled.begin_iteration();
  FirstActionSampler sampler;
  mccfr_external_iteration(tree, sigma, sampled, 0, sampler);
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(sampled.average_regret(0)[a], full.average_regret(0)[a], 1e-15);
  }
}

TEST(Mccfr, RequiresBeginIteration) {
  GameTree tree(KuhnPoker{});
  RegretTables tables(tree);
  FirstActionSampler sampler;
  EXPECT_THROW(mccfr_external_iteration(tree, uniform_profile(tree), tables, 0, sampler),
               std::logic_error);
}

TEST(Algorithms, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::kCfr, Algorithm::kPrefCfrRm, Algorithm::kPrefCfrBr,
                      Algorithm::kMccfrExternal}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_THROW(parse_algorithm("dqn"), std::invalid_argument);
}

}  // namespace
}  // namespace prefcfr
