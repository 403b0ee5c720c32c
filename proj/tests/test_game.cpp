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

TEST(GameTree, KuhnHasTwelveInfosetsSixPerPlayer) {
  KuhnPoker kuhn;
  GameTree tree(kuhn);
  ASSERT_EQ(tree.infoset_count(), 12u);
  int per_player[2] = {0, 0};
  for (const InfosetInfo& info : tree.infosets()) ++per_player[info.player];
  EXPECT_EQ(per_player[0], 6);
  EXPECT_EQ(per_player[1], 6);
  for (int p = 0; p < 2; ++p) {
    for (const std::string& key : oracle::kuhn_player_infosets(p)) {
      const int s = tree.infoset_index(key);
      ASSERT_GE(s, 0) << key;
      EXPECT_EQ(tree.infoset(s).player, p);
    }
  }
  EXPECT_DOUBLE_EQ(tree.payoff_interval(), 4.0);
}

TEST(GameTree, SingleDecisionGameHasOneInfoset) {
  testgames::OneDecision g({1.0, 0.0});
  GameTree tree(g);
  EXPECT_EQ(tree.infoset_count(), 1u);
  EXPECT_EQ(enumerate_infosets(g).size(), 1u);
}

TEST(GameTree, MatchingPenniesTreeHasOneInfosetPerPlayer) {
  MatrixGameTree g(matching_pennies());
  GameTree tree(g);
  ASSERT_EQ(tree.infoset_count(), 2u);
  EXPECT_EQ(tree.infoset(0).player, 0);
  EXPECT_EQ(tree.infoset(1).player, 1);
  // Player 1 cannot see player 0's move: both nodes share one infoset.
  EXPECT_EQ(tree.infoset_nodes(1).size(), 2u);
}

TEST(GameTree, RejectsNonTerminatingGame) {
  testgames::Endless g;
  EXPECT_THROW(GameTree{g}, GameError);
}

TEST(GameTree, RejectsBadChanceDistribution) {
  testgames::BadChance g;
  EXPECT_THROW(GameTree{g}, GameError);
}

TEST(GameTree, RejectsImperfectRecall) {
  testgames::ImperfectRecall g;
  EXPECT_THROW(GameTree{g}, GameError);
}

TEST(GameTree, ParentsPrecedeChildren) {
  GameTree tree(KuhnPoker{});
  for (std::size_t h = 1; h < tree.node_count(); ++h) {
    EXPECT_LT(tree.node(static_cast<int>(h)).parent, static_cast<int>(h));
  }
}

TEST(GameTree, TerminalPayoffsMatchKuhnRules) {
  KuhnPoker kuhn;
  GameTree tree(kuhn);
  int terminals = 0;
  for (std::size_t h = 0; h < tree.node_count(); ++h) {
    const auto& n = tree.node(static_cast<int>(h));
    if (n.player != kTerminalPlayer) continue;
    ++terminals;
    // Reconstruct the path.
    std::vector<int> path;
    for (int x = static_cast<int>(h); tree.node(x).parent >= 0; x = tree.node(x).parent) {
      path.insert(path.begin(), tree.node(x).parent_action);
    }
    const auto& deal = oracle::kuhn_deals()[path[0]];
    std::string hist;
    for (std::size_t k = 1; k < path.size(); ++k) hist += path[k] == 0 ? 'p' : 'b';
    const auto u = tree.payoffs(static_cast<int>(h));
    EXPECT_DOUBLE_EQ(u[0], oracle::kuhn_payoff0(deal[0], deal[1], hist)) << hist;
    EXPECT_DOUBLE_EQ(u[0] + u[1], 0.0);
  }
  EXPECT_EQ(terminals, 30);
}

TEST(ExpectedValue, UniformKuhnMatchesEnumeration) {
  GameTree tree(KuhnPoker{});
  const DenseProfile u = uniform_profile(tree);
  const auto v = expected_value(tree, u);
  EXPECT_NEAR(v[0], oracle::kuhn_game_value(to_behavioral(tree, u)), 1e-12);
  EXPECT_NEAR(v[0] + v[1], 0.0, 1e-12);
}

TEST(ExpectedValue, TerminalOnlyGame) {
  GameTree tree(testgames::TerminalOnly{});
  const auto v = expected_value(tree, DenseProfile{});
  EXPECT_DOUBLE_EQ(v[0], 3.0);
  EXPECT_DOUBLE_EQ(v[1], -3.0);
}

TEST(ExpectedValue, MissingInfosetIsNamed) {
  GameTree tree(KuhnPoker{});
  BehavioralProfile p = to_behavioral(tree, uniform_profile(tree));
  p.erase("Q|pb");
  try {
    expected_value(tree, p);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("Q|pb"), std::string::npos);
  }
}

TEST(ExpectedValue, EquilibriumValueIsMinusOneEighteenth) {
  GameTree tree(KuhnPoker{});
  for (double alpha : {0.0, 0.1, 1.0 / 3.0}) {
    const auto v = expected_value(tree, kuhn_equilibrium(alpha));
    EXPECT_NEAR(v[0], -1.0 / 18.0, 1e-12);
  }
}

// Random profiles: zero-sum and linear in any single infoset's mixture.
TEST(ExpectedValue, ZeroSumAndMultilinear) {
  GameTree tree(KuhnPoker{});
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    DenseProfile a = initial_profile(tree, InitMode::kRandomSimplex, rng);
    DenseProfile b = a;
    const int s = static_cast<int>(rng() % tree.infoset_count());
    b[s] = random_simplex(b[s].size(), rng);
    const double lambda = uniform_unit(rng);
    DenseProfile mix = a;
    for (std::size_t k = 0; k < mix[s].size(); ++k) {
      mix[s][k] = lambda * a[s][k] + (1.0 - lambda) * b[s][k];
    }
    const auto va = expected_value(tree, a);
    const auto vb = expected_value(tree, b);
    const auto vm = expected_value(tree, mix);
    EXPECT_NEAR(va[0] + va[1], 0.0, 1e-12);
    EXPECT_NEAR(vm[0], lambda * va[0] + (1.0 - lambda) * vb[0], 1e-12);
  }
}

TEST(Reach, RootIsOneAndZeroActionsKillReach) {
  GameTree tree(KuhnPoker{});
  DenseProfile sigma = uniform_profile(tree);
  const int jb = tree.infoset_index("J|");
  sigma[jb] = {1.0, 0.0};  // never bet with J
  const auto reach = reach_probabilities(tree, sigma);
  EXPECT_DOUBLE_EQ(reach[0].own[0], 1.0);
  EXPECT_DOUBLE_EQ(reach[0].own[1], 1.0);
  EXPECT_DOUBLE_EQ(reach[0].chance, 1.0);
  for (std::size_t h = 0; h < tree.node_count(); ++h) {
    const auto& n = tree.node(static_cast<int>(h));
    if (n.parent < 0) continue;
    const auto& par = tree.node(n.parent);
    if (par.player == 0 && par.infoset == jb && n.parent_action == 1) {
      EXPECT_DOUBLE_EQ(reach[h].own[0], 0.0);
      EXPECT_DOUBLE_EQ(reach[h].external[1], 0.0);
    }
  }
}

TEST(Reach, InfosetExternalReachIsNodeSum) {
  GameTree tree(KuhnPoker{});
  std::mt19937_64 rng(3);
  const DenseProfile sigma = initial_profile(tree, InitMode::kRandomSimplex, rng);
  const auto reach = reach_probabilities(tree, sigma);
  const auto ext = infoset_external_reach(tree, reach);
  for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
    const int i = tree.infoset(static_cast<int>(s)).player;
    double manual = 0.0;
    for (int h : tree.infoset_nodes(static_cast<int>(s))) {
      double r = reach[h].chance;
      for (int q = 0; q < 2; ++q) {
        if (q != i) r *= reach[h].own[q];
      }
      manual += r;
    }
    EXPECT_NEAR(ext[s], manual, 1e-15);
  }
}

TEST(Profiles, RoundTripAndValidation) {
  GameTree tree(KuhnPoker{});
  const DenseProfile u = uniform_profile(tree);
  EXPECT_EQ(to_dense(tree, to_behavioral(tree, u)), u);
  DenseProfile bad = u;
  bad[0] = {0.7, 0.7};
  EXPECT_THROW(validate_profile(tree, bad), std::exception);
  EXPECT_TRUE(is_simplex(std::vector<double>{0.25, 0.75}));
  EXPECT_FALSE(is_simplex(std::vector<double>{-0.1, 1.1}));
}

}  // namespace
}  // namespace prefcfr
