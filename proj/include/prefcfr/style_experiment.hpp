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

#pragma once

#include <string>
#include <vector>

#include "prefcfr/evaluation.hpp"
#include "prefcfr/games/registry.hpp"
#include "prefcfr/solver.hpp"

namespace prefcfr {

// An aggressive style on small_poker: Raise preferred everywhere
// (delta = 5 on every Raise) plus a vulnerability allowance at player 1's
// opening decision. Compared against vanilla CFR on style and on exact,
// seat-averaged head-to-head payoff.
struct StyleExperimentOptions {
  long iterations = 10000;
  Algorithm algorithm = Algorithm::kPrefCfrBr;
  double raise_delta = 5.0;
  double beta = 0.05;
  GameParams game_params;
};

struct StyleExperimentResult {
  std::vector<std::string> style_infosets;
  StyleMetrics baseline_style;
  StyleMetrics styled_style;
  double raise_ratio = 0.0;
  double baseline_exploitability = 0.0;
  double styled_exploitability = 0.0;
  // Styled profile's seat-averaged expected payoff against the baseline.
  double head_to_head = 0.0;
  // Chips in the pot before any action (both antes).
  double reference_pot = 0.0;
  double loss_fraction_of_pot = 0.0;
  DenseProfile baseline;
  DenseProfile styled;
};

inline StyleExperimentResult run_style_experiment(const StyleExperimentOptions& options = {}) {
  auto game = build_game("small_poker", options.game_params);
  const auto& poker = dynamic_cast<const SmallPoker&>(*game);
  GameTree tree(*game);
  StyleExperimentResult out;

  const std::vector<int> opening = first_decision_infosets(tree, 0);
  for (int s : opening) out.style_infosets.push_back(tree.infoset(s).key);

  SolverConfig base;
  base.algorithm = Algorithm::kCfr;
  base.iterations = options.iterations;
  base.checkpoints = CheckpointCadence{CheckpointCadence::Kind::kEvery, options.iterations};
  SolverResult baseline = run_solver(tree, base);

  SolverConfig styled = base;
  styled.algorithm = options.algorithm;
  styled.preferences.add_delta({std::nullopt, "Raise", options.raise_delta});
  for (const std::string& key : out.style_infosets) {
    styled.preferences.add_beta({key, options.beta});
  }
  SolverResult styled_run = run_solver(tree, styled);

  out.baseline = baseline.average_strategy;
  out.styled = styled_run.average_strategy;
  out.baseline_exploitability = *baseline.trace.back().exploitability;
  out.styled_exploitability = *styled_run.trace.back().exploitability;
  out.baseline_style = style_metrics(tree, out.baseline, opening);
  out.styled_style = style_metrics(tree, out.styled, opening);
  out.raise_ratio =
      out.styled_style.frequency_of("Raise") / out.baseline_style.frequency_of("Raise");
  out.head_to_head = head_to_head(tree, {out.styled, out.baseline}, true).mean_payoff[0];
  out.reference_pot = 2.0 * poker.params().ante;
  out.loss_fraction_of_pot = std::max(0.0, -out.head_to_head) / out.reference_pot;
  return out;
}

}  // namespace prefcfr
