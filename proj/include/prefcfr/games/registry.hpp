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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prefcfr/game.hpp"
#include "prefcfr/games/kuhn.hpp"
#include "prefcfr/games/small_poker.hpp"
#include "prefcfr/normal_form.hpp"

namespace prefcfr {

// Zero-sum, +-1.
inline MatrixGame matching_pennies() {
  return MatrixGame("matching_pennies", {2, 2},
                    {{1, -1, -1, 1}, {-1, 1, 1, -1}},
                    {{"Heads", "Tails"}, {"Heads", "Tails"}});
}

inline MatrixGame rock_paper_scissors() {
  return MatrixGame("rps", {3, 3},
                    {{0, -1, 1, 1, 0, -1, -1, 1, 0},
                     {0, 1, -1, -1, 0, 1, 1, -1, 0}},
                    {{"Rock", "Paper", "Scissors"}, {"Rock", "Paper", "Scissors"}});
}

// Pure equilibria at (A, A) and (B, B); the mixed one plays A with 1/3.
inline MatrixGame coordination_game() {
  return MatrixGame("coordination", {2, 2},
                    {{2, 0, 0, 1}, {2, 0, 0, 1}},
                    {{"A", "B"}, {"A", "B"}});
}

inline std::optional<MatrixGame> matrix_instance(const std::string& name) {
  if (name == "matching_pennies") return matching_pennies();
  if (name == "rps") return rock_paper_scissors();
  if (name == "coordination") return coordination_game();
  return std::nullopt;
}

using GameParams = std::map<std::string, double>;

inline const std::vector<std::string>& known_games() {
  static const std::vector<std::string> names = {"kuhn", "small_poker",
                                                 "matching_pennies", "rps",
                                                 "coordination"};
  return names;
}

// Recognised parameters: small_poker takes ranks, suits, ante, raise1,
// raise2 and raise_cap. The other games take none.
inline std::shared_ptr<const Game> build_game(const std::string& name,
                                              const GameParams& params = {}) {
  auto reject_params = [&]() {
    if (!params.empty()) {
      throw GameError("game '" + name + "' takes no parameters (got '" +
                      params.begin()->first + "')");
    }
  };
  if (name == "kuhn") {
    reject_params();
    return std::make_shared<KuhnPoker>();
  }
  if (name == "small_poker") {
    SmallPokerParams p;
    for (const auto& [key, value] : params) {
      if (key == "ranks") p.ranks = static_cast<int>(value);
      else if (key == "suits") p.suits = static_cast<int>(value);
      else if (key == "ante") p.ante = value;
      else if (key == "raise1") p.raise_size[0] = value;
      else if (key == "raise2") p.raise_size[1] = value;
      else if (key == "raise_cap") p.raise_cap = static_cast<int>(value);
      else throw GameError("unknown small_poker parameter '" + key + "'");
    }
    return std::make_shared<SmallPoker>(p);
  }
  if (auto m = matrix_instance(name)) {
    reject_params();
    return std::make_shared<MatrixGameTree>(std::move(*m));
  }
  throw GameError("unknown game '" + name + "'");
}

}  // namespace prefcfr
