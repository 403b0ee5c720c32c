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

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefcfr/game.hpp"

namespace prefcfr {

// Two-player Kuhn poker: cards J < Q < K, ante 1, single bet of 1.
// The root is a chance node over the six ordered deals. Infoset keys are
// "<card>|<history>" with 'p' for Pass and 'b' for Bet, e.g. "J|" or "Q|pb".
class KuhnPoker final : public Game {
 public:
  static constexpr int kPass = 0;
  static constexpr int kBet = 1;
  static constexpr std::array<char, 3> kCards = {'J', 'Q', 'K'};
  // (player 0 card, player 1 card) per chance outcome.
  static constexpr std::array<std::array<int, 2>, 6> kDeals = {
      {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};

  std::string name() const override { return "kuhn"; }
  int player_count() const override { return 2; }

  bool is_terminal(const State& s) const override {
    if (s.size() < 3) return false;
    const int a0 = s[1], a1 = s[2];
    if (a0 == kPass && a1 == kBet) return s.size() == 4;
    return true;  // pp, bp, bb
  }

  std::vector<double> terminal_payoffs(const State& s) const override {
    const auto& deal = kDeals[s[0]];
    const double winner_sign = deal[0] > deal[1] ? 1.0 : -1.0;
    const std::string h = history(s);
    double p0 = 0.0;
    if (h == "pp") p0 = winner_sign;
    else if (h == "bp") p0 = 1.0;
    else if (h == "bb" || h == "pbb") p0 = 2.0 * winner_sign;
    else if (h == "pbp") p0 = -1.0;
    else throw GameError("not a Kuhn terminal: " + h);
    return {p0, -p0};
  }

  PlayerId acting_player(const State& s) const override {
    if (s.empty()) return kChancePlayer;
    return static_cast<PlayerId>((s.size() - 1) % 2);
  }

  std::vector<std::string> legal_actions(const State& s) const override {
    if (s.empty()) {
      std::vector<std::string> deals;
      for (const auto& d : kDeals) deals.push_back(std::string{kCards[d[0]], kCards[d[1]]});
      return deals;
    }
    return {"Pass", "Bet"};
  }

  std::vector<double> chance_distribution(const State& s) const override {
    if (!s.empty()) return {};
    return std::vector<double>(kDeals.size(), 1.0 / kDeals.size());
  }

  std::string infoset_key(const State& s) const override {
    const int player = acting_player(s);
    return std::string{kCards[kDeals[s[0]][player]]} + "|" + history(s);
  }

 private:
  static std::string history(const State& s) {
    std::string h;
    for (std::size_t i = 1; i < s.size(); ++i) h.push_back(s[i] == kBet ? 'b' : 'p');
    return h;
  }
};

// Player 1's equilibrium family, parameterised by the Bet probability alpha
// with a Jack. Indifference conditions against player 2's unique equilibrium
// fix the rest: with a King bet 3*alpha, with a Queen never bet and call a
// bet with probability alpha + 1/3, with a Jack always fold to a bet, with a
// King always call.
inline BehavioralProfile kuhn_equilibrium_family(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0 / 3.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1/3]");
  }
  const double queen_call = alpha + 1.0 / 3.0;
  const double king_bet = 3.0 * alpha;
  return {
      {"J|", {1.0 - alpha, alpha}},
      {"Q|", {1.0, 0.0}},
      {"K|", {1.0 - king_bet, king_bet}},
      {"J|pb", {1.0, 0.0}},
      {"Q|pb", {1.0 - queen_call, queen_call}},
      {"K|pb", {0.0, 1.0}},
  };
}

// Player 2's unique equilibrium: bluff a third of the time with a Jack after
// a pass, call a bet a third of the time with a Queen, always bet or call
// with a King.
inline BehavioralProfile kuhn_player2_equilibrium() {
  return {
      {"J|p", {2.0 / 3.0, 1.0 / 3.0}},
      {"J|b", {1.0, 0.0}},
      {"Q|p", {1.0, 0.0}},
      {"Q|b", {2.0 / 3.0, 1.0 / 3.0}},
      {"K|p", {0.0, 1.0}},
      {"K|b", {0.0, 1.0}},
  };
}

inline BehavioralProfile kuhn_equilibrium(double alpha) {
  BehavioralProfile profile = kuhn_equilibrium_family(alpha);
  profile.merge(kuhn_player2_equilibrium());
  return profile;
}

}  // namespace prefcfr
