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

struct SmallPokerParams {
  int ranks = 3;            // J, Q, K (up to 4 adds A)
  int suits = 2;
  double ante = 1.0;
  std::array<double, 2> raise_size = {1.0, 2.0};  // per round
  int raise_cap = 2;        // raises allowed per round
};

// Two-player, two-round limit poker in the style of Leduc hold'em. Each
// player gets one private card, a betting round follows, one public card is
// revealed, and a second betting round follows. A private card pairing the
// public card wins at showdown, otherwise the higher rank wins and equal
// ranks split.
//
// Actions are Fold, Call (a check when nothing is owed) and Raise. Fold is
// only legal when facing a raise. Infoset keys are
// "<rank>|<round-1 history>" and "<rank>|<round-1 history>/<public><round-2
// history>" with f/c/r history letters, e.g. "Q|rc/Kcr".
class SmallPoker final : public Game {
 public:
  static constexpr const char* kRankChars = "JQKA";

  explicit SmallPoker(SmallPokerParams params = {}) : params_(params) {
    if (params_.ranks < 2 || params_.ranks > 4) {
      throw GameError("small_poker supports 2 to 4 ranks");
    }
    if (params_.suits < 2) throw GameError("small_poker needs at least 2 suits");
    if (params_.raise_cap < 0) throw GameError("raise cap must be >= 0");
    if (params_.ante <= 0.0 || params_.raise_size[0] <= 0.0 ||
        params_.raise_size[1] <= 0.0) {
      throw GameError("ante and raise sizes must be positive");
    }
    const int cards = deck_size();
    for (int a = 0; a < cards; ++a) {
      for (int b = 0; b < cards; ++b) {
        if (a != b) deals_.push_back({a, b});
      }
    }
  }

  const SmallPokerParams& params() const { return params_; }
  int deck_size() const { return params_.ranks * params_.suits; }
  int rank_of(int card) const { return card / params_.suits; }

  std::string name() const override { return "small_poker"; }
  int player_count() const override { return 2; }

  bool is_terminal(const State& s) const override { return replay(s).terminal; }

  std::vector<double> terminal_payoffs(const State& s) const override {
    const Replay r = replay(s);
    if (!r.terminal) throw GameError("not a terminal state");
    if (r.folded >= 0) {
      const int winner = 1 - r.folded;
      std::vector<double> out(2);
      out[winner] = r.contribution[r.folded];
      out[r.folded] = -r.contribution[r.folded];
      return out;
    }
    const auto& deal = deals_[s[0]];
    const int pub = rank_of(r.public_card);
    const int h0 = hand_strength(rank_of(deal[0]), pub);
    const int h1 = hand_strength(rank_of(deal[1]), pub);
    const double pot_share = r.contribution[0];  // equal at showdown
    if (h0 == h1) return {0.0, 0.0};
    return h0 > h1 ? std::vector<double>{pot_share, -pot_share}
                   : std::vector<double>{-pot_share, pot_share};
  }

  PlayerId acting_player(const State& s) const override {
    const Replay r = replay(s);
    if (r.terminal) return kTerminalPlayer;
    if (r.chance) return kChancePlayer;
    return r.to_act;
  }

  std::vector<std::string> legal_actions(const State& s) const override {
    const Replay r = replay(s);
    if (r.chance) {
      std::vector<std::string> out;
      if (s.empty()) {
        for (const auto& d : deals_) out.push_back(card_name(d[0]) + card_name(d[1]));
      } else {
        for (int c : remaining_cards(s)) out.push_back(card_name(c));
      }
      return out;
    }
    std::vector<std::string> out;
    const bool facing = r.contribution[r.to_act] < r.contribution[1 - r.to_act];
    if (facing) out.push_back("Fold");
    out.push_back("Call");
    if (r.raises < params_.raise_cap) out.push_back("Raise");
    return out;
  }

  std::vector<double> chance_distribution(const State& s) const override {
    const Replay r = replay(s);
    if (!r.chance) return {};
    const std::size_t n = s.empty() ? deals_.size() : remaining_cards(s).size();
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }

  std::string infoset_key(const State& s) const override {
    const Replay r = replay(s);
    const int card = deals_[s[0]][r.to_act];
    std::string key(1, kRankChars[rank_of(card)]);
    key += "|" + r.history[0];
    if (r.round == 1) {
      key += "/";
      key.push_back(kRankChars[rank_of(r.public_card)]);
      key += r.history[1];
    }
    return key;
  }

  std::string card_name(int card) const {
    return std::string(1, kRankChars[rank_of(card)]) +
           std::to_string(card % params_.suits);
  }

 private:
  struct Replay {
    bool terminal = false;
    bool chance = false;
    int folded = -1;
    int round = 0;
    int to_act = 0;
    int raises = 0;
    int public_card = -1;
    std::array<double, 2> contribution{};
    std::array<std::string, 2> history;
  };

  static int hand_strength(int rank, int public_rank) {
    return rank == public_rank ? 100 + rank : rank;
  }

  std::vector<int> remaining_cards(const State& s) const {
    const auto& deal = deals_[s[0]];
    std::vector<int> out;
    for (int c = 0; c < deck_size(); ++c) {
      if (c != deal[0] && c != deal[1]) out.push_back(c);
    }
    return out;
  }

  // Decodes a history into the betting state it reaches.
  Replay replay(const State& s) const {
    Replay r;
    r.contribution = {params_.ante, params_.ante};
    if (s.empty()) {
      r.chance = true;
      return r;
    }
    if (s[0] < 0 || s[0] >= static_cast<int>(deals_.size())) {
      throw GameError("bad deal index");
    }
    int actions_in_round = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (r.terminal) throw GameError("action after terminal state");
      if (r.chance) {
        const std::vector<int> rest = remaining_cards(s);
        if (s[i] < 0 || s[i] >= static_cast<int>(rest.size())) {
          throw GameError("bad public card index");
        }
        r.public_card = rest[s[i]];
        r.chance = false;
        r.round = 1;
        r.to_act = 0;
        r.raises = 0;
        actions_in_round = 0;
        continue;
      }
      const int p = r.to_act;
      const bool facing = r.contribution[p] < r.contribution[1 - p];
      // Map the action index back to a label using the same legality rules
      // as legal_actions.
      int label_index = s[i];
      if (!facing) ++label_index;  // no Fold
      if (label_index == 2 && r.raises >= params_.raise_cap) {
        throw GameError("raise beyond cap");
      }
      if (label_index < 0 || label_index > 2) throw GameError("bad action index");
      ++actions_in_round;
      if (label_index == 0) {
        r.history[r.round].push_back('f');
        r.folded = p;
        r.terminal = true;
        continue;
      }
      if (label_index == 1) {
        r.history[r.round].push_back('c');
        r.contribution[p] = r.contribution[1 - p];
        // A round closes on a call of a raise or on check-check.
        if (facing || actions_in_round >= 2) {
          if (r.round == 0) {
            r.chance = true;
          } else {
            r.terminal = true;
          }
          continue;
        }
      } else {
        r.history[r.round].push_back('r');
        r.contribution[p] = r.contribution[1 - p] + params_.raise_size[r.round];
        ++r.raises;
      }
      r.to_act = 1 - p;
    }
    return r;
  }

  SmallPokerParams params_;
  std::vector<std::array<int, 2>> deals_;
};

}  // namespace prefcfr
