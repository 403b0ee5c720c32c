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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace prefcfr {

using PlayerId = int;
inline constexpr PlayerId kChancePlayer = -1;
inline constexpr PlayerId kTerminalPlayer = -2;

inline constexpr double kProbabilityTolerance = 1e-9;

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An extensive-form game described state by state. A state is the sequence
// of action indices taken from the root, so every game defined this way is
// a tree by construction.
class Game {
 public:
  using State = std::vector<int>;

  virtual ~Game() = default;

  virtual std::string name() const = 0;
  virtual int player_count() const = 0;

  virtual bool is_terminal(const State& state) const = 0;
  virtual std::vector<double> terminal_payoffs(const State& state) const = 0;
  // kChancePlayer at chance nodes.
  virtual PlayerId acting_player(const State& state) const = 0;
  // Labels in declaration order. The order must be identical for every state
  // that shares an infoset key.
  virtual std::vector<std::string> legal_actions(const State& state) const = 0;
  virtual std::vector<double> chance_distribution(const State& state) const = 0;
  virtual std::string infoset_key(const State& state) const = 0;

  // Deepest history the tree walk accepts before declaring the game infinite.
  virtual int max_depth() const { return 4096; }

  State root() const { return {}; }
  State child(const State& state, int action) const {
    State next = state;
    next.push_back(action);
    return next;
  }
};

struct InfosetInfo {
  std::string key;
  PlayerId player = 0;
  std::vector<std::string> actions;
  int depth = 0;  // depth of the first node seen; equal across the set.
};

// A game compiled into flat arrays. Every algorithm in the library walks this
// representation; it is immutable once built.
class GameTree {
 public:
  struct Node {
    PlayerId player = kTerminalPlayer;
    int infoset = -1;      // decision nodes only
    int first_child = 0;   // children are contiguous in `children_`
    int child_count = 0;
    int chance_offset = -1;
    int payoff_offset = -1;
    int parent = -1;
    int parent_action = -1;
    int depth = 0;
  };

  explicit GameTree(const Game& game) { build(game); }

  int player_count() const { return player_count_; }
  const std::string& game_name() const { return name_; }
  // Max minus min over all terminal payoff entries.
  double payoff_interval() const { return payoff_interval_; }

  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(int index) const { return nodes_[index]; }
  int root() const { return 0; }
  int child(int node_index, int action) const {
    return children_[nodes_[node_index].first_child + action];
  }
  std::span<const double> chance_probs(int node_index) const {
    const Node& n = nodes_[node_index];
    return {chance_probs_.data() + n.chance_offset,
            static_cast<std::size_t>(n.child_count)};
  }
  std::span<const double> payoffs(int node_index) const {
    const Node& n = nodes_[node_index];
    return {payoffs_.data() + n.payoff_offset,
            static_cast<std::size_t>(player_count_)};
  }

  const std::vector<InfosetInfo>& infosets() const { return infosets_; }
  const InfosetInfo& infoset(int index) const { return infosets_[index]; }
  std::size_t infoset_count() const { return infosets_.size(); }
  int infoset_index(const std::string& key) const {
    auto it = infoset_lookup_.find(key);
    return it == infoset_lookup_.end() ? -1 : it->second;
  }
  const std::vector<int>& infoset_nodes(int infoset) const {
    return infoset_nodes_[infoset];
  }

  int max_action_count() const { return max_action_count_; }

 private:
  // (infoset, action) pairs the actor took on the way to a node.
  using OwnHistory = std::vector<std::pair<int, int>>;

  void build(const Game& game) {
    name_ = game.name();
    player_count_ = game.player_count();
    if (player_count_ < 1) throw GameError("game must have at least one player");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;

    struct Pending {
      Game::State state;
      int parent;
      int parent_action;
      std::vector<OwnHistory> own;
    };
    std::vector<Pending> stack;
    stack.push_back({game.root(), -1, -1, std::vector<OwnHistory>(player_count_)});
    std::vector<OwnHistory> recall;  // per infoset, the history that first reached it

    // Depth-first, children in action order; node indices follow pre-order.
    while (!stack.empty()) {
      Pending item = std::move(stack.back());
      stack.pop_back();
      const int index = static_cast<int>(nodes_.size());
      nodes_.emplace_back();
      Node n;
      n.parent = item.parent;
      n.parent_action = item.parent_action;
      n.depth = static_cast<int>(item.state.size());
      if (n.depth > game.max_depth()) {
        throw GameError("game tree exceeds max depth " +
                        std::to_string(game.max_depth()) +
                        "; only finite trees are supported");
      }
      if (item.parent >= 0) {
        children_[nodes_[item.parent].first_child + item.parent_action] = index;
      }

      if (game.is_terminal(item.state)) {
        std::vector<double> u = game.terminal_payoffs(item.state);
        if (static_cast<int>(u.size()) != player_count_) {
          throw GameError("terminal payoff vector has wrong length");
        }
        n.player = kTerminalPlayer;
        n.payoff_offset = static_cast<int>(payoffs_.size());
        for (double v : u) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          payoffs_.push_back(v);
        }
        nodes_[index] = n;
        continue;
      }

      n.player = game.acting_player(item.state);
      std::vector<std::string> actions = game.legal_actions(item.state);
      if (actions.empty()) throw GameError("non-terminal state without actions");
      n.child_count = static_cast<int>(actions.size());
      n.first_child = static_cast<int>(children_.size());
      children_.resize(children_.size() + actions.size(), -1);

      if (n.player == kChancePlayer) {
        std::vector<double> probs = game.chance_distribution(item.state);
        if (probs.size() != actions.size()) {
          throw GameError("chance distribution size does not match actions");
        }
        double total = 0.0;
        for (double p : probs) {
          if (p < 0.0) throw GameError("negative chance probability");
          total += p;
        }
        if (std::abs(total - 1.0) > kProbabilityTolerance) {
          throw GameError("chance distribution does not sum to 1");
        }
        n.chance_offset = static_cast<int>(chance_probs_.size());
        chance_probs_.insert(chance_probs_.end(), probs.begin(), probs.end());
      } else {
        if (n.player < 0 || n.player >= player_count_) {
          throw GameError("acting player out of range");
        }
        const std::string key = game.infoset_key(item.state);
        auto [it, inserted] =
            infoset_lookup_.try_emplace(key, static_cast<int>(infosets_.size()));
        if (inserted) {
          infosets_.push_back({key, n.player, actions, n.depth});
          infoset_nodes_.emplace_back();
          recall.push_back(item.own[n.player]);
          max_action_count_ = std::max(max_action_count_, n.child_count);
        } else {
          const InfosetInfo& info = infosets_[it->second];
          if (info.player != n.player) {
            throw GameError("infoset '" + key + "' shared across players");
          }
          if (info.actions != actions) {
            throw GameError("infoset '" + key + "' has inconsistent actions");
          }
          if (recall[it->second] != item.own[n.player]) {
            throw GameError("infoset '" + key +
                            "' violates perfect recall");
          }
        }
        n.infoset = it->second;
        infoset_nodes_[n.infoset].push_back(index);
      }
      nodes_[index] = n;

      for (int a = n.child_count - 1; a >= 0; --a) {
        std::vector<OwnHistory> own = item.own;
        if (n.player != kChancePlayer) own[n.player].emplace_back(n.infoset, a);
        stack.push_back({game.child(item.state, a), index, a, std::move(own)});
      }
    }
    if (payoffs_.empty()) throw GameError("game has no terminal states");
    payoff_interval_ = hi - lo;
  }

  std::string name_;
  int player_count_ = 0;
  double payoff_interval_ = 0.0;
  int max_action_count_ = 0;
  std::vector<Node> nodes_;
  std::vector<int> children_;
  std::vector<double> chance_probs_;
  std::vector<double> payoffs_;
  std::vector<InfosetInfo> infosets_;
  std::vector<std::vector<int>> infoset_nodes_;
  std::unordered_map<std::string, int> infoset_lookup_;
};

// Keyed by infoset string; ordered so dumps and iteration are deterministic.
using BehavioralProfile = std::map<std::string, std::vector<double>>;

// Profile aligned with GameTree::infosets(); what the solvers operate on.
using DenseProfile = std::vector<std::vector<double>>;

inline bool is_simplex(std::span<const double> p,
                       double tol = kProbabilityTolerance) {
  if (p.empty()) return false;
  double total = 0.0;
  for (double x : p) {
    if (!(x >= -tol)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= tol;
}

inline DenseProfile uniform_profile(const GameTree& tree) {
  DenseProfile out;
  out.reserve(tree.infoset_count());
  for (const InfosetInfo& info : tree.infosets()) {
    const auto n = info.actions.size();
    out.emplace_back(n, 1.0 / static_cast<double>(n));
  }
  return out;
}

// Throws GameError naming the first infoset missing from `profile`.
inline DenseProfile to_dense(const GameTree& tree,
                             const BehavioralProfile& profile) {
  DenseProfile out;
  out.reserve(tree.infoset_count());
  for (const InfosetInfo& info : tree.infosets()) {
    auto it = profile.find(info.key);
    if (it == profile.end()) {
      throw GameError("profile is missing infoset '" + info.key + "'");
    }
    if (it->second.size() != info.actions.size()) {
      throw GameError("profile entry for infoset '" + info.key +
                      "' has wrong length");
    }
    out.push_back(it->second);
  }
  return out;
}

inline BehavioralProfile to_behavioral(const GameTree& tree,
                                       const DenseProfile& dense) {
  BehavioralProfile out;
  for (std::size_t i = 0; i < tree.infoset_count(); ++i) {
    out.emplace(tree.infoset(static_cast<int>(i)).key, dense.at(i));
  }
  return out;
}

inline void validate_profile(const GameTree& tree, const DenseProfile& dense) {
  if (dense.size() != tree.infoset_count()) {
    throw GameError("profile does not cover the game's infosets");
  }
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (!is_simplex(dense[i])) {
      throw GameError("profile entry for infoset '" +
                      tree.infoset(static_cast<int>(i)).key +
                      "' is not a probability vector");
    }
  }
}

struct InfosetDescriptor {
  std::string key;
  PlayerId player;
  std::vector<std::string> actions;
};

// Decision infosets in first-visit (pre-order, action order) sequence.
inline std::vector<InfosetDescriptor> enumerate_infosets(const GameTree& tree) {
  std::vector<InfosetDescriptor> out;
  out.reserve(tree.infoset_count());
  for (const InfosetInfo& info : tree.infosets()) {
    out.push_back({info.key, info.player, info.actions});
  }
  return out;
}

inline std::vector<InfosetDescriptor> enumerate_infosets(const Game& game) {
  return enumerate_infosets(GameTree(game));
}

namespace detail {

// Probability the node's actor assigns to `action` (chance included).
inline double action_probability(const GameTree& tree, const DenseProfile& sigma,
                                 int node, int action) {
  const GameTree::Node& n = tree.node(node);
  if (n.player == kChancePlayer) return tree.chance_probs(node)[action];
  return sigma[n.infoset][action];
}

}  // namespace detail

// Exact expectation of every player's payoff under `sigma`.
inline std::vector<double> expected_value(const GameTree& tree,
                                          const DenseProfile& sigma) {
  const int players = tree.player_count();
  std::vector<double> value(players, 0.0);
  // Forward pass: reach of each node is the product along the root path.
  std::vector<double> reach(tree.node_count(), 0.0);
  reach[tree.root()] = 1.0;
  for (int i = 0; i < static_cast<int>(tree.node_count()); ++i) {
    const GameTree::Node& n = tree.node(i);
    if (n.player == kTerminalPlayer) {
      if (reach[i] == 0.0) continue;
      auto u = tree.payoffs(i);
      for (int p = 0; p < players; ++p) value[p] += reach[i] * u[p];
      continue;
    }
    for (int a = 0; a < n.child_count; ++a) {
      reach[tree.child(i, a)] =
          reach[i] * detail::action_probability(tree, sigma, i, a);
    }
  }
  return value;
}

inline std::vector<double> expected_value(const GameTree& tree,
                                          const BehavioralProfile& profile) {
  return expected_value(tree, to_dense(tree, profile));
}

struct ReachProbabilities {
  std::vector<double> own;       // pi^i: product of player i's own actions
  std::vector<double> external;  // pi^{-i}: everyone else, chance included
  double chance = 1.0;
};

// Per-node reach contributions, indexed by node.
inline std::vector<ReachProbabilities> reach_probabilities(
    const GameTree& tree, const DenseProfile& sigma) {
  const int players = tree.player_count();
  std::vector<ReachProbabilities> out(tree.node_count());
  out[tree.root()] = {std::vector<double>(players, 1.0),
                      std::vector<double>(players, 1.0), 1.0};
  for (int i = 0; i < static_cast<int>(tree.node_count()); ++i) {
    const GameTree::Node& n = tree.node(i);
    if (n.player == kTerminalPlayer) continue;
    for (int a = 0; a < n.child_count; ++a) {
      const double p = detail::action_probability(tree, sigma, i, a);
      ReachProbabilities r = out[i];
      if (n.player == kChancePlayer) {
        r.chance *= p;
        for (int q = 0; q < players; ++q) r.external[q] *= p;
      } else {
        r.own[n.player] *= p;
        for (int q = 0; q < players; ++q) {
          if (q != n.player) r.external[q] *= p;
        }
      }
      out[tree.child(i, a)] = std::move(r);
    }
  }
  return out;
}

inline std::vector<ReachProbabilities> reach_probabilities(
    const GameTree& tree, const BehavioralProfile& profile) {
  return reach_probabilities(tree, to_dense(tree, profile));
}

// pi^{-i}(I) for every infoset, summed over the nodes it contains.
inline std::vector<double> infoset_external_reach(
    const GameTree& tree, const std::vector<ReachProbabilities>& reach) {
  std::vector<double> out(tree.infoset_count(), 0.0);
  for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
    const int player = tree.infoset(static_cast<int>(s)).player;
    for (int node : tree.infoset_nodes(static_cast<int>(s))) {
      out[s] += reach[node].external[player];
    }
  }
  return out;
}

}  // namespace prefcfr
