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
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefcfr/game.hpp"

namespace prefcfr {

struct BestResponse {
  DenseProfile strategy;  // one-hot at the responder's infosets, copy elsewhere
  double value = 0.0;
};

// Exact pure best response of `player` to the rest of `sigma`. Each infoset
// takes the action with the highest counterfactual value under the
// opponents' and chance reach; ties and unreachable infosets take the first
// action.
inline BestResponse best_response(const GameTree& tree, const DenseProfile& sigma,
                                  PlayerId player) {
  validate_profile(tree, sigma);
  if (player < 0 || player >= tree.player_count()) {
    throw std::invalid_argument("best_response: player out of range");
  }
  const auto reach = reach_probabilities(tree, sigma);
  const int nodes = static_cast<int>(tree.node_count());
  std::vector<double> value(nodes, 0.0);
  std::vector<char> value_done(nodes, 0);
  std::vector<int> choice(tree.infoset_count(), -1);

  // Values depend only on deeper infosets of the same player (perfect
  // recall), so memoised recursion terminates.
  std::function<double(int)> node_value;
  std::function<int(int)> infoset_choice;
  node_value = [&](int h) -> double {
    if (value_done[h]) return value[h];
    const GameTree::Node& n = tree.node(h);
    double v = 0.0;
    if (n.player == kTerminalPlayer) {
      v = tree.payoffs(h)[player];
    } else if (n.player == player) {
      v = node_value(tree.child(h, infoset_choice(n.infoset)));
    } else {
      for (int a = 0; a < n.child_count; ++a) {
        const double p = n.player == kChancePlayer ? tree.chance_probs(h)[a]
                                                   : sigma[n.infoset][a];
        if (p != 0.0) v += p * node_value(tree.child(h, a));
      }
    }
    value[h] = v;
    value_done[h] = 1;
    return v;
  };
  infoset_choice = [&](int s) -> int {
    if (choice[s] >= 0) return choice[s];
    const int actions = static_cast<int>(tree.infoset(s).actions.size());
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < actions; ++a) {
      double cf = 0.0;
      for (int h : tree.infoset_nodes(s)) {
        const double w = reach[h].external[player];
        if (w != 0.0) cf += w * node_value(tree.child(h, a));
      }
      if (cf > best_value + 1e-13) {
        best = a;
        best_value = cf;
      }
    }
    choice[s] = best;
    return best;
  };

  BestResponse out;
  out.value = node_value(tree.root());
  out.strategy = sigma;
  for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
    if (tree.infoset(static_cast<int>(s)).player != player) continue;
    const int a = infoset_choice(static_cast<int>(s));
    std::fill(out.strategy[s].begin(), out.strategy[s].end(), 0.0);
    out.strategy[s][a] = 1.0;
  }
  return out;
}

inline BestResponse best_response(const GameTree& tree,
                                  const BehavioralProfile& profile,
                                  PlayerId player) {
  return best_response(tree, to_dense(tree, profile), player);
}

struct ExploitabilityReport {
  std::vector<double> per_player;  // u^i(BR, sigma^{-i}) - u^i(sigma)
  double aggregate = 0.0;          // mean of per_player
  std::vector<double> on_policy_value;
  std::vector<double> best_response_value;
  std::vector<DenseProfile> best_responses;
};

inline ExploitabilityReport exploitability(const GameTree& tree,
                                           const DenseProfile& sigma) {
  ExploitabilityReport report;
  report.on_policy_value = expected_value(tree, sigma);
  for (int p = 0; p < tree.player_count(); ++p) {
    BestResponse br = best_response(tree, sigma, p);
    report.best_response_value.push_back(br.value);
    report.per_player.push_back(br.value - report.on_policy_value[p]);
    report.best_responses.push_back(std::move(br.strategy));
  }
  report.aggregate =
      std::accumulate(report.per_player.begin(), report.per_player.end(), 0.0) /
      static_cast<double>(tree.player_count());
  return report;
}

inline ExploitabilityReport exploitability(const GameTree& tree,
                                           const BehavioralProfile& profile) {
  return exploitability(tree, to_dense(tree, profile));
}

// Bet probability with a Jack at player 1's first decision in Kuhn poker.
inline double extract_alpha(const BehavioralProfile& profile) {
  auto it = profile.find("J|");
  if (it == profile.end()) throw std::invalid_argument("profile has no infoset 'J|'");
  if (it->second.size() != 2) throw std::invalid_argument("'J|' is not a Kuhn infoset");
  return it->second[1];
}

inline double extract_alpha(const GameTree& tree, const DenseProfile& sigma) {
  const int s = tree.infoset_index("J|");
  if (s < 0) throw std::invalid_argument("game has no infoset 'J|'");
  return sigma.at(s).at(1);
}

struct HeadToHeadResult {
  std::vector<std::vector<int>> assignments;     // [k][seat] -> profile index
  std::vector<std::vector<double>> seat_payoff;  // [k][seat]
  std::vector<double> mean_payoff;               // per profile, over assignments
};

// Exact expected payoffs when profile k plays seat assignments[..][seat] = k.
// With `seat_permutations` every assignment of profiles to seats is played
// and each profile's payoff is averaged over them.
inline HeadToHeadResult head_to_head(const GameTree& tree,
                                     const std::vector<DenseProfile>& profiles,
                                     bool seat_permutations) {
  const int players = tree.player_count();
  if (static_cast<int>(profiles.size()) != players) {
    throw std::invalid_argument("head_to_head needs one profile per seat");
  }
  for (const auto& p : profiles) validate_profile(tree, p);
  HeadToHeadResult out;
  std::vector<int> perm(players);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    out.assignments.push_back(perm);
  } while (seat_permutations && std::next_permutation(perm.begin(), perm.end()));

  out.mean_payoff.assign(players, 0.0);
  for (const auto& assign : out.assignments) {
    DenseProfile composite(tree.infoset_count());
    for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
      const int seat = tree.infoset(static_cast<int>(s)).player;
      composite[s] = profiles[assign[seat]][s];
    }
    std::vector<double> v = expected_value(tree, composite);
    out.seat_payoff.push_back(v);
    for (int seat = 0; seat < players; ++seat) out.mean_payoff[assign[seat]] += v[seat];
  }
  for (double& m : out.mean_payoff) m /= static_cast<double>(out.assignments.size());
  return out;
}

struct StyleMetrics {
  std::vector<std::string> actions;  // union of labels, first-seen order
  std::vector<double> frequency;     // reach-weighted, sums to 1
  double total_reach = 0.0;

  double frequency_of(const std::string& label) const {
    auto it = std::find(actions.begin(), actions.end(), label);
    return it == actions.end() ? 0.0 : frequency[it - actions.begin()];
  }
};

// Reach-weighted mean action distribution over the selected infosets, with
// reach pi_sigma(I) computed under `sigma` itself. Actions are matched by
// label. If none of the selected infosets is reachable the plain mean is
// returned.
inline StyleMetrics style_metrics(const GameTree& tree, const DenseProfile& sigma,
                                  const std::vector<int>& infosets) {
  if (infosets.empty()) throw std::invalid_argument("style_metrics: empty infoset filter");
  validate_profile(tree, sigma);
  const auto reach = reach_probabilities(tree, sigma);
  StyleMetrics out;
  std::vector<double> weights;
  for (int s : infosets) {
    double w = 0.0;
    for (int h : tree.infoset_nodes(s)) {
      double full = reach[h].chance;
      for (double own : reach[h].own) full *= own;
      w += full;
    }
    weights.push_back(w);
    out.total_reach += w;
    for (const std::string& label : tree.infoset(s).actions) {
      if (std::find(out.actions.begin(), out.actions.end(), label) == out.actions.end()) {
        out.actions.push_back(label);
      }
    }
  }
  if (out.total_reach <= 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0);
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  out.frequency.assign(out.actions.size(), 0.0);
  for (std::size_t k = 0; k < infosets.size(); ++k) {
    const InfosetInfo& info = tree.infoset(infosets[k]);
    for (std::size_t a = 0; a < info.actions.size(); ++a) {
      const auto idx =
          std::find(out.actions.begin(), out.actions.end(), info.actions[a]) -
          out.actions.begin();
      out.frequency[idx] += weights[k] / total * sigma[infosets[k]][a];
    }
  }
  return out;
}

// Infosets where `player` acts for the first time on the path (no earlier
// decision of theirs above any node in the set). All players when nullopt.
inline std::vector<int> first_decision_infosets(const GameTree& tree,
                                                std::optional<PlayerId> player = {}) {
  std::vector<int> out;
  for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
    const InfosetInfo& info = tree.infoset(static_cast<int>(s));
    if (player && info.player != *player) continue;
    bool first = true;
    for (int h : tree.infoset_nodes(static_cast<int>(s))) {
      for (int up = tree.node(h).parent; up >= 0; up = tree.node(up).parent) {
        if (tree.node(up).player == info.player) {
          first = false;
          break;
        }
      }
      if (!first) break;
    }
    if (first) out.push_back(static_cast<int>(s));
  }
  return out;
}

inline std::vector<int> infosets_matching(const GameTree& tree,
                                          const std::vector<std::string>& keys) {
  std::vector<int> out;
  for (const std::string& k : keys) {
    const int s = tree.infoset_index(k);
    if (s < 0) throw std::invalid_argument("unknown infoset '" + k + "'");
    out.push_back(s);
  }
  return out;
}

struct TraceRow {
  long iteration = 0;
  std::optional<double> exploitability;
  std::optional<double> alpha;
  std::optional<double> cone_distance;
  std::optional<double> bound;
  std::optional<double> wall_ms;
};

using ConvergenceTrace = std::vector<TraceRow>;

enum class BoundKind {
  kVanilla,     // L * sqrt(|A|) / sqrt(t) on exploitability
  kPreference,  // L * |A| * delta* / sqrt(t) on exploitability
  kNormalForm,  // L * |A| * delta* / sqrt(t) on cone distance
};

inline double monitored_bound(BoundKind kind, double payoff_interval,
                              int action_count, double delta_star, long t) {
  const double root_t = std::sqrt(static_cast<double>(t));
  if (kind == BoundKind::kVanilla) {
    return payoff_interval * std::sqrt(static_cast<double>(action_count)) / root_t;
  }
  return payoff_interval * action_count * delta_star / root_t;
}

// Iterations whose monitored quantity exceeds the bound by more than 1e-6.
inline std::vector<long> bound_monitor(const ConvergenceTrace& trace,
                                       double payoff_interval, int action_count,
                                       double delta_star, BoundKind kind) {
  if (trace.empty()) throw std::invalid_argument("bound_monitor: empty trace");
  std::vector<long> violations;
  for (const TraceRow& row : trace) {
    const std::optional<double>& measured =
        kind == BoundKind::kNormalForm ? row.cone_distance : row.exploitability;
    if (!measured) continue;
    const double bound =
        monitored_bound(kind, payoff_interval, action_count, delta_star, row.iteration);
    if (*measured > bound + 1e-6) violations.push_back(row.iteration);
  }
  return violations;
}

}  // namespace prefcfr
