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
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefcfr/game.hpp"
#include "prefcfr/strategy_rules.hpp"

namespace prefcfr {

// Payoff tensors over joint pure actions, flattened row-major with player 0's
// action as the most significant index.
class MatrixGame {
 public:
  MatrixGame(std::string name, std::vector<int> action_counts,
             std::vector<std::vector<double>> payoffs,
             std::vector<std::vector<std::string>> action_labels = {})
      : name_(std::move(name)),
        action_counts_(std::move(action_counts)),
        payoffs_(std::move(payoffs)),
        labels_(std::move(action_labels)) {
    if (action_counts_.empty()) throw GameError("matrix game needs players");
    std::size_t cells = 1;
    for (int n : action_counts_) {
      if (n < 1) throw GameError("every player needs at least one action");
      cells *= static_cast<std::size_t>(n);
    }
    if (payoffs_.size() != action_counts_.size()) {
      throw GameError("one payoff tensor per player is required");
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& t : payoffs_) {
      if (t.size() != cells) throw GameError("payoff tensor has wrong size");
      for (double v : t) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    payoff_interval_ = hi - lo;
    if (labels_.empty()) {
      for (int n : action_counts_) {
        std::vector<std::string> l;
        for (int a = 0; a < n; ++a) l.push_back("a" + std::to_string(a));
        labels_.push_back(std::move(l));
      }
    }
    if (labels_.size() != action_counts_.size()) {
      throw GameError("action labels must be given for every player");
    }
    for (std::size_t p = 0; p < labels_.size(); ++p) {
      if (static_cast<int>(labels_[p].size()) != action_counts_[p]) {
        throw GameError("action label count mismatch");
      }
    }
  }

  const std::string& name() const { return name_; }
  int player_count() const { return static_cast<int>(action_counts_.size()); }
  int action_count(int player) const { return action_counts_.at(player); }
  const std::vector<int>& action_counts() const { return action_counts_; }
  const std::vector<std::string>& labels(int player) const { return labels_.at(player); }
  const std::vector<double>& payoff_tensor(int player) const { return payoffs_.at(player); }
  double payoff_interval() const { return payoff_interval_; }

  std::size_t flat_index(std::span<const int> joint) const {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < action_counts_.size(); ++p) {
      idx = idx * static_cast<std::size_t>(action_counts_[p]) +
            static_cast<std::size_t>(joint[p]);
    }
    return idx;
  }
  double payoff(int player, std::span<const int> joint) const {
    return payoffs_[player][flat_index(joint)];
  }

  // u^i(a, sigma^{-i}) for every pure action a of `player`.
  std::vector<double> action_values(const std::vector<std::vector<double>>& sigma,
                                    int player) const {
    check_profile(sigma);
    std::vector<double> out(action_counts_[player], 0.0);
    std::vector<int> joint(action_counts_.size(), 0);
    const std::vector<double>& u = payoffs_[player];
    for (std::size_t cell = 0; cell < u.size(); ++cell) {
      std::size_t rest = cell;
      for (int p = player_count() - 1; p >= 0; --p) {
        joint[p] = static_cast<int>(rest % action_counts_[p]);
        rest /= action_counts_[p];
      }
      double w = 1.0;
      for (int p = 0; p < player_count(); ++p) {
        if (p != player) w *= sigma[p][joint[p]];
      }
      out[joint[player]] += w * u[cell];
    }
    return out;
  }

  double expected_payoff(const std::vector<std::vector<double>>& sigma,
                         int player) const {
    const std::vector<double> v = action_values(sigma, player);
    double total = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) total += sigma[player][a] * v[a];
    return total;
  }

  void check_profile(const std::vector<std::vector<double>>& sigma) const {
    if (sigma.size() != action_counts_.size()) {
      throw std::invalid_argument("profile has wrong number of players");
    }
    for (std::size_t p = 0; p < sigma.size(); ++p) {
      if (static_cast<int>(sigma[p].size()) != action_counts_[p]) {
        throw std::invalid_argument("strategy dimension mismatch for player " +
                                    std::to_string(p));
      }
    }
  }

 private:
  std::string name_;
  std::vector<int> action_counts_;
  std::vector<std::vector<double>> payoffs_;
  std::vector<std::vector<std::string>> labels_;
  double payoff_interval_ = 0.0;
};

using MixedProfile = std::vector<std::vector<double>>;

// The matrix game as a tree: players move in seat order without observing
// each other. Infoset keys are "p<seat>|".
class MatrixGameTree final : public Game {
 public:
  explicit MatrixGameTree(MatrixGame game) : game_(std::move(game)) {}

  static std::string infoset_key_for(int player) {
    return "p" + std::to_string(player) + "|";
  }

  std::string name() const override { return game_.name(); }
  int player_count() const override { return game_.player_count(); }
  bool is_terminal(const State& s) const override {
    return static_cast<int>(s.size()) == game_.player_count();
  }
  std::vector<double> terminal_payoffs(const State& s) const override {
    std::vector<double> out;
    for (int p = 0; p < game_.player_count(); ++p) out.push_back(game_.payoff(p, s));
    return out;
  }
  PlayerId acting_player(const State& s) const override {
    return static_cast<PlayerId>(s.size());
  }
  std::vector<std::string> legal_actions(const State& s) const override {
    return game_.labels(static_cast<int>(s.size()));
  }
  std::vector<double> chance_distribution(const State&) const override {
    return {};
  }
  std::string infoset_key(const State& s) const override {
    return infoset_key_for(static_cast<int>(s.size()));
  }

  const MatrixGame& matrix() const { return game_; }

 private:
  MatrixGame game_;
};

// Component a holds u^i(a, sigma^{-i}) - u^i(sigma).
using RegretVector = std::vector<double>;

inline RegretVector regret_vector(const MatrixGame& game, const MixedProfile& sigma,
                                  int player) {
  std::vector<double> values = game.action_values(sigma, player);
  double u = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) u += sigma[player][a] * values[a];
  for (double& v : values) v -= u;
  return values;
}

// Running mean of regret vectors.
class AverageRegret {
 public:
  AverageRegret() = default;
  explicit AverageRegret(std::size_t actions) : mean_(actions, 0.0) {}
  explicit AverageRegret(std::vector<double> mean, long iterations = 1)
      : mean_(std::move(mean)), count_(iterations) {}

  void update(std::span<const double> r) {
    if (r.size() != mean_.size()) throw std::invalid_argument("regret size mismatch");
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t a = 0; a < mean_.size(); ++a) mean_[a] += (r[a] - mean_[a]) * inv;
  }

  const std::vector<double>& mean() const { return mean_; }
  long iterations() const { return count_; }
  std::size_t size() const { return mean_.size(); }

 private:
  std::vector<double> mean_;
  long count_ = 0;
};

// S = {x : x_a <= beta for all a}; beta = 0 is the Nash cone.
struct TargetCone {
  double beta = 0.0;
  explicit TargetCone(double b = 0.0) : beta(b) {
    if (!(beta >= 0.0)) throw std::invalid_argument("cone threshold must be >= 0");
  }
};

// Euclidean distance from the average regret to the (shifted) cone.
inline double cone_distance(std::span<const double> avg_regret,
                            const TargetCone& cone) {
  double sq = 0.0;
  for (double r : avg_regret) {
    const double excess = std::max(r - cone.beta, 0.0);
    sq += excess * excess;
  }
  return std::sqrt(sq);
}

inline double cone_distance(const AverageRegret& avg, const TargetCone& cone) {
  return cone_distance(avg.mean(), cone);
}

// Normal vector of the forcing half-space: delta-weighted positive part for
// regret-matching play, a one-hot vector at the delta-weighted argmax for
// best-response play. Empty when no component is positive.
inline std::vector<double> forcing_direction(std::span<const double> avg_regret,
                                             std::span<const double> delta,
                                             UpdateRule rule) {
  const bool any_positive = std::any_of(avg_regret.begin(), avg_regret.end(),
                                        [](double r) { return r > 0.0; });
  if (!any_positive) return {};
  std::vector<double> dir(avg_regret.size(), 0.0);
  if (rule == UpdateRule::kPrefBestResponse) {
    const std::size_t a = weighted_argmax(avg_regret, delta);
    dir[a] = avg_regret[a];
  } else {
    for (std::size_t a = 0; a < dir.size(); ++a) {
      const double w = rule == UpdateRule::kRegretMatching ? 1.0 : delta[a];
      dir[a] = w * std::max(avg_regret[a], 0.0);
    }
  }
  return dir;
}

// L1-normalised positive part of `chosen`. Returns nullopt when no component
// is positive; the caller then plays the fallback distribution.
inline std::optional<std::vector<double>> forcing_strategy(
    std::span<const double> chosen) {
  double total = 0.0;
  for (double r : chosen) total += std::max(r, 0.0);
  if (total <= 0.0) return std::nullopt;
  std::vector<double> out(chosen.size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = std::max(chosen[a], 0.0) / total;
  return out;
}

inline std::optional<std::vector<double>> forcing_strategy(const AverageRegret& avg) {
  return forcing_strategy(avg.mean());
}

// <loss, chosen / |chosen|_1 - played> <= 0, the condition under which the
// next regret vector lands in the forcing half-space.
inline bool forcing_halfspace_check(std::span<const double> loss,
                                    std::span<const double> chosen,
                                    std::span<const double> played,
                                    double tol = 1e-9) {
  auto forcing = forcing_strategy(chosen);
  if (!forcing) return true;  // already inside the cone; nothing to force
  double inner = 0.0;
  for (std::size_t a = 0; a < loss.size(); ++a) {
    inner += loss[a] * ((*forcing)[a] - played[a]);
  }
  return inner <= tol;
}

// The distance chain linking the cone projection and the half-space anchor:
// |R+|_2 <= sqrt(|A|) * delta(aP) / delta(aBR) * delta(aP) * R+(aP).
inline bool distance_chain_check(std::span<const double> avg_regret,
                                 std::span<const double> delta,
                                 double tol = 1e-9) {
  const std::size_t a_p = weighted_argmax(avg_regret, delta);
  std::size_t a_br = 0;
  for (std::size_t a = 1; a < avg_regret.size(); ++a) {
    if (avg_regret[a] > avg_regret[a_br]) a_br = a;
  }
  const double lhs = cone_distance(avg_regret, TargetCone(0.0));
  const double to_anchor = delta[a_p] * std::max(avg_regret[a_p], 0.0);
  const double rhs = std::sqrt(static_cast<double>(avg_regret.size())) *
                     (delta[a_p] / delta[a_br]) * to_anchor;
  return lhs <= rhs + tol;
}

struct NormalFormPreferences {
  std::vector<std::vector<double>> delta;  // per player; empty means all 1
  std::vector<double> beta;                // per player; empty means all 0
};

struct NormalFormOptions {
  bool strict_bounds = false;   // throw on a bound violation instead of counting
  bool store_history = false;   // keep per-iteration regrets and strategies
};

struct NormalFormTraceRow {
  long iteration = 0;
  std::vector<double> cone_distance;  // per player, to that player's cone
  std::vector<double> bound;          // per player
  std::vector<double> max_regret;     // per player, max component of average regret
};

struct NormalFormResult {
  MixedProfile average_strategy;
  std::vector<AverageRegret> average_regret;
  std::vector<NormalFormTraceRow> trace;
  long halfspace_checks = 0;
  long halfspace_failures = 0;
  long chain_checks = 0;
  long chain_failures = 0;
  long bound_violations = 0;
  // Populated with NormalFormOptions::store_history.
  std::vector<MixedProfile> played;
  std::vector<std::vector<RegretVector>> instantaneous_regret;  // [t][player]
};

// Cone-distance bound after t iterations: L*sqrt(|A|)/sqrt(t) for plain
// regret matching, L*|A|*delta*/sqrt(t) for the preference rules.
inline double cone_distance_bound(UpdateRule rule, double payoff_interval,
                                  int action_count, double delta_star, long t) {
  const double root_t = std::sqrt(static_cast<double>(t));
  if (rule == UpdateRule::kRegretMatching) {
    return payoff_interval * std::sqrt(static_cast<double>(action_count)) / root_t;
  }
  return payoff_interval * action_count * delta_star / root_t;
}

// Simultaneous self-play: at iteration t every player plays the iterate
// derived from its average regret after t - 1 steps.
inline NormalFormResult normal_form_solve(const MatrixGame& game, UpdateRule rule,
                                          const NormalFormPreferences& prefs,
                                          long iterations,
                                          const NormalFormOptions& options = {}) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  const int players = game.player_count();
  std::vector<std::vector<double>> delta = prefs.delta;
  std::vector<double> beta = prefs.beta;
  if (delta.empty()) {
    for (int p = 0; p < players; ++p) delta.emplace_back(game.action_count(p), 1.0);
  }
  if (beta.empty()) beta.assign(players, 0.0);
  if (static_cast<int>(delta.size()) != players || static_cast<int>(beta.size()) != players) {
    throw std::invalid_argument("preferences must be given for every player");
  }
  std::vector<double> delta_star(players, 1.0);
  for (int p = 0; p < players; ++p) {
    if (static_cast<int>(delta[p].size()) != game.action_count(p)) {
      throw std::invalid_argument("preference vector has wrong length");
    }
    for (double d : delta[p]) {
      if (!(d >= 1.0)) throw std::invalid_argument("preference degree must be >= 1");
      delta_star[p] = std::max(delta_star[p], d);
    }
    if (!(beta[p] >= 0.0)) throw std::invalid_argument("vulnerability degree must be >= 0");
  }

  const double L = game.payoff_interval();
  NormalFormResult result;
  result.average_regret.reserve(players);
  for (int p = 0; p < players; ++p) result.average_regret.emplace_back(game.action_count(p));
  MixedProfile strategy_sum(players);
  for (int p = 0; p < players; ++p) strategy_sum[p].assign(game.action_count(p), 0.0);

  MixedProfile sigma(players);
  std::vector<std::vector<double>> chosen(players);
  std::vector<double> scratch;
  for (long t = 1; t <= iterations; ++t) {
    for (int p = 0; p < players; ++p) {
      const std::vector<double>& avg = result.average_regret[p].mean();
      sigma[p].assign(avg.size(), 0.0);
      scratch.assign(avg.size(), 0.0);
      next_strategy_into(rule, avg, delta[p], beta[p], scratch, sigma[p]);
      std::vector<double> shifted = apply_vulnerability(avg, beta[p]);
      chosen[p] = forcing_direction(shifted, delta[p], rule);
    }
    if (options.store_history) result.played.push_back(sigma);

    std::vector<RegretVector> regrets(players);
    for (int p = 0; p < players; ++p) {
      const std::vector<double> loss = game.action_values(sigma, p);
      if (!chosen[p].empty()) {
        ++result.halfspace_checks;
        if (!forcing_halfspace_check(loss, chosen[p], sigma[p])) {
          ++result.halfspace_failures;
        }
      }
      regrets[p] = regret_vector(game, sigma, p);
      for (std::size_t a = 0; a < sigma[p].size(); ++a) strategy_sum[p][a] += sigma[p][a];
    }
    if (options.store_history) result.instantaneous_regret.push_back(regrets);

    NormalFormTraceRow row;
    row.iteration = t;
    for (int p = 0; p < players; ++p) {
      AverageRegret& avg = result.average_regret[p];
      avg.update(regrets[p]);
      const std::vector<double> shifted = apply_vulnerability(avg.mean(), beta[p]);
      if (std::any_of(shifted.begin(), shifted.end(), [](double r) { return r > 0.0; })) {
        ++result.chain_checks;
        if (!distance_chain_check(shifted, delta[p])) ++result.chain_failures;
      }
      const double dist = cone_distance(avg, TargetCone(beta[p]));
      const double bound =
          cone_distance_bound(rule, L, game.action_count(p), delta_star[p], t);
      if (dist > bound + 1e-6) {
        ++result.bound_violations;
        if (options.strict_bounds) {
          throw std::runtime_error("cone distance bound violated at iteration " +
                                   std::to_string(t));
        }
      }
      row.cone_distance.push_back(dist);
      row.bound.push_back(bound);
      row.max_regret.push_back(*std::max_element(avg.mean().begin(), avg.mean().end()));
    }
    result.trace.push_back(std::move(row));
  }
  if (result.bound_violations > 0 && !options.strict_bounds) {
    std::cerr << "warning: " << result.bound_violations
              << " cone-distance bound violations in " << game.name() << "\n";
  }

  result.average_strategy = strategy_sum;
  for (auto& s : result.average_strategy) {
    for (double& x : s) x /= static_cast<double>(iterations);
  }
  return result;
}

}  // namespace prefcfr
