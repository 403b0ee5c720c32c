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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prefcfr/evaluation.hpp"
#include "prefcfr/game.hpp"
#include "prefcfr/preferences.hpp"
#include "prefcfr/strategy_rules.hpp"

namespace prefcfr {

enum class Algorithm { kCfr, kPrefCfrRm, kPrefCfrBr, kMccfrExternal };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kCfr: return "cfr";
    case Algorithm::kPrefCfrRm: return "pref-rm";
    case Algorithm::kPrefCfrBr: return "pref-br";
    case Algorithm::kMccfrExternal: return "mccfr";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  if (name == "cfr") return Algorithm::kCfr;
  if (name == "pref-rm" || name == "pref-cfr-rm") return Algorithm::kPrefCfrRm;
  if (name == "pref-br" || name == "pref-cfr-br") return Algorithm::kPrefCfrBr;
  if (name == "mccfr" || name == "mccfr-external") return Algorithm::kMccfrExternal;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

inline UpdateRule default_rule(Algorithm a) {
  switch (a) {
    case Algorithm::kPrefCfrRm: return UpdateRule::kPrefRegretMatching;
    case Algorithm::kPrefCfrBr: return UpdateRule::kPrefBestResponse;
    default: return UpdateRule::kRegretMatching;
  }
}

enum class InitMode { kUniform, kRandomSimplex };

// Which iterations get an exploitability checkpoint.
struct CheckpointCadence {
  enum class Kind { kAll, kLog, kEvery } kind = Kind::kLog;
  long every = 1;

  static CheckpointCadence parse(std::string_view text) {
    if (text == "all") return {Kind::kAll, 1};
    if (text == "log") return {Kind::kLog, 1};
    const long n = std::stol(std::string(text));
    if (n < 1) throw std::invalid_argument("checkpoint interval must be >= 1");
    return {Kind::kEvery, n};
  }
  std::string to_string() const {
    if (kind == Kind::kAll) return "all";
    if (kind == Kind::kLog) return "log";
    return std::to_string(every);
  }
};

// Every iteration up to 100, then twenty per decade, always ending at the
// final iteration.
inline std::vector<long> checkpoint_iterations(long iterations,
                                               const CheckpointCadence& cadence) {
  std::vector<long> out;
  switch (cadence.kind) {
    case CheckpointCadence::Kind::kAll:
      for (long t = 1; t <= iterations; ++t) out.push_back(t);
      break;
    case CheckpointCadence::Kind::kEvery:
      for (long t = cadence.every; t <= iterations; t += cadence.every) out.push_back(t);
      break;
    case CheckpointCadence::Kind::kLog:
      for (long t = 1; t <= std::min(iterations, 100L); ++t) out.push_back(t);
      for (int k = 1;; ++k) {
        const long t = std::lround(100.0 * std::pow(10.0, k / 20.0));
        if (t > iterations) break;
        if (t > out.back()) out.push_back(t);
      }
      break;
  }
  if (out.empty() || out.back() != iterations) out.push_back(iterations);
  return out;
}

struct SolverConfig {
  Algorithm algorithm = Algorithm::kCfr;
  long iterations = 1000;
  std::uint64_t seed = 0;
  InitMode init = InitMode::kUniform;
  PreferenceConfig preferences;
  // Overrides the algorithm's update rule per player when non-empty.
  std::vector<UpdateRule> per_player_rule;
  CheckpointCadence checkpoints;
  bool strict_bounds = false;
  bool record_wall_clock = false;
  // Keeps every iterate and instantaneous regret; for small verification runs.
  bool store_history = false;

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if ((algorithm == Algorithm::kCfr || algorithm == Algorithm::kMccfrExternal) &&
        !preferences.empty()) {
      throw std::invalid_argument(std::string(to_string(algorithm)) +
                                  " does not take preference or vulnerability degrees");
    }
  }
};

// Bits-to-double conversion so sampling is identical on every platform.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform draw from the simplex (Dirichlet with unit concentration).
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> out(n);
  double total = 0.0;
  for (double& x : out) {
    x = -std::log1p(-uniform_unit(rng));
    total += x;
  }
  for (double& x : out) x /= total;
  return out;
}

inline DenseProfile initial_profile(const GameTree& tree, InitMode mode,
                                    std::mt19937_64& rng) {
  if (mode == InitMode::kUniform) return uniform_profile(tree);
  DenseProfile out;
  for (const InfosetInfo& info : tree.infosets()) {
    out.push_back(random_simplex(info.actions.size(), rng));
  }
  return out;
}

// Average counterfactual regret and average-strategy accumulators for every
// infoset, aligned with GameTree::infosets().
class RegretTables {
 public:
  RegretTables() = default;
  explicit RegretTables(const GameTree& tree) {
    for (const InfosetInfo& info : tree.infosets()) {
      avg_regret_.emplace_back(info.actions.size(), 0.0);
      strategy_num_.emplace_back(info.actions.size(), 0.0);
    }
    strategy_den_.assign(tree.infoset_count(), 0.0);
    scratch_.assign(tree.infoset_count(), {});
    for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
      scratch_[s].assign(avg_regret_[s].size(), 0.0);
    }
  }

  long iterations() const { return iterations_; }
  std::size_t size() const { return avg_regret_.size(); }
  const std::vector<double>& average_regret(int s) const { return avg_regret_[s]; }
  const std::vector<double>& strategy_numerator(int s) const { return strategy_num_[s]; }
  double strategy_denominator(int s) const { return strategy_den_[s]; }

  // Own-reach-weighted average of the iterates; uniform where never reached.
  DenseProfile average_strategy() const {
    DenseProfile out;
    out.reserve(size());
    for (std::size_t s = 0; s < size(); ++s) {
      const auto n = strategy_num_[s].size();
      std::vector<double> p(n, 1.0 / static_cast<double>(n));
      if (strategy_den_[s] > 0.0) {
        double total = 0.0;
        for (double x : strategy_num_[s]) total += x;
        if (total > 0.0) {
          for (std::size_t a = 0; a < n; ++a) p[a] = strategy_num_[s][a] / total;
        }
      }
      out.push_back(std::move(p));
    }
    return out;
  }

  // Instantaneous regret buffer for the iteration in progress.
  std::vector<double>& pending(int s) { return scratch_[s]; }

  void add_strategy(int s, double weight, std::span<const double> sigma) {
    if (weight == 0.0) return;
    for (std::size_t a = 0; a < sigma.size(); ++a) strategy_num_[s][a] += weight * sigma[a];
    strategy_den_[s] += weight;
  }

  void begin_iteration() { ++iterations_; }

  // Folds the pending buffers of the selected infosets into the running
  // mean with divisor iterations(), then clears them.
  template <class Pred>
  void commit(Pred&& include) {
    const double inv = 1.0 / static_cast<double>(iterations_);
    for (std::size_t s = 0; s < size(); ++s) {
      if (!include(static_cast<int>(s))) continue;
      auto& mean = avg_regret_[s];
      auto& r = scratch_[s];
      for (std::size_t a = 0; a < mean.size(); ++a) {
        mean[a] += (r[a] - mean[a]) * inv;
        r[a] = 0.0;
      }
    }
  }
  void commit() {
    commit([](int) { return true; });
  }

 private:
  std::vector<std::vector<double>> avg_regret_;
  std::vector<std::vector<double>> strategy_num_;
  std::vector<double> strategy_den_;
  std::vector<std::vector<double>> scratch_;
  long iterations_ = 0;
};

// One full-width iteration with simultaneous updates: every player's
// counterfactual regrets under `sigma` are folded into the running means and
// the average-strategy accumulators gain pi^i(I) * sigma(I). Returns the
// instantaneous counterfactual regrets.
inline std::vector<std::vector<double>> cfr_traverse(const GameTree& tree,
                                                     const DenseProfile& sigma,
                                                     RegretTables& tables) {
  const int players = tree.player_count();
  const int nodes = static_cast<int>(tree.node_count());
  // own reach per player, then chance reach, per node
  const int stride = players + 1;
  std::vector<double> reach(static_cast<std::size_t>(nodes) * stride, 0.0);
  std::fill(reach.begin(), reach.begin() + stride, 1.0);
  for (int h = 0; h < nodes; ++h) {
    const GameTree::Node& n = tree.node(h);
    if (n.player == kTerminalPlayer) continue;
    const double* r = &reach[static_cast<std::size_t>(h) * stride];
    for (int a = 0; a < n.child_count; ++a) {
      double* c = &reach[static_cast<std::size_t>(tree.child(h, a)) * stride];
      std::copy(r, r + stride, c);
      if (n.player == kChancePlayer) {
        c[players] *= tree.chance_probs(h)[a];
      } else {
        c[n.player] *= sigma[n.infoset][a];
      }
    }
  }

  tables.begin_iteration();
  std::vector<double> value(static_cast<std::size_t>(nodes) * players, 0.0);
  for (int h = nodes - 1; h >= 0; --h) {
    const GameTree::Node& n = tree.node(h);
    double* v = &value[static_cast<std::size_t>(h) * players];
    if (n.player == kTerminalPlayer) {
      auto u = tree.payoffs(h);
      std::copy(u.begin(), u.end(), v);
      continue;
    }
    for (int a = 0; a < n.child_count; ++a) {
      const double p = n.player == kChancePlayer ? tree.chance_probs(h)[a]
                                                 : sigma[n.infoset][a];
      const double* cv = &value[static_cast<std::size_t>(tree.child(h, a)) * players];
      for (int q = 0; q < players; ++q) v[q] += p * cv[q];
    }
    if (n.player == kChancePlayer) continue;
    const int i = n.player;
    const double* r = &reach[static_cast<std::size_t>(h) * stride];
    double external = r[players];
    for (int q = 0; q < players; ++q) {
      if (q != i) external *= r[q];
    }
    if (external != 0.0) {
      std::vector<double>& pend = tables.pending(n.infoset);
      for (int a = 0; a < n.child_count; ++a) {
        const double child_v =
            value[static_cast<std::size_t>(tree.child(h, a)) * players + i];
        pend[a] += external * (child_v - v[i]);
      }
    }
  }

  std::vector<std::vector<double>> instantaneous(tree.infoset_count());
  for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
    instantaneous[s] = tables.pending(static_cast<int>(s));
    // pi^i(I) is the same at every node of I under perfect recall.
    const int h = tree.infoset_nodes(static_cast<int>(s)).front();
    const int i = tree.infoset(static_cast<int>(s)).player;
    tables.add_strategy(static_cast<int>(s),
                        reach[static_cast<std::size_t>(h) * stride + i], sigma[s]);
  }
  tables.commit();
  return instantaneous;
}

// Draws an index from a probability vector.
struct RandomSampler {
  std::mt19937_64* rng;
  int sample(std::span<const double> probs) {
    const double u = uniform_unit(*rng);
    double acc = 0.0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
      acc += probs[a];
      if (u < acc) return static_cast<int>(a);
    }
    // Round-off: return the last action with positive mass.
    for (std::size_t a = probs.size(); a-- > 0;) {
      if (probs[a] > 0.0) return static_cast<int>(a);
    }
    return 0;
  }
};

// Current iterate at every infoset from average regrets.
class StrategyRule {
 public:
  StrategyRule(const GameTree& tree, std::vector<UpdateRule> per_player,
               ResolvedPreferences prefs)
      : tree_(&tree), rules_(std::move(per_player)), prefs_(std::move(prefs)) {}

  UpdateRule rule_for(PlayerId p) const { return rules_.at(p); }
  const ResolvedPreferences& preferences() const { return prefs_; }

  void current_into(const RegretTables& tables, int s, std::span<double> out) const {
    const auto& r = tables.average_regret(s);
    scratch_.assign(r.size(), 0.0);
    next_strategy_into(rules_[tree_->infoset(s).player], r, prefs_.delta[s],
                       prefs_.beta[s], scratch_, out);
  }

  DenseProfile current(const RegretTables& tables) const {
    DenseProfile out;
    out.reserve(tables.size());
    for (std::size_t s = 0; s < tables.size(); ++s) {
      std::vector<double> p(tables.average_regret(static_cast<int>(s)).size());
      current_into(tables, static_cast<int>(s), p);
      out.push_back(std::move(p));
    }
    return out;
  }

 private:
  const GameTree* tree_;
  std::vector<UpdateRule> rules_;
  ResolvedPreferences prefs_;
  mutable std::vector<double> scratch_;
};

namespace detail {

template <class Sampler>
double external_sampling_walk(const GameTree& tree, const DenseProfile& sigma,
                              RegretTables& tables, PlayerId traverser, int h,
                              Sampler& sampler) {
  const GameTree::Node& n = tree.node(h);
  if (n.player == kTerminalPlayer) return tree.payoffs(h)[traverser];
  if (n.player == kChancePlayer) {
    const int a = sampler.sample(tree.chance_probs(h));
    return external_sampling_walk(tree, sigma, tables, traverser, tree.child(h, a), sampler);
  }
  const std::vector<double>& s = sigma[n.infoset];
  if (n.player != traverser) {
    tables.add_strategy(n.infoset, 1.0, s);
    const int a = sampler.sample(s);
    return external_sampling_walk(tree, sigma, tables, traverser, tree.child(h, a), sampler);
  }
  std::vector<double> child_value(n.child_count);
  double v = 0.0;
  for (int a = 0; a < n.child_count; ++a) {
    child_value[a] =
        external_sampling_walk(tree, sigma, tables, traverser, tree.child(h, a), sampler);
    v += s[a] * child_value[a];
  }
  std::vector<double>& pend = tables.pending(n.infoset);
  for (int a = 0; a < n.child_count; ++a) pend[a] += child_value[a] - v;
  return v;
}

}  // namespace detail

// One external-sampling pass for `traverser`: its decisions expand every
// action, chance and the other players sample a single action from
// `sigma`. Sampled regrets of the traverser's infosets are folded into the
// running means (divisor tables.iterations(), which the caller advances once
// per iteration via begin_iteration). Samplers' infosets on the path gain
// their current strategy in the average-strategy accumulators.
template <class Sampler>
void mccfr_external_iteration(const GameTree& tree, const DenseProfile& sigma,
                              RegretTables& tables, PlayerId traverser,
                              Sampler& sampler) {
  if (tables.iterations() < 1) {
    throw std::logic_error("call begin_iteration before an external-sampling pass");
  }
  detail::external_sampling_walk(tree, sigma, tables, traverser, tree.root(), sampler);
  tables.commit([&](int s) { return tree.infoset(s).player == traverser; });
}

struct SolverHistory {
  std::vector<DenseProfile> profiles;                    // sigma_t
  std::vector<std::vector<std::vector<double>>> regrets;  // r_t per infoset
};

struct SolverResult {
  DenseProfile average_strategy;
  ConvergenceTrace trace;
  RegretTables tables;
  std::vector<long> bound_violations;
  std::vector<std::string> warnings;
  std::optional<SolverHistory> history;
};

inline bool is_kuhn(const GameTree& tree) {
  return tree.game_name() == "kuhn" && tree.infoset_index("J|") >= 0;
}

// Runs the configured algorithm and records exploitability (and alpha for
// Kuhn) at the configured checkpoints.
inline SolverResult run_solver(const GameTree& tree, const SolverConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const int players = tree.player_count();

  std::vector<UpdateRule> rules = config.per_player_rule;
  if (rules.empty()) rules.assign(players, default_rule(config.algorithm));
  if (static_cast<int>(rules.size()) != players) {
    throw std::invalid_argument("per-player rule list must name every player");
  }
  ResolvedPreferences prefs = config.preferences.resolve(tree);
  StrategyRule rule(tree, rules, prefs);

  SolverResult result;
  result.warnings = config.preferences.warnings();
  result.tables = RegretTables(tree);
  if (config.store_history) result.history.emplace();

  const BoundKind bound_kind = config.algorithm == Algorithm::kCfr ||
                                       config.algorithm == Algorithm::kMccfrExternal
                                   ? BoundKind::kVanilla
                                   : BoundKind::kPreference;
  const double L = tree.payoff_interval();
  const int action_count = tree.max_action_count();
  const bool kuhn = is_kuhn(tree);
  const std::vector<long> checkpoints = checkpoint_iterations(config.iterations, config.checkpoints);
  std::size_t next_checkpoint = 0;

  const auto start = std::chrono::steady_clock::now();
  DenseProfile sigma = initial_profile(tree, config.init, rng);
  RandomSampler sampler{&rng};
  for (long t = 1; t <= config.iterations; ++t) {
    if (t > 1) sigma = rule.current(result.tables);
    if (result.history) result.history->profiles.push_back(sigma);

    if (config.algorithm == Algorithm::kMccfrExternal) {
      result.tables.begin_iteration();
      for (PlayerId p = 0; p < players; ++p) {
        if (p > 0) {
          // Later traversers see the regrets committed by earlier ones.
          for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
            if (tree.infoset(static_cast<int>(s)).player == p - 1) {
              rule.current_into(result.tables, static_cast<int>(s), sigma[s]);
            }
          }
        }
        mccfr_external_iteration(tree, sigma, result.tables, p, sampler);
      }
    } else {
      auto inst = cfr_traverse(tree, sigma, result.tables);
      if (result.history) result.history->regrets.push_back(std::move(inst));
    }

    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      ++next_checkpoint;
      TraceRow row;
      row.iteration = t;
      const DenseProfile avg = result.tables.average_strategy();
      row.exploitability = exploitability(tree, avg).aggregate;
      if (kuhn) row.alpha = extract_alpha(tree, avg);
      row.bound = monitored_bound(bound_kind, L, action_count, prefs.delta_star, t);
      if (config.record_wall_clock) {
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      }
      if (*row.exploitability > *row.bound + 1e-6) {
        result.bound_violations.push_back(t);
        if (config.strict_bounds) {
          throw std::runtime_error("exploitability bound violated at iteration " +
                                   std::to_string(t));
        }
      }
      result.trace.push_back(row);
    }
  }
  if (!result.bound_violations.empty()) {
    result.warnings.push_back(std::to_string(result.bound_violations.size()) +
                              " checkpoints exceeded the exploitability bound");
  }
  result.average_strategy = result.tables.average_strategy();
  return result;
}

}  // namespace prefcfr
