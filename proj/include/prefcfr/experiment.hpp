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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "prefcfr/games/registry.hpp"
#include "prefcfr/io.hpp"
#include "prefcfr/solver.hpp"

namespace prefcfr {

struct ExperimentConfig {
  std::string label;
  std::string game = "kuhn";
  GameParams game_params;
  SolverConfig solver;
  int runs = 1;
  std::uint64_t base_seed = 0;
  int workers = 1;
  std::string output_dir;  // empty: nothing is written

  void validate() const {
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    solver.validate();
  }
  std::uint64_t seed_for(int run) const { return base_seed + static_cast<std::uint64_t>(run); }
};

// ---- config serialisation -------------------------------------------------

inline InitMode parse_init_mode(const std::string& s) {
  if (s == "uniform") return InitMode::kUniform;
  if (s == "random") return InitMode::kRandomSimplex;
  throw std::invalid_argument("unknown init mode '" + s + "'");
}

inline std::string to_string(InitMode m) {
  return m == InitMode::kUniform ? "uniform" : "random";
}

inline UpdateRule parse_update_rule(const std::string& s) {
  if (s == "rm") return UpdateRule::kRegretMatching;
  if (s == "pref-rm") return UpdateRule::kPrefRegretMatching;
  if (s == "pref-br") return UpdateRule::kPrefBestResponse;
  throw std::invalid_argument("unknown update rule '" + s + "'");
}

inline json preferences_to_json(const PreferenceConfig& prefs) {
  json deltas = json::array();
  for (const DeltaEntry& e : prefs.deltas()) {
    json item = json::object();
    if (e.infoset) item["infoset"] = *e.infoset;
    item["action"] = e.action;
    item["delta"] = e.delta;
    deltas.push_back(item);
  }
  json betas = json::array();
  for (const BetaEntry& e : prefs.betas()) {
    json item = json::object();
    if (e.infoset) item["infoset"] = *e.infoset;
    item["beta"] = e.beta;
    betas.push_back(item);
  }
  return {{"delta", deltas}, {"beta", betas}};
}

inline PreferenceConfig preferences_from_json(const json& j) {
  reject_unknown_fields(j, {"delta", "beta"}, "preferences");
  PreferenceConfig out;
  for (const json& e : j.value("delta", json::array())) {
    reject_unknown_fields(e, {"infoset", "action", "delta"}, "delta entry");
    DeltaEntry d;
    if (e.contains("infoset")) d.infoset = e.at("infoset").get<std::string>();
    d.action = e.at("action").get<std::string>();
    d.delta = e.at("delta").get<double>();
    out.add_delta(std::move(d));
  }
  for (const json& e : j.value("beta", json::array())) {
    reject_unknown_fields(e, {"infoset", "beta"}, "beta entry");
    BetaEntry b;
    if (e.contains("infoset")) b.infoset = e.at("infoset").get<std::string>();
    b.beta = e.at("beta").get<double>();
    out.add_beta(std::move(b));
  }
  return out;
}

inline json solver_config_to_json(const SolverConfig& c) {
  json rules = json::array();
  for (UpdateRule r : c.per_player_rule) rules.push_back(std::string(to_string(r)));
  return {{"algorithm", std::string(to_string(c.algorithm))},
          {"iterations", c.iterations},
          {"init", to_string(c.init)},
          {"preferences", preferences_to_json(c.preferences)},
          {"per_player_rule", rules},
          {"checkpoints", c.checkpoints.to_string()},
          {"strict_bounds", c.strict_bounds},
          {"record_wall_clock", c.record_wall_clock}};
}

inline SolverConfig solver_config_from_json(const json& j) {
  reject_unknown_fields(j,
                        {"algorithm", "iterations", "init", "preferences", "per_player_rule",
                         "checkpoints", "strict_bounds", "record_wall_clock"},
                        "solver");
  SolverConfig c;
  c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  c.iterations = j.value("iterations", c.iterations);
  c.init = parse_init_mode(j.value("init", std::string("uniform")));
  if (j.contains("preferences")) c.preferences = preferences_from_json(j.at("preferences"));
  for (const json& r : j.value("per_player_rule", json::array())) {
    c.per_player_rule.push_back(parse_update_rule(r.get<std::string>()));
  }
  c.checkpoints = CheckpointCadence::parse(j.value("checkpoints", std::string("log")));
  c.strict_bounds = j.value("strict_bounds", false);
  c.record_wall_clock = j.value("record_wall_clock", false);
  return c;
}

inline json experiment_config_to_json(const ExperimentConfig& c) {
  json params = json::object();
  for (const auto& [k, v] : c.game_params) params[k] = v;
  return {{"schema_version", kSchemaVersion},
          {"label", c.label},
          {"game", {{"name", c.game}, {"params", params}}},
          {"solver", solver_config_to_json(c.solver)},
          {"runs", c.runs},
          {"base_seed", c.base_seed},
          {"workers", c.workers},
          {"output_dir", c.output_dir}};
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown_fields(j,
                        {"schema_version", "label", "game", "solver", "runs", "base_seed",
                         "workers", "output_dir"},
                        "experiment config");
  if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion) {
    throw IoError("experiment config: missing or unsupported schema_version");
  }
  ExperimentConfig c;
  try {
    c.label = j.value("label", std::string());
    const json& g = j.at("game");
    reject_unknown_fields(g, {"name", "params"}, "game");
    c.game = g.at("name").get<std::string>();
    if (g.contains("params")) {
      for (const auto& item : g.at("params").items()) {
        c.game_params[item.key()] = item.value().get<double>();
      }
    }
    c.solver = solver_config_from_json(j.at("solver"));
    c.runs = j.value("runs", 1);
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.workers = j.value("workers", 1);
    c.output_dir = j.value("output_dir", std::string());
  } catch (const json::exception& e) {
    throw IoError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---- summary statistics ---------------------------------------------------

// Linear interpolation between order statistics at rank q * (n - 1).
inline double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

struct SummaryRow {
  long iteration = 0;
  std::string metric;
  double mean = 0.0;
  double lo90 = 0.0;  // 5th percentile
  double hi90 = 0.0;  // 95th percentile
};

using SummaryStats = std::vector<SummaryRow>;

inline constexpr const char* kSummaryHeader = "iteration,metric,mean,lo90,hi90";

// Per-checkpoint mean and 5th-95th percentile band of exploitability (and
// alpha when every trace has it) across runs.
inline SummaryStats summarize(const std::vector<ConvergenceTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("summarize needs at least one trace");
  const std::size_t rows = traces.front().size();
  for (const auto& t : traces) {
    if (t.size() != rows) throw std::invalid_argument("traces have misaligned checkpoints");
    for (std::size_t k = 0; k < rows; ++k) {
      if (t[k].iteration != traces.front()[k].iteration) {
        throw std::invalid_argument("traces have misaligned checkpoints");
      }
    }
  }
  using Getter = std::optional<double> TraceRow::*;
  const std::vector<std::pair<std::string, Getter>> metrics = {
      {"exploitability", &TraceRow::exploitability},
      {"alpha", &TraceRow::alpha},
      {"cone_distance", &TraceRow::cone_distance}};

  SummaryStats out;
  for (std::size_t k = 0; k < rows; ++k) {
    for (const auto& [name, field] : metrics) {
      std::vector<double> values;
      for (const auto& t : traces) {
        if ((t[k].*field).has_value()) values.push_back(*(t[k].*field));
      }
      if (values.size() != traces.size()) continue;
      SummaryRow row;
      row.iteration = traces.front()[k].iteration;
      row.metric = name;
      row.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                 static_cast<double>(values.size());
      row.lo90 = empirical_quantile(values, 0.05);
      row.hi90 = empirical_quantile(values, 0.95);
      out.push_back(std::move(row));
    }
  }
  return out;
}

inline void write_summary_csv(std::ostream& os, const SummaryStats& stats) {
  os << kSummaryHeader << '\n';
  for (const SummaryRow& r : stats) {
    os << r.iteration << ',' << r.metric << ',' << format_double(r.mean) << ','
       << format_double(r.lo90) << ',' << format_double(r.hi90) << '\n';
  }
}

inline const SummaryRow* find_summary(const SummaryStats& stats, long iteration,
                                      const std::string& metric) {
  for (const SummaryRow& r : stats) {
    if (r.iteration == iteration && r.metric == metric) return &r;
  }
  return nullptr;
}

// ---- runner ---------------------------------------------------------------

struct RunOutput {
  int run_id = 0;
  std::uint64_t seed = 0;
  ConvergenceTrace trace;
  DenseProfile average_strategy;
  std::vector<std::string> warnings;
};

struct ExperimentResult {
  std::shared_ptr<const GameTree> tree;
  std::vector<RunOutput> runs;
  SummaryStats summary;

  const SummaryRow& final_summary(const std::string& metric) const {
    const long last = runs.front().trace.back().iteration;
    const SummaryRow* r = find_summary(summary, last, metric);
    if (!r) throw std::out_of_range("no summary for metric '" + metric + "'");
    return *r;
  }
};

inline std::string trace_file_name(int run) { return "trace_" + std::to_string(run) + ".csv"; }
inline std::string strategy_file_name(int run) {
  return "strategy_" + std::to_string(run) + ".json";
}

// Runs `config.runs` independent seeded solves (seed = base_seed + run) on up
// to `config.workers` threads. Files are written only after every run
// finished, so a failed run leaves no partial output.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto game = build_game(config.game, config.game_params);
  auto tree = std::make_shared<const GameTree>(*game);
  // Resolve preferences up front so config errors surface before any run.
  config.solver.preferences.resolve(*tree);

  ExperimentResult result;
  result.tree = tree;
  result.runs.resize(config.runs);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (int run = next++; run < config.runs; run = next++) {
      try {
        SolverConfig sc = config.solver;
        sc.seed = config.seed_for(run);
        SolverResult r = run_solver(*tree, sc);
        RunOutput& out = result.runs[run];
        out.run_id = run;
        out.seed = sc.seed;
        out.trace = std::move(r.trace);
        out.average_strategy = std::move(r.average_strategy);
        out.warnings = std::move(r.warnings);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int threads = std::min(config.workers, config.runs);
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<ConvergenceTrace> traces;
  for (const RunOutput& r : result.runs) traces.push_back(r.trace);
  result.summary = summarize(traces);

  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    for (const RunOutput& r : result.runs) {
      std::ostringstream csv;
      write_trace_csv(csv, r.run_id, r.trace);
      write_text_file(dir / trace_file_name(r.run_id), csv.str());
      write_text_file(dir / strategy_file_name(r.run_id),
                      strategy_to_json(*tree, r.average_strategy).dump(2) + "\n");
    }
    std::ostringstream summary;
    write_summary_csv(summary, result.summary);
    write_text_file(dir / "summary.csv", summary.str());
    json meta = {{"band", "lo90/hi90 are the empirical 5th/95th percentiles across runs "
                          "(linear interpolation between order statistics)"},
                 {"config", experiment_config_to_json(config)}};
    write_text_file(dir / "summary.meta.json", meta.dump(2) + "\n");
  }
  return result;
}

// Player 1's first-decision infosets in Kuhn poker.
inline const std::vector<std::string>& kuhn_opening_infosets() {
  static const std::vector<std::string> keys = {"J|", "Q|", "K|"};
  return keys;
}

// The six preference settings for Kuhn poker, in order: BR with Bet at 10,
// BR with Bet at 5, RM with Bet at 5, RM with Pass at 5, BR with Pass at 5,
// BR with Pass at 10. Degrees apply at J|, Q| and K|; everything else is 1.
inline std::vector<ExperimentConfig> six_config_suite(long iterations = 10000, int runs = 30,
                                                      std::uint64_t base_seed = 0) {
  struct Setting {
    Algorithm algorithm;
    const char* action;
    double delta;
  };
  const Setting settings[] = {
      {Algorithm::kPrefCfrBr, "Bet", 10.0}, {Algorithm::kPrefCfrBr, "Bet", 5.0},
      {Algorithm::kPrefCfrRm, "Bet", 5.0},  {Algorithm::kPrefCfrRm, "Pass", 5.0},
      {Algorithm::kPrefCfrBr, "Pass", 5.0}, {Algorithm::kPrefCfrBr, "Pass", 10.0},
  };
  std::vector<ExperimentConfig> out;
  int index = 1;
  for (const Setting& s : settings) {
    ExperimentConfig c;
    std::ostringstream label;
    label << "setting" << index++ << "_" << to_string(s.algorithm) << "_" << s.action << "_"
          << s.delta;
    c.label = label.str();
    c.game = "kuhn";
    c.solver.algorithm = s.algorithm;
    c.solver.iterations = iterations;
    c.solver.init = InitMode::kRandomSimplex;
    for (const std::string& key : kuhn_opening_infosets()) {
      c.solver.preferences.add_delta({key, s.action, s.delta});
    }
    c.runs = runs;
    c.base_seed = base_seed;
    out.push_back(std::move(c));
  }
  return out;
}

// Vanilla CFR from random initial profiles, the reference the suite is
// compared against.
inline ExperimentConfig kuhn_baseline_config(long iterations = 10000, int runs = 100,
                                             std::uint64_t base_seed = 0) {
  ExperimentConfig c;
  c.label = "baseline_cfr";
  c.game = "kuhn";
  c.solver.algorithm = Algorithm::kCfr;
  c.solver.iterations = iterations;
  c.solver.init = InitMode::kRandomSimplex;
  c.runs = runs;
  c.base_seed = base_seed;
  return c;
}

}  // namespace prefcfr
