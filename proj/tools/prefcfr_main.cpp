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

// prefcfr: solve games, run seeded experiment matrices, evaluate strategy
// dumps.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prefcfr/experiment.hpp"
#include "prefcfr/style_experiment.hpp"

namespace {

using namespace prefcfr;
namespace fs = std::filesystem;

struct CommonSolveFlags {
  std::string game = "kuhn";
  std::vector<std::string> game_params;  // key=value
  std::string algo = "cfr";
  long iters = 10000;
  std::uint64_t seed = 0;
  std::string init = "uniform";
  std::string delta;
  std::string beta;
  std::string out;
  std::string checkpoints = "log";
  bool strict_bounds = false;
  bool wall_clock = false;
};

void add_solve_flags(CLI::App* cmd, CommonSolveFlags& f) {
  cmd->add_option("--game", f.game, "kuhn, small_poker, matching_pennies, rps, coordination");
  cmd->add_option("--param", f.game_params, "game parameter key=value (repeatable)");
  cmd->add_option("--algo", f.algo, "cfr, pref-rm, pref-br, mccfr");
  cmd->add_option("--iters", f.iters, "iterations");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--init", f.init, "initial profile: uniform or random");
  cmd->add_option("--delta", f.delta, "preference degrees: [infoset:]action=value,...");
  cmd->add_option("--beta", f.beta, "vulnerability degrees: [infoset=]value,...");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--checkpoints", f.checkpoints, "all, log, or an interval");
  cmd->add_flag("--strict-bounds", f.strict_bounds, "abort on a convergence-bound violation");
  cmd->add_flag("--wall-clock", f.wall_clock, "fill the wall_ms trace column");
}

GameParams parse_game_params(const std::vector<std::string>& items) {
  GameParams out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad --param '" + item + "'");
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

PreferenceConfig parse_preferences(const std::string& delta, const std::string& beta) {
  return PreferenceConfig(parse_delta_spec(delta), parse_beta_spec(beta));
}

SolverConfig solver_config_from_flags(const CommonSolveFlags& f) {
  SolverConfig c;
  c.algorithm = parse_algorithm(f.algo);
  c.iterations = f.iters;
  c.seed = f.seed;
  c.init = parse_init_mode(f.init);
  c.preferences = parse_preferences(f.delta, f.beta);
  c.checkpoints = CheckpointCadence::parse(f.checkpoints);
  c.strict_bounds = f.strict_bounds;
  c.record_wall_clock = f.wall_clock;
  return c;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_solve(const CommonSolveFlags& f) {
  ExperimentConfig c;
  c.game = f.game;
  c.game_params = parse_game_params(f.game_params);
  c.solver = solver_config_from_flags(f);
  c.base_seed = f.seed;
  c.output_dir = f.out;
  ExperimentResult r = run_experiment(c);
  const RunOutput& run = r.runs.front();
  print_warnings(run.warnings);
  const TraceRow& last = run.trace.back();
  std::cout << "game " << f.game << " algo " << f.algo << " iterations " << last.iteration
            << "\nexploitability " << format_double(*last.exploitability) << "\n";
  if (last.alpha) std::cout << "alpha " << format_double(*last.alpha) << "\n";
  const auto ev = expected_value(*r.tree, run.average_strategy);
  std::cout << "value";
  for (double v : ev) std::cout << ' ' << format_double(v);
  std::cout << "\n";
  if (f.out.empty()) {
    std::cout << strategy_to_json(*r.tree, run.average_strategy).dump(2) << "\n";
  } else {
    std::cout << "wrote " << (fs::path(f.out) / trace_file_name(0)).string() << "\n";
  }
  return 0;
}

void print_final(const std::string& label, const ExperimentResult& r) {
  const SummaryRow& e = r.final_summary("exploitability");
  std::cout << std::left << std::setw(28) << label << " exploitability mean "
            << format_double(e.mean);
  if (find_summary(r.summary, e.iteration, "alpha")) {
    const SummaryRow& a = r.final_summary("alpha");
    std::cout << "  alpha mean " << format_double(a.mean) << " [" << format_double(a.lo90)
              << ", " << format_double(a.hi90) << "]";
  }
  std::cout << "\n";
}

int cmd_experiment(const std::string& config_path, const std::string& out_override,
                   int workers) {
  ExperimentConfig c = experiment_config_from_json(read_json_file(config_path));
  if (!out_override.empty()) c.output_dir = out_override;
  if (workers > 0) c.workers = workers;
  for (const std::string& w : c.solver.preferences.warnings()) std::cerr << "warning: " << w << "\n";
  ExperimentResult r = run_experiment(c);
  print_final(c.label.empty() ? c.game : c.label, r);
  return 0;
}

int cmd_suite_kuhn(long iters, int runs, std::uint64_t seed, const std::string& out,
                   int workers, int baseline_runs) {
  std::vector<ExperimentConfig> configs;
  configs.push_back(kuhn_baseline_config(iters, baseline_runs, seed));
  for (ExperimentConfig& c : six_config_suite(iters, runs, seed)) configs.push_back(std::move(c));
  for (ExperimentConfig& c : configs) {
    c.workers = workers;
    if (!out.empty()) c.output_dir = (fs::path(out) / c.label).string();
    for (const std::string& w : c.solver.preferences.warnings()) {
      std::cerr << "warning: " << c.label << ": " << w << "\n";
    }
    ExperimentResult r = run_experiment(c);
    print_final(c.label, r);
  }
  return 0;
}

int cmd_eval(const std::string& game_name, const std::vector<std::string>& params,
             const std::vector<std::string>& dumps, bool permute) {
  auto game = build_game(game_name, parse_game_params(params));
  GameTree tree(*game);
  std::vector<DenseProfile> profiles;
  for (const std::string& path : dumps) {
    StrategyDump d = strategy_from_json(read_json_file(path));
    profiles.push_back(to_dense(tree, d.profile));
  }
  json out = json::object();
  json reports = json::array();
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    json rep = exploitability_to_json(exploitability(tree, profiles[k]));
    rep["strategy"] = dumps[k];
    reports.push_back(rep);
  }
  out["reports"] = reports;
  if (profiles.size() == static_cast<std::size_t>(tree.player_count())) {
    HeadToHeadResult h = head_to_head(tree, profiles, permute);
    out["head_to_head"] = {{"assignments", h.assignments},
                           {"seat_payoff", h.seat_payoff},
                           {"mean_payoff", h.mean_payoff}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_style(const std::string& game_name, const std::vector<std::string>& params,
              const std::string& dump, const std::vector<std::string>& keys, int first_player) {
  auto game = build_game(game_name, parse_game_params(params));
  GameTree tree(*game);
  const DenseProfile sigma = to_dense(tree, strategy_from_json(read_json_file(dump)).profile);
  std::vector<int> filter;
  if (!keys.empty()) {
    filter = infosets_matching(tree, keys);
  } else if (first_player >= 0) {
    filter = first_decision_infosets(tree, first_player);
  } else {
    filter = first_decision_infosets(tree);
  }
  StyleMetrics m = style_metrics(tree, sigma, filter);
  json freq = json::object();
  for (std::size_t a = 0; a < m.actions.size(); ++a) freq[m.actions[a]] = m.frequency[a];
  std::vector<std::string> names;
  for (int s : filter) names.push_back(tree.infoset(s).key);
  std::cout << json{{"infosets", names}, {"frequency", freq}, {"reach", m.total_reach}}.dump(2)
            << "\n";
  return 0;
}

int cmd_nf_solve(const std::string& game_name, const std::string& matrix_file,
                 const std::string& rule_name, long iters, const std::string& delta,
                 const std::string& beta, const std::string& out, bool strict) {
  MatrixGame game = [&]() {
    if (!matrix_file.empty()) return matrix_game_from_json(read_json_file(matrix_file));
    auto m = matrix_instance(game_name);
    if (!m) throw std::invalid_argument("'" + game_name + "' is not a matrix game");
    return *m;
  }();
  // Resolve degrees through the tree form so the same specs work everywhere.
  MatrixGameTree wrapped(game);
  GameTree tree(wrapped);
  ResolvedPreferences prefs = parse_preferences(delta, beta).resolve(tree);
  NormalFormPreferences nf;
  for (int p = 0; p < game.player_count(); ++p) {
    const int s = tree.infoset_index(MatrixGameTree::infoset_key_for(p));
    nf.delta.push_back(prefs.delta[s]);
    nf.beta.push_back(prefs.beta[s]);
  }
  NormalFormOptions options;
  options.strict_bounds = strict;
  NormalFormResult r = normal_form_solve(game, parse_update_rule(rule_name), nf, iters, options);

  ConvergenceTrace trace;
  for (const NormalFormTraceRow& row : r.trace) {
    TraceRow t;
    t.iteration = row.iteration;
    t.cone_distance = *std::max_element(row.cone_distance.begin(), row.cone_distance.end());
    t.bound = *std::max_element(row.bound.begin(), row.bound.end());
    trace.push_back(t);
  }
  if (!out.empty()) {
    std::ostringstream csv;
    write_trace_csv(csv, 0, trace);
    write_text_file(fs::path(out) / trace_file_name(0), csv.str());
  }
  json report = {{"game", game.name()},
                 {"rule", rule_name},
                 {"iterations", iters},
                 {"average_strategy", r.average_strategy},
                 {"final_max_regret", r.trace.back().max_regret},
                 {"final_cone_distance", r.trace.back().cone_distance},
                 {"halfspace_checks", r.halfspace_checks},
                 {"halfspace_failures", r.halfspace_failures},
                 {"distance_chain_failures", r.chain_failures},
                 {"bound_violations", r.bound_violations}};
  std::cout << report.dump(2) << "\n";
  return r.halfspace_failures == 0 ? 0 : 3;
}

int cmd_style_experiment(long iters) {
  StyleExperimentOptions o;
  o.iterations = iters;
  StyleExperimentResult r = run_style_experiment(o);
  json report = {{"style_infosets", r.style_infosets},
                 {"baseline_raise", r.baseline_style.frequency_of("Raise")},
                 {"styled_raise", r.styled_style.frequency_of("Raise")},
                 {"raise_ratio", r.raise_ratio},
                 {"baseline_exploitability", r.baseline_exploitability},
                 {"styled_exploitability", r.styled_exploitability},
                 {"head_to_head", r.head_to_head},
                 {"reference_pot", r.reference_pot},
                 {"loss_fraction_of_pot", r.loss_fraction_of_pot}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-guided counterfactual regret minimisation"};
  app.require_subcommand(1);

  CommonSolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "single solver run");
  add_solve_flags(solve, solve_flags);

  std::string config_path, exp_out;
  int exp_workers = 0;
  auto* experiment = app.add_subcommand("experiment", "run matrix from a config file");
  experiment->add_option("config", config_path, "experiment config (JSON)")->required();
  experiment->add_option("--out", exp_out, "override the output directory");
  experiment->add_option("--workers", exp_workers, "concurrent runs");

  long suite_iters = 10000;
  int suite_runs = 30, suite_baseline_runs = 100, suite_workers = 1;
  std::uint64_t suite_seed = 0;
  std::string suite_out;
  auto* suite = app.add_subcommand("suite-kuhn", "six preference settings plus the CFR baseline");
  suite->add_option("--iters", suite_iters, "iterations per run");
  suite->add_option("--runs", suite_runs, "runs per preference setting");
  suite->add_option("--baseline-runs", suite_baseline_runs, "runs of the CFR baseline");
  suite->add_option("--seed", suite_seed, "base seed");
  suite->add_option("--out", suite_out, "output directory (one subdirectory per setting)");
  suite->add_option("--workers", suite_workers, "concurrent runs");

  std::string eval_game = "kuhn";
  std::vector<std::string> eval_params, eval_dumps;
  bool eval_no_permute = false;
  auto* eval = app.add_subcommand("eval", "exploitability and head-to-head of strategy dumps");
  eval->add_option("--game", eval_game, "game name");
  eval->add_option("--param", eval_params, "game parameter key=value");
  eval->add_option("strategies", eval_dumps, "strategy dumps; one per seat for head-to-head")
      ->required();
  eval->add_flag("--no-permute", eval_no_permute, "keep the given seat order");

  std::string style_game = "kuhn", style_dump;
  std::vector<std::string> style_params, style_keys;
  int style_player = -1;
  auto* style = app.add_subcommand("style", "action frequencies of a strategy dump");
  style->add_option("--game", style_game, "game name");
  style->add_option("--param", style_params, "game parameter key=value");
  style->add_option("strategy", style_dump, "strategy dump")->required();
  style->add_option("--infoset", style_keys, "infoset keys to aggregate (repeatable)");
  style->add_option("--first-decision", style_player,
                    "aggregate the given player's first-decision infosets");

  std::string nf_game = "rps", nf_file, nf_rule = "rm", nf_delta, nf_beta, nf_out;
  long nf_iters = 10000;
  bool nf_strict = false;
  auto* nf = app.add_subcommand("nf-solve", "self-play on a matrix game with Blackwell monitors");
  nf->add_option("--game", nf_game, "matching_pennies, rps or coordination");
  nf->add_option("--matrix", nf_file, "matrix game file (JSON)");
  nf->add_option("--algo", nf_rule, "rm, pref-rm or pref-br");
  nf->add_option("--iters", nf_iters, "iterations");
  nf->add_option("--delta", nf_delta, "preference degrees, e.g. p0|:Rock=5");
  nf->add_option("--beta", nf_beta, "vulnerability degrees, e.g. 0.1 or p1|=0.1");
  nf->add_option("--out", nf_out, "output directory for the trace");
  nf->add_flag("--strict-bounds", nf_strict, "abort on a bound violation");

  std::string dump_game = "rps";
  auto* dump = app.add_subcommand("dump-matrix", "print a built-in matrix game as a file");
  dump->add_option("--game", dump_game, "matching_pennies, rps or coordination");

  long style_exp_iters = 10000;
  auto* style_exp = app.add_subcommand("style-experiment",
                                       "aggressive small_poker style versus the CFR baseline");
  style_exp->add_option("--iters", style_exp_iters, "iterations per solve");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_flags);
    if (*experiment) return cmd_experiment(config_path, exp_out, exp_workers);
    if (*suite) {
      return cmd_suite_kuhn(suite_iters, suite_runs, suite_seed, suite_out, suite_workers,
                            suite_baseline_runs);
    }
    if (*eval) return cmd_eval(eval_game, eval_params, eval_dumps, !eval_no_permute);
    if (*style) return cmd_style(style_game, style_params, style_dump, style_keys, style_player);
    if (*nf) {
      return cmd_nf_solve(nf_game, nf_file, nf_rule, nf_iters, nf_delta, nf_beta, nf_out,
                          nf_strict);
    }
    if (*dump) {
      auto m = matrix_instance(dump_game);
      if (!m) throw std::invalid_argument("'" + dump_game + "' is not a matrix game");
      std::cout << matrix_game_to_json(*m).dump(2) << "\n";
      return 0;
    }
    if (*style_exp) return cmd_style_experiment(style_exp_iters);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
