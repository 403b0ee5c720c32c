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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "prefcfr/evaluation.hpp"
#include "prefcfr/game.hpp"
#include "prefcfr/normal_form.hpp"

namespace prefcfr {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest representation that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, end);
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline constexpr const char* kTraceHeader =
    "run_id,iteration,exploitability,alpha,cone_distance,bound,wall_ms";

inline void write_trace_csv(std::ostream& os, int run_id, const ConvergenceTrace& trace,
                            bool header = true) {
  if (header) os << kTraceHeader << '\n';
  for (const TraceRow& row : trace) {
    os << run_id << ',' << row.iteration << ',' << format_optional(row.exploitability)
       << ',' << format_optional(row.alpha) << ',' << format_optional(row.cone_distance)
       << ',' << format_optional(row.bound) << ',' << format_optional(row.wall_ms) << '\n';
  }
}

// Reads one run's rows back; the header line is required.
inline ConvergenceTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) {
    throw IoError("trace csv has an unexpected header");
  }
  ConvergenceTrace out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 7) cells.emplace_back();
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    TraceRow row;
    row.iteration = std::stol(cells[1]);
    row.exploitability = opt(cells[2]);
    row.alpha = opt(cells[3]);
    row.cone_distance = opt(cells[4]);
    row.bound = opt(cells[5]);
    row.wall_ms = opt(cells[6]);
    out.push_back(row);
  }
  return out;
}

// List of {infoset, actions, probabilities}, sorted by infoset key.
inline json strategy_to_json(const GameTree& tree, const DenseProfile& sigma) {
  BehavioralProfile ordered = to_behavioral(tree, sigma);
  json entries = json::array();
  for (const auto& [key, probs] : ordered) {
    const InfosetInfo& info = tree.infoset(tree.infoset_index(key));
    entries.push_back({{"infoset", key}, {"actions", info.actions}, {"probabilities", probs}});
  }
  return {{"schema_version", kSchemaVersion}, {"game", tree.game_name()},
          {"strategy", entries}};
}

struct StrategyDump {
  std::string game;
  BehavioralProfile profile;
  std::map<std::string, std::vector<std::string>> actions;
};

inline StrategyDump strategy_from_json(const json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != kSchemaVersion) {
    throw IoError("strategy dump: missing or unsupported schema_version");
  }
  StrategyDump out;
  out.game = j.at("game").get<std::string>();
  for (const json& e : j.at("strategy")) {
    const std::string key = e.at("infoset").get<std::string>();
    auto probs = e.at("probabilities").get<std::vector<double>>();
    auto actions = e.at("actions").get<std::vector<std::string>>();
    if (probs.size() != actions.size() || !is_simplex(probs)) {
      throw IoError("strategy dump: infoset '" + key + "' is not a probability vector");
    }
    if (!out.profile.emplace(key, std::move(probs)).second) {
      throw IoError("strategy dump: duplicate infoset '" + key + "'");
    }
    out.actions.emplace(key, std::move(actions));
  }
  return out;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// Rejects keys outside `allowed`; `where` names the object in messages.
inline void reject_unknown_fields(const json& j, const std::set<std::string>& allowed,
                                  const std::string& where) {
  if (!j.is_object()) throw IoError(where + " must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw IoError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

// Matrix game file:
//   {"schema_version": 1, "name": "...", "action_counts": [n0, n1, ...],
//    "action_labels": [[...], ...],            (optional)
//    "payoffs": [[player 0 tensor], [player 1 tensor], ...]}
// Tensors are flattened row-major with player 0's action most significant.
inline json matrix_game_to_json(const MatrixGame& game) {
  json labels = json::array();
  json payoffs = json::array();
  for (int p = 0; p < game.player_count(); ++p) {
    labels.push_back(game.labels(p));
    payoffs.push_back(game.payoff_tensor(p));
  }
  return {{"schema_version", kSchemaVersion},
          {"name", game.name()},
          {"action_counts", game.action_counts()},
          {"action_labels", labels},
          {"payoffs", payoffs}};
}

inline MatrixGame matrix_game_from_json(const json& j) {
  reject_unknown_fields(j, {"schema_version", "name", "action_counts", "action_labels", "payoffs"},
                        "matrix game");
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw IoError("matrix game: missing or unsupported schema_version");
  }
  std::vector<std::vector<std::string>> labels;
  if (j.contains("action_labels")) {
    labels = j.at("action_labels").get<std::vector<std::vector<std::string>>>();
  }
  try {
    return MatrixGame(j.value("name", std::string("matrix")),
                      j.at("action_counts").get<std::vector<int>>(),
                      j.at("payoffs").get<std::vector<std::vector<double>>>(),
                      std::move(labels));
  } catch (const json::exception& e) {
    throw IoError(std::string("matrix game: ") + e.what());
  }
}

inline json exploitability_to_json(const ExploitabilityReport& report) {
  return {{"exploitability", report.aggregate},
          {"per_player", report.per_player},
          {"on_policy_value", report.on_policy_value},
          {"best_response_value", report.best_response_value}};
}

}  // namespace prefcfr
