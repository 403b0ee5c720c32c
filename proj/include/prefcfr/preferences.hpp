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
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefcfr/game.hpp"

namespace prefcfr {

// Preference degree for one action label. Without `infoset` the entry is a
// wildcard applying to every infoset that has the action.
struct DeltaEntry {
  std::optional<std::string> infoset;
  std::string action;
  double delta = 1.0;
};

// Vulnerability degree; without `infoset` it applies everywhere.
struct BetaEntry {
  std::optional<std::string> infoset;
  double beta = 0.0;
};

// Degrees resolved against a concrete game.
struct ResolvedPreferences {
  std::vector<std::vector<double>> delta;  // per infoset, per action
  std::vector<double> beta;                // per infoset
  double delta_star = 1.0;

  bool is_neutral() const {
    if (delta_star != 1.0) return false;
    return std::all_of(beta.begin(), beta.end(), [](double b) { return b == 0.0; });
  }
};

// Threshold above which the convergence slowdown gets noticeable.
inline constexpr double kDeltaWarningThreshold = 5.0;

class PreferenceConfig {
 public:
  PreferenceConfig() = default;
  PreferenceConfig(std::vector<DeltaEntry> deltas, std::vector<BetaEntry> betas)
      : deltas_(std::move(deltas)), betas_(std::move(betas)) {
    validate();
  }

  void add_delta(DeltaEntry entry) {
    check_delta(entry);
    deltas_.push_back(std::move(entry));
  }
  void add_beta(BetaEntry entry) {
    check_beta(entry);
    betas_.push_back(std::move(entry));
  }

  const std::vector<DeltaEntry>& deltas() const { return deltas_; }
  const std::vector<BetaEntry>& betas() const { return betas_; }
  bool empty() const { return deltas_.empty() && betas_.empty(); }

  double delta_star() const {
    double m = 1.0;
    for (const DeltaEntry& e : deltas_) m = std::max(m, e.delta);
    return m;
  }

  // Exact-key entries override wildcards; among equals the later entry wins.
  // Entries that match nothing in the game are rejected so that typos in
  // infoset keys or action labels do not silently do nothing.
  ResolvedPreferences resolve(const GameTree& tree) const {
    ResolvedPreferences out;
    out.delta.reserve(tree.infoset_count());
    out.beta.assign(tree.infoset_count(), 0.0);
    std::vector<bool> delta_used(deltas_.size(), false);
    std::vector<bool> beta_used(betas_.size(), false);
    for (std::size_t s = 0; s < tree.infoset_count(); ++s) {
      const InfosetInfo& info = tree.infoset(static_cast<int>(s));
      std::vector<double> d(info.actions.size(), 1.0);
      for (int pass = 0; pass < 2; ++pass) {
        const bool exact = pass == 1;
        for (std::size_t k = 0; k < deltas_.size(); ++k) {
          const DeltaEntry& e = deltas_[k];
          if (e.infoset.has_value() != exact) continue;
          if (exact && *e.infoset != info.key) continue;
          auto it = std::find(info.actions.begin(), info.actions.end(), e.action);
          if (it == info.actions.end()) continue;
          d[it - info.actions.begin()] = e.delta;
          delta_used[k] = true;
        }
        for (std::size_t k = 0; k < betas_.size(); ++k) {
          const BetaEntry& e = betas_[k];
          if (e.infoset.has_value() != exact) continue;
          if (exact && *e.infoset != info.key) continue;
          out.beta[s] = e.beta;
          beta_used[k] = true;
        }
      }
      for (double v : d) out.delta_star = std::max(out.delta_star, v);
      out.delta.push_back(std::move(d));
    }
    for (std::size_t k = 0; k < deltas_.size(); ++k) {
      if (!delta_used[k]) {
        throw std::invalid_argument("preference entry for action '" +
                                    deltas_[k].action + "'" +
                                    (deltas_[k].infoset
                                         ? " at infoset '" + *deltas_[k].infoset + "'"
                                         : std::string()) +
                                    " matches nothing in game " + tree.game_name());
      }
    }
    for (std::size_t k = 0; k < betas_.size(); ++k) {
      if (!beta_used[k]) {
        throw std::invalid_argument("vulnerability entry for infoset '" +
                                    betas_[k].infoset.value_or("*") +
                                    "' matches nothing in game " + tree.game_name());
      }
    }
    return out;
  }

  // Human-readable warnings; empty when the config is within guidance.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (const DeltaEntry& e : deltas_) {
      if (e.delta > kDeltaWarningThreshold) {
        std::ostringstream msg;
        msg << "preference degree " << e.delta << " for action '" << e.action
            << "' exceeds " << kDeltaWarningThreshold
            << "; expect noticeably slower convergence";
        if (std::find(out.begin(), out.end(), msg.str()) == out.end()) out.push_back(msg.str());
      }
    }
    return out;
  }

 private:
  static void check_delta(const DeltaEntry& e) {
    if (!(e.delta >= 1.0)) {
      throw std::invalid_argument("preference degree must be >= 1 (action '" +
                                  e.action + "')");
    }
    if (e.action.empty()) throw std::invalid_argument("preference entry needs an action");
  }
  static void check_beta(const BetaEntry& e) {
    if (!(e.beta >= 0.0)) throw std::invalid_argument("vulnerability degree must be >= 0");
  }
  void validate() const {
    for (const DeltaEntry& e : deltas_) check_delta(e);
    for (const BetaEntry& e : betas_) check_beta(e);
  }

  std::vector<DeltaEntry> deltas_;
  std::vector<BetaEntry> betas_;
};

// Parses "[infoset:]action=value[,...]" for delta, "[infoset=]value[,...]"
// for beta. Infoset keys may contain '|' but not ',' or '='.
inline std::vector<DeltaEntry> parse_delta_spec(const std::string& spec) {
  std::vector<DeltaEntry> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.rfind('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("bad delta spec item '" + item + "'");
    }
    DeltaEntry e;
    std::string lhs = item.substr(0, eq);
    e.delta = std::stod(item.substr(eq + 1));
    const auto colon = lhs.rfind(':');
    if (colon != std::string::npos) {
      e.infoset = lhs.substr(0, colon);
      e.action = lhs.substr(colon + 1);
    } else {
      e.action = lhs;
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<BetaEntry> parse_beta_spec(const std::string& spec) {
  std::vector<BetaEntry> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    BetaEntry e;
    const auto eq = item.rfind('=');
    if (eq == std::string::npos) {
      e.beta = std::stod(item);
    } else {
      e.infoset = item.substr(0, eq);
      e.beta = std::stod(item.substr(eq + 1));
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace prefcfr
