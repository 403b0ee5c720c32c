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
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prefcfr {

// How a player turns average regrets into the next iterate.
enum class UpdateRule {
  kRegretMatching,      // plain regret matching
  kPrefRegretMatching,  // delta-weighted regret matching
  kPrefBestResponse,    // delta-weighted argmax of regrets
};

inline std::string_view to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::kRegretMatching: return "rm";
    case UpdateRule::kPrefRegretMatching: return "pref-rm";
    case UpdateRule::kPrefBestResponse: return "pref-br";
  }
  return "?";
}

namespace detail {

inline void uniform_into(std::span<double> out) {
  const double p = 1.0 / static_cast<double>(out.size());
  std::fill(out.begin(), out.end(), p);
}

}  // namespace detail

// Distribution used when no regret is positive: mass proportional to
// delta - 1, or uniform when every delta is 1.
inline void preference_fallback_into(std::span<const double> delta,
                                     std::span<double> out) {
  double total = 0.0;
  for (double d : delta) total += d - 1.0;
  if (total <= 0.0) {
    detail::uniform_into(out);
    return;
  }
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = (delta[a] - 1.0) / total;
}

inline void next_strategy_rm_into(std::span<const double> regret,
                                  std::span<double> out) {
  double total = 0.0;
  for (double r : regret) total += std::max(r, 0.0);
  if (total <= 0.0) {
    detail::uniform_into(out);
    return;
  }
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = std::max(regret[a], 0.0) / total;
  }
}

inline void next_strategy_pref_rm_into(std::span<const double> regret,
                                       std::span<const double> delta,
                                       std::span<double> out) {
  double total = 0.0;
  for (std::size_t a = 0; a < regret.size(); ++a) {
    total += delta[a] * std::max(regret[a], 0.0);
  }
  if (total <= 0.0) {
    preference_fallback_into(delta, out);
    return;
  }
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = delta[a] * std::max(regret[a], 0.0) / total;
  }
}

// Index of the first action maximising delta(a) * regret(a).
inline std::size_t weighted_argmax(std::span<const double> regret,
                                   std::span<const double> delta) {
  std::size_t best = 0;
  double best_value = delta[0] * regret[0];
  for (std::size_t a = 1; a < regret.size(); ++a) {
    const double v = delta[a] * regret[a];
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

inline void next_strategy_pref_br_into(std::span<const double> regret,
                                       std::span<const double> delta,
                                       std::span<double> out) {
  const bool any_positive =
      std::any_of(regret.begin(), regret.end(), [](double r) { return r > 0.0; });
  if (!any_positive) {
    preference_fallback_into(delta, out);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  out[weighted_argmax(regret, delta)] = 1.0;
}

// B = R - beta, componentwise.
inline std::vector<double> apply_vulnerability(std::span<const double> regret,
                                               double beta) {
  if (beta < 0.0) throw std::invalid_argument("vulnerability degree must be >= 0");
  std::vector<double> shifted(regret.begin(), regret.end());
  for (double& b : shifted) b -= beta;
  return shifted;
}

// Full update at one infoset: shift by beta, then apply `rule`. `scratch`
// must have the same length as `regret`.
inline void next_strategy_into(UpdateRule rule, std::span<const double> regret,
                               std::span<const double> delta, double beta,
                               std::span<double> scratch,
                               std::span<double> out) {
  std::span<const double> r = regret;
  if (beta != 0.0) {
    for (std::size_t a = 0; a < regret.size(); ++a) scratch[a] = regret[a] - beta;
    r = scratch;
  }
  switch (rule) {
    case UpdateRule::kRegretMatching:
      next_strategy_rm_into(r, out);
      return;
    case UpdateRule::kPrefRegretMatching:
      next_strategy_pref_rm_into(r, delta, out);
      return;
    case UpdateRule::kPrefBestResponse:
      next_strategy_pref_br_into(r, delta, out);
      return;
  }
}

inline std::vector<double> next_strategy_rm(std::span<const double> regret) {
  std::vector<double> out(regret.size());
  next_strategy_rm_into(regret, out);
  return out;
}

inline std::vector<double> next_strategy_pref_rm(std::span<const double> regret,
                                                 std::span<const double> delta) {
  std::vector<double> out(regret.size());
  next_strategy_pref_rm_into(regret, delta, out);
  return out;
}

inline std::vector<double> next_strategy_pref_br(std::span<const double> regret,
                                                 std::span<const double> delta) {
  std::vector<double> out(regret.size());
  next_strategy_pref_br_into(regret, delta, out);
  return out;
}

}  // namespace prefcfr
