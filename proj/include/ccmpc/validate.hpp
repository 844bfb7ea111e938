// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo ground truth for computed plans: collision probabilities under
// fresh draws (never the planning ensemble), obstacle violation rates, the
// complexity audit, and suboptimality accounting.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccmpc/encoders.hpp"
#include "ccmpc/scenario.hpp"
#include "ccmpc/types.hpp"

namespace ccmpc {

struct McReport {
  long sample_count = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> pairs;
  // collision event: Euclidean distance below epsilon, per (pair, t)
  std::vector<std::vector<double>> collision_prob;  // [pair][t-1]
  std::vector<std::vector<double>> collision_se;    // sqrt(p(1-p)/S)
  std::vector<double> obstacle_prob;                // per agent, any t in 1..H

  struct Flag {
    int pair_index = 0;
    int t = 0;
    double prob = 0.0;
    double threshold = 0.0;  // delta + 3 SE
  };
  std::vector<Flag> flags;

  std::string to_json() const;
};

/// Draws S fresh trajectory realizations per agent, applies the plans
/// open-loop and counts epsilon-proximity events per (pair, t) as well as
/// obstacle entries per agent.  Deterministic in (scenario, plans, S, seed).
McReport mc_collision_prob(const ScenarioConfig& scenario,
                           const std::vector<std::vector<Vec2>>& plans, long S,
                           std::uint64_t seed);

/// Fraction of realizations whose trajectory enters any obstacle at any
/// t = 1..H, per agent.
std::vector<double> mc_obstacle_violation(const ScenarioConfig& scenario,
                                          const std::vector<std::vector<Vec2>>& plans, long S,
                                          std::uint64_t seed);

struct ComplexityAudit {
  bool pass = false;
  BinaryCounts expected;
  BinaryCounts meta;
  long model_binaries = 0;
  std::string diff;  // empty when pass
};

/// Checks the encoder's binary registry against the closed-form counts and
/// the model itself.
ComplexityAudit audit_complexity(const EncodedProblem& encoded, const ScenarioConfig& scenario);

/// 100 * (obj_ripp - obj_sa) / obj_sa.
double suboptimality_pct(double obj_ripp, double obj_sa);

}  // namespace ccmpc
