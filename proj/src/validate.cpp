// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/validate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ccmpc/disturbance.hpp"
#include "ccmpc/dynamics.hpp"
#include "ccmpc/rng.hpp"

namespace ccmpc {

namespace {

constexpr std::uint64_t kMcTag = 0x4d43;      // fresh-draw validation streams
constexpr std::uint64_t kInitTag = 0x4d6330;  // initial-state streams

struct Sweep {
  std::vector<std::vector<long>> collision_hits;  // [pair][t-1]
  std::vector<long> obstacle_hits;                // [agent]
};

/// One pass over S realizations counting both event families.
Sweep mc_sweep(const ScenarioConfig& scenario, const std::vector<std::vector<Vec2>>& plans,
               long S, std::uint64_t seed) {
  const int M = scenario.agent_count();
  const int H = scenario.horizon;
  if (static_cast<int>(plans.size()) != M)
    throw std::invalid_argument("mc_sweep: one control sequence per agent required");
  for (const auto& u : plans)
    if (static_cast<int>(u.size()) != H)
      throw std::invalid_argument("mc_sweep: control sequence length must equal the horizon");

  const auto pairs = agent_pairs(M);
  Sweep sweep;
  sweep.collision_hits.assign(pairs.size(), std::vector<long>(H, 0));
  sweep.obstacle_hits.assign(M, 0);

  std::vector<std::vector<Vec4>> states(M);  // [agent][t]
  for (auto& s : states) s.resize(H + 1);

  for (long r = 0; r < S; ++r) {
    for (int i = 0; i < M; ++i) {
      const AgentSpec& a = scenario.agents[i];
      const std::uint64_t rs = mix_seed(mix_seed(seed, kMcTag, static_cast<std::uint64_t>(r)),
                                        static_cast<std::uint64_t>(i));
      // fresh initial draw and fresh noise sequence for this realization
      const auto init = draw_gaussian(a.C0, 1, 1, mix_seed(rs, kInitTag));
      const auto noise = draw_noise(a.noise, H, 1, rs);
      states[i][0] = a.mu0 + init.draws[0][0];
      for (int t = 1; t <= H; ++t)
        states[i][t] = step(a.A, a.B, states[i][t - 1], plans[i][t - 1], noise.draws[0][t - 1]);

      if (!scenario.obstacles.empty()) {
        bool hit = false;
        for (int t = 1; t <= H && !hit; ++t)
          for (const ObstacleRect& ob : scenario.obstacles)
            if (ob.contains(states[i][t].head<2>())) { hit = true; break; }
        if (hit) ++sweep.obstacle_hits[i];
      }
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      for (int t = 1; t <= H; ++t) {
        const double dist = (states[i][t].head<2>() - states[j][t].head<2>()).norm();
        if (dist < scenario.epsilon) ++sweep.collision_hits[p][t - 1];
      }
    }
  }
  return sweep;
}

}  // namespace

McReport mc_collision_prob(const ScenarioConfig& scenario,
                           const std::vector<std::vector<Vec2>>& plans, long S,
                           std::uint64_t seed) {
  const auto sweep = mc_sweep(scenario, plans, S, seed);
  const int H = scenario.horizon;

  McReport rep;
  rep.sample_count = S;
  rep.seed = seed;
  rep.pairs = agent_pairs(scenario.agent_count());
  rep.collision_prob.assign(rep.pairs.size(), std::vector<double>(H, 0.0));
  rep.collision_se.assign(rep.pairs.size(), std::vector<double>(H, 0.0));
  for (std::size_t p = 0; p < rep.pairs.size(); ++p) {
    for (int t = 1; t <= H; ++t) {
      const double ph = static_cast<double>(sweep.collision_hits[p][t - 1]) / S;
      const double se = std::sqrt(ph * (1.0 - ph) / S);
      rep.collision_prob[p][t - 1] = ph;
      rep.collision_se[p][t - 1] = se;
      const double threshold = scenario.delta_pair_at(t) + 3.0 * se;
      if (ph > threshold) rep.flags.push_back({static_cast<int>(p), t, ph, threshold});
    }
  }
  rep.obstacle_prob.resize(scenario.agent_count());
  for (int i = 0; i < scenario.agent_count(); ++i)
    rep.obstacle_prob[i] = static_cast<double>(sweep.obstacle_hits[i]) / S;
  return rep;
}

std::vector<double> mc_obstacle_violation(const ScenarioConfig& scenario,
                                          const std::vector<std::vector<Vec2>>& plans, long S,
                                          std::uint64_t seed) {
  const auto sweep = mc_sweep(scenario, plans, S, seed);
  std::vector<double> out(scenario.agent_count());
  for (int i = 0; i < scenario.agent_count(); ++i)
    out[i] = static_cast<double>(sweep.obstacle_hits[i]) / S;
  return out;
}

std::string McReport::to_json() const {
  nlohmann::ordered_json j;
  j["sample_count"] = sample_count;
  j["seed"] = seed;
  j["pairs"] = nlohmann::ordered_json::array();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    nlohmann::ordered_json jp;
    jp["agents"] = {pairs[p].first + 1, pairs[p].second + 1};
    jp["collision_prob"] = collision_prob[p];
    jp["standard_error"] = collision_se[p];
    j["pairs"].push_back(jp);
  }
  j["obstacle_prob"] = obstacle_prob;
  j["flags"] = nlohmann::ordered_json::array();
  for (const Flag& f : flags) {
    nlohmann::ordered_json jf;
    jf["pair"] = {pairs[f.pair_index].first + 1, pairs[f.pair_index].second + 1};
    jf["t"] = f.t;
    jf["prob"] = f.prob;
    jf["threshold"] = f.threshold;
    j["flags"].push_back(jf);
  }
  return j.dump(2);
}

ComplexityAudit audit_complexity(const EncodedProblem& encoded, const ScenarioConfig& scenario) {
  ComplexityAudit audit;
  audit.expected = expected_binary_counts(scenario, encoded.mode);
  audit.meta = encoded.meta;
  audit.model_binaries = encoded.model.num_binaries();

  std::ostringstream diff;
  auto cmp = [&](const char* name, long want, long got) {
    if (want != got) diff << name << ": expected " << want << ", got " << got << "; ";
  };
  cmp("obstacle", audit.expected.obstacle, audit.meta.obstacle);
  cmp("sa_pair", audit.expected.sa_pair, audit.meta.sa_pair);
  cmp("ripp_pair", audit.expected.ripp_pair, audit.meta.ripp_pair);
  cmp("robust_pair", audit.expected.robust_pair, audit.meta.robust_pair);
  cmp("model total", audit.expected.total(), audit.model_binaries);
  audit.diff = diff.str();
  audit.pass = audit.diff.empty();
  return audit;
}

double suboptimality_pct(double obj_ripp, double obj_sa) {
  return 100.0 * (obj_ripp - obj_sa) / obj_sa;
}

}  // namespace ccmpc
