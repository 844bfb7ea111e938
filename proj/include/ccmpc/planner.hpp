// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end planning pipeline: draw ensembles, build moments, assemble the
// model for one mode, solve, decode.  Also run-record serialization and the
// optional receding-horizon loop.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccmpc/encoders.hpp"
#include "ccmpc/milp.hpp"
#include "ccmpc/scenario.hpp"

namespace ccmpc {

/// Draw count used to estimate noise covariances for non-Gaussian noise.
inline constexpr int kCovEstimateDraws = 100000;

struct PlanResult {
  milp::Status status = milp::Status::Infeasible;
  PlanMode mode = PlanMode::RIPP;
  double objective = 0.0;            // optimized cost over t = 1..H
  double objective_t0_offset = 0.0;  // constant t = 0 term, reported alongside
  std::vector<std::vector<Vec2>> controls;   // [agent][t-1]
  std::vector<std::vector<Vec4>> mean_traj;  // [agent][t], t = 0..H
  milp::SolveStats stats;
  BinaryCounts meta;
  double big_m_used = 0.0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string infeasible_family;  // set when status == Infeasible
};

/// Planning inputs and the encoded model, exposed for tests and validation.
struct PlanArtifacts {
  std::vector<std::vector<Vec4>> initial_draws;             // [agent][j]
  std::vector<std::vector<std::vector<Vec4>>> noise_draws;  // [agent][j][t-1]
  std::vector<AffineCoeffs> coeffs;
  std::vector<MomentTrajectory> moments;
  EncodedProblem encoded;
};

/// Deterministic ensemble and moment construction from scenario.seed.
void prepare_inputs(const ScenarioConfig& scenario, std::vector<AffineCoeffs>& coeffs,
                    std::vector<MomentTrajectory>& moments, PlanArtifacts* artifacts = nullptr);

PlanResult plan(const ScenarioConfig& scenario, PlanMode mode,
                const milp::SolveSettings& base_settings = {},
                PlanArtifacts* artifacts = nullptr);

/// 100 * (ripp - sa) / sa on two solved results; throws unless both Optimal.
double suboptimality_pct(const PlanResult& ripp, const PlanResult& sa);

/// Reproducible run record; byte-identical across runs except the timing
/// fields.
std::string record_to_json(const PlanResult& result, const ScenarioConfig& scenario,
                           std::uint64_t scenario_digest);

struct RunRecord {
  std::uint64_t scenario_digest = 0;
  PlanMode mode = PlanMode::RIPP;
  std::string status;
  double objective = 0.0;
  std::vector<std::vector<Vec2>> controls;
};
RunRecord record_from_json(const std::string& text);

/// CSV with columns agent,t,kind,x,y,vx,vy; kind is "mean" or "sample<j>".
/// Sample rows are emitted when artifacts are provided.
std::string trajectories_csv(const PlanResult& result, const PlanArtifacts* artifacts = nullptr);

struct RecedingResult {
  bool completed = false;                    // every replan solved
  std::vector<std::vector<Vec4>> realized;   // [agent][t], t = 0..H
  std::vector<std::string> step_status;      // per replan step
};

/// Shrinking-horizon loop: replan each step from the realized state (exactly
/// known at replan time) and apply the first control under fresh noise.
RecedingResult receding_horizon_run(const ScenarioConfig& scenario, PlanMode mode,
                                    std::uint64_t sim_seed);

}  // namespace ccmpc
