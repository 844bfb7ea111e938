// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// Translates the stochastic planning problem into a MilpModel: control
// bounds, the sample-approximated L1 objective, obstacle chance constraints,
// and one of three inter-agent collision encodings (SA, RIPP, ROBUST).

#pragma once

#include <array>
#include <vector>

#include "ccmpc/dynamics.hpp"
#include "ccmpc/milp.hpp"
#include "ccmpc/ripp.hpp"
#include "ccmpc/scenario.hpp"
#include "ccmpc/types.hpp"

namespace ccmpc {

/// Margin standing in for the paper encodings' strict inequalities.
inline constexpr double kStrictMargin = 1e-6;

/// Binary-variable counts per constraint family.
struct BinaryCounts {
  long objective = 0;  // the objective uses continuous aux vars only
  long obstacle = 0;
  long sa_pair = 0;
  long ripp_pair = 0;
  long robust_pair = 0;
  long total() const { return objective + obstacle + sa_pair + ripp_pair + robust_pair; }
};

/// Variable registries and affine position expressions of one encoded model.
struct DecisionLayout {
  int agent_count = 0;
  int horizon = 0;
  int sample_count = 0;
  std::vector<std::pair<int, int>> pairs;

  // control variable ids u[i][t-1][axis]
  std::vector<std::vector<std::array<int, 2>>> control_ids;
  // shared control-dependence of the position coordinates, [i][t-1][axis]
  std::vector<std::vector<std::array<std::vector<milp::LinTerm>, 2>>> pos_terms;
  // per-sample position constants [i][t-1][j] and the mean constant [i][t-1]
  std::vector<std::vector<std::vector<Vec2>>> sample_const;
  std::vector<std::vector<Vec2>> sample_const_t0;  // [i][j], initial draws
  std::vector<std::vector<Vec2>> mean_const;

  // objective absolute-value aux variable ids [i][t-1][j] -> {x-dev, y-dev}
  std::vector<std::vector<std::vector<std::array<int, 2>>>> aux_ids;

  // obstacle family: e[i][j]; faces[i][j][(t-1)*O + o] -> 4 binaries
  std::vector<std::vector<int>> obstacle_e_ids;
  std::vector<std::vector<std::vector<std::array<int, 4>>>> obstacle_face_ids;

  // SA family, [pair][t-1][j*N + l] -> {b1..b4, e}
  std::vector<std::vector<std::vector<std::array<int, 5>>>> sa_ids;

  // RIPP/ROBUST family, [pair][t-1] -> 4 binaries, plus the separation
  // thresholds (epsilon and halving already applied) for decode-time checks
  std::vector<std::vector<std::array<int, 4>>> pair_mean_ids;
  std::vector<std::vector<Vec2>> pair_thresholds;

  double eval_position(int i, int t, int j, int axis, const Eigen::VectorXd& x) const {
    double v = sample_const[i][t - 1][j][axis];
    for (const auto& tm : pos_terms[i][t - 1][axis]) v += tm.coef * x[tm.var];
    return v;
  }
  double eval_mean(int i, int t, int axis, const Eigen::VectorXd& x) const {
    double v = mean_const[i][t - 1][axis];
    for (const auto& tm : pos_terms[i][t - 1][axis]) v += tm.coef * x[tm.var];
    return v;
  }
  milp::LinExpr position_expr(int i, int t, int j, int axis) const;
  milp::LinExpr mean_expr(int i, int t, int axis) const;
};

struct EncodedProblem {
  milp::Model model;
  DecisionLayout layout;
  BinaryCounts meta;
  PlanMode mode = PlanMode::RIPP;
  double big_m_used = 0.0;
  double objective_t0_offset = 0.0;  // constant t=0 term of the cost, reported
};

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Creates control variables with box bounds [-u_max, u_max] and the affine
/// position bookkeeping for every agent.
void encode_controls(milp::Model& model, DecisionLayout& layout, const ScenarioConfig& scenario,
                     const std::vector<AffineCoeffs>& coeffs,
                     const std::vector<MeanAffine>& means);

/// Objective (H M N)^{-1} sum_{i,t,j} |x - Z_x| + |y - Z_y| over t = 1..H via
/// standard absolute-value linearization.  Returns the constant t=0 term.
double encode_objective(milp::Model& model, DecisionLayout& layout, const ScenarioConfig& scenario);

/// Per sample trajectory j one violation binary e_j, per (t, obstacle, face)
/// one big-M face binary; (1/N) sum_j e_j <= delta_obstacle.
void encode_obstacle_chance(milp::Model& model, DecisionLayout& layout, int agent,
                            const ScenarioConfig& scenario, double big_m);

/// Sample-pair big-M separation disjunctions with per-timestep budget
/// (1/N^2) sum_{j,l} e <= delta.
void encode_sa_pair(milp::Model& model, DecisionLayout& layout, int pair_index, int t,
                    const ScenarioConfig& scenario, double big_m);

/// Mean-separation disjunction with RIPP thresholds; 4 binaries per (pair, t).
void encode_ripp_pair(milp::Model& model, DecisionLayout& layout, int pair_index, int t,
                      const PairRegions& regions, const ScenarioConfig& scenario, double big_m);

/// Robust constraint-tightening sequence for a two-step nilpotent gain:
/// alpha(1) = alpha(2) = 0 and alpha(t) = |[1 0 0 0] L B| a_max beyond, with
/// L = A + B K.  Throws when L^2 != 0.  Index t-1.
std::vector<double> robust_tightening(const Mat4& A, const Mat42& B,
                                      const Eigen::Matrix<double, 2, 4>& K, double a_max,
                                      int horizon);

/// The nilpotent gain used by the robust baseline.
Eigen::Matrix<double, 2, 4> robust_baseline_gain();

/// Mean-separation disjunction with threshold epsilon + 2 alpha(t).
void encode_robust_pair(milp::Model& model, DecisionLayout& layout, int pair_index, int t,
                        double alpha_t, const ScenarioConfig& scenario, double big_m);

/// Full model assembly for one mode.  Obstacle chance constraints use the
/// sample encoding in every mode; only the inter-agent family varies.
EncodedProblem assemble(const ScenarioConfig& scenario, const std::vector<AffineCoeffs>& coeffs,
                        const std::vector<MomentTrajectory>& moments, PlanMode mode);

/// Big-M constant: 2 * (diagonal of the box reachable by any sample position,
/// goal or obstacle corner) + epsilon.  Used when the scenario sets none.
double derive_big_m(const ScenarioConfig& scenario, const std::vector<AffineCoeffs>& coeffs);

/// Proposes verified incumbents to the solver by decoding a node's controls
/// and setting every binary to its honest value.
milp::IncumbentHint make_incumbent_hint(const EncodedProblem& encoded,
                                        const ScenarioConfig& scenario);

/// Closed-form binary counts the encoders must produce.
BinaryCounts expected_binary_counts(const ScenarioConfig& scenario, PlanMode mode);

}  // namespace ccmpc
