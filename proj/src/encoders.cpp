// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccmpc {

namespace {

using milp::LinExpr;
using milp::LinTerm;
using milp::Model;
using milp::Sense;
using milp::VarKind;

std::string axis_name(int axis) { return axis == 0 ? "x" : "y"; }

/// rel = a - b over disjoint variable sets (controls of different agents).
std::vector<LinTerm> relative_terms(const std::vector<LinTerm>& a, const std::vector<LinTerm>& b) {
  std::vector<LinTerm> out;
  out.reserve(a.size() + b.size());
  for (const LinTerm& t : a) out.push_back(t);
  for (const LinTerm& t : b) out.push_back({t.var, -t.coef});
  return out;
}

LinExpr expr_from(const std::vector<LinTerm>& terms) {
  LinExpr e;
  for (const LinTerm& t : terms) e.add(t.var, t.coef);
  return e;
}

/// Four-way big-M disjunction on the mean separation of one agent pair at
/// one timestep: |mu1 - mu2| must exceed (sx, sy) in some axis direction.
void encode_mean_separation(Model& model, DecisionLayout& layout, int pair_index, int t,
                            double sx, double sy, double big_m, const char* family) {
  const auto [a1, a2] = layout.pairs[pair_index];
  if (layout.pair_mean_ids.empty()) {
    layout.pair_mean_ids.resize(layout.pairs.size());
    layout.pair_thresholds.resize(layout.pairs.size());
  }
  if (layout.pair_mean_ids[pair_index].empty()) {
    layout.pair_mean_ids[pair_index].resize(layout.horizon);
    layout.pair_thresholds[pair_index].resize(layout.horizon);
  }
  const std::string tag = std::string("_") + family + "_t" + std::to_string(t) + "_a" +
                          std::to_string(a1 + 1) + "_a" + std::to_string(a2 + 1);
  std::array<int, 4>& b = layout.pair_mean_ids[pair_index][t - 1];
  for (int k = 0; k < 4; ++k)
    b[k] = model.add_variable(VarKind::Binary, 0, 1, "b" + std::to_string(k + 1) + tag);
  layout.pair_thresholds[pair_index][t - 1] = Vec2(sx, sy);

  const auto rel_x =
      relative_terms(layout.pos_terms[a1][t - 1][0], layout.pos_terms[a2][t - 1][0]);
  const auto rel_y =
      relative_terms(layout.pos_terms[a1][t - 1][1], layout.pos_terms[a2][t - 1][1]);
  const double dx = layout.mean_const[a1][t - 1][0] - layout.mean_const[a2][t - 1][0];
  const double dy = layout.mean_const[a1][t - 1][1] - layout.mean_const[a2][t - 1][1];

  LinExpr e1 = expr_from(rel_x);
  e1.add(b[0], big_m);
  model.add_constraint(std::move(e1), Sense::Ge, sx + kStrictMargin - dx, "c1" + tag);
  LinExpr e2 = expr_from(rel_x);
  e2.add(b[1], -big_m);
  model.add_constraint(std::move(e2), Sense::Le, -sx - kStrictMargin - dx, "c2" + tag);
  LinExpr e3 = expr_from(rel_y);
  e3.add(b[2], big_m);
  model.add_constraint(std::move(e3), Sense::Ge, sy + kStrictMargin - dy, "c3" + tag);
  LinExpr e4 = expr_from(rel_y);
  e4.add(b[3], -big_m);
  model.add_constraint(std::move(e4), Sense::Le, -sy - kStrictMargin - dy, "c4" + tag);

  LinExpr cap;
  for (int k = 0; k < 4; ++k) cap.add(b[k], 1.0);
  model.add_constraint(std::move(cap), Sense::Le, 3.0, "c_cap" + tag);
}

}  // namespace

milp::LinExpr DecisionLayout::position_expr(int i, int t, int j, int axis) const {
  LinExpr e = expr_from(pos_terms[i][t - 1][axis]);
  e.add_constant(sample_const[i][t - 1][j][axis]);
  return e;
}

milp::LinExpr DecisionLayout::mean_expr(int i, int t, int axis) const {
  LinExpr e = expr_from(pos_terms[i][t - 1][axis]);
  e.add_constant(mean_const[i][t - 1][axis]);
  return e;
}

void encode_controls(Model& model, DecisionLayout& layout, const ScenarioConfig& scenario,
                     const std::vector<AffineCoeffs>& coeffs,
                     const std::vector<MeanAffine>& means) {
  const int M = scenario.agent_count();
  const int H = scenario.horizon;
  const int N = scenario.sample_count;
  layout.agent_count = M;
  layout.horizon = H;
  layout.sample_count = N;
  layout.pairs = agent_pairs(M);

  layout.control_ids.resize(M);
  layout.pos_terms.resize(M);
  layout.sample_const.resize(M);
  layout.sample_const_t0.resize(M);
  layout.mean_const.resize(M);

  for (int i = 0; i < M; ++i) {
    layout.control_ids[i].resize(H);
    const double u_max = scenario.agents[i].u_max;
    for (int t = 1; t <= H; ++t) {
      for (int axis = 0; axis < 2; ++axis) {
        layout.control_ids[i][t - 1][axis] =
            model.add_variable(VarKind::Continuous, -u_max, u_max,
                               "u_i" + std::to_string(i + 1) + "_t" + std::to_string(t) + "_" +
                                   axis_name(axis));
      }
    }
    layout.pos_terms[i].resize(H);
    layout.sample_const[i].resize(H);
    layout.mean_const[i].resize(H);
    for (int t = 1; t <= H; ++t) {
      for (int axis = 0; axis < 2; ++axis) {
        auto& terms = layout.pos_terms[i][t - 1][axis];
        for (int s = 1; s <= t; ++s) {
          const Mat42& G = coeffs[i].G[t][s - 1];
          for (int uax = 0; uax < 2; ++uax) {
            const double coef = G(axis, uax);
            if (coef != 0.0) terms.push_back({layout.control_ids[i][s - 1][uax], coef});
          }
        }
      }
      layout.sample_const[i][t - 1].resize(N);
      for (int j = 0; j < N; ++j)
        layout.sample_const[i][t - 1][j] = coeffs[i].constants[j][t].head<2>();
      layout.mean_const[i][t - 1] = means[i].base[t].head<2>();
    }
    layout.sample_const_t0[i].resize(N);
    for (int j = 0; j < N; ++j)
      layout.sample_const_t0[i][j] = coeffs[i].constants[j][0].head<2>();
  }
}

double encode_objective(Model& model, DecisionLayout& layout, const ScenarioConfig& scenario) {
  const int M = layout.agent_count;
  const int H = layout.horizon;
  const int N = layout.sample_count;
  const double w = 1.0 / (static_cast<double>(H) * M * N);

  LinExpr objective;
  layout.aux_ids.resize(M);
  for (int i = 0; i < M; ++i) {
    const Vec2& Z = scenario.agents[i].goal;
    layout.aux_ids[i].resize(H);
    for (int t = 1; t <= H; ++t) {
      layout.aux_ids[i][t - 1].resize(N);
      for (int j = 0; j < N; ++j) {
        for (int axis = 0; axis < 2; ++axis) {
          const std::string tag = "_i" + std::to_string(i + 1) + "_t" + std::to_string(t) +
                                  "_j" + std::to_string(j + 1);
          const int a = model.add_variable(VarKind::Continuous, 0.0, milp::kInf,
                                           "d" + axis_name(axis) + tag);
          layout.aux_ids[i][t - 1][j][axis] = a;
          const double c = layout.sample_const[i][t - 1][j][axis];
          // a >= pos - Z  and  a >= Z - pos
          LinExpr above;
          above.add(a, 1.0);
          for (const LinTerm& tm : layout.pos_terms[i][t - 1][axis]) above.add(tm.var, -tm.coef);
          model.add_constraint(std::move(above), Sense::Ge, c - Z[axis],
                               "c_d" + axis_name(axis) + "p" + tag);
          LinExpr below;
          below.add(a, 1.0);
          for (const LinTerm& tm : layout.pos_terms[i][t - 1][axis]) below.add(tm.var, tm.coef);
          model.add_constraint(std::move(below), Sense::Ge, Z[axis] - c,
                               "c_d" + axis_name(axis) + "m" + tag);
          objective.add(a, w);
        }
      }
    }
  }
  model.set_objective(std::move(objective));

  double offset = 0.0;
  for (int i = 0; i < M; ++i) {
    const Vec2& Z = scenario.agents[i].goal;
    for (int j = 0; j < N; ++j) {
      const Vec2& p0 = layout.sample_const_t0[i][j];
      offset += w * (std::abs(p0.x() - Z.x()) + std::abs(p0.y() - Z.y()));
    }
  }
  return offset;
}

void encode_obstacle_chance(Model& model, DecisionLayout& layout, int agent,
                            const ScenarioConfig& scenario, double big_m) {
  const int H = layout.horizon;
  const int N = layout.sample_count;
  const int O = static_cast<int>(scenario.obstacles.size());
  if (O == 0) return;
  if (layout.obstacle_e_ids.empty()) {
    layout.obstacle_e_ids.resize(layout.agent_count);
    layout.obstacle_face_ids.resize(layout.agent_count);
  }
  const std::string ai = "_i" + std::to_string(agent + 1);

  auto& e_ids = layout.obstacle_e_ids[agent];
  auto& face_ids = layout.obstacle_face_ids[agent];
  e_ids.resize(N);
  face_ids.resize(N);

  for (int j = 0; j < N; ++j)
    e_ids[j] = model.add_variable(VarKind::Binary, 0, 1, "e_obs" + ai + "_j" + std::to_string(j + 1));

  for (int j = 0; j < N; ++j) {
    face_ids[j].resize(static_cast<std::size_t>(H) * O);
    const std::string js = "_j" + std::to_string(j + 1);
    for (int t = 1; t <= H; ++t) {
      for (int o = 0; o < O; ++o) {
        const ObstacleRect& ob = scenario.obstacles[o];
        const std::string tag = ai + "_t" + std::to_string(t) + "_o" + std::to_string(o + 1) + js;
        std::array<int, 4> b{};
        for (int f = 0; f < 4; ++f)
          b[f] = model.add_variable(VarKind::Binary, 0, 1,
                                    "b" + std::to_string(f + 1) + "_obs" + tag);
        face_ids[j][(t - 1) * O + o] = b;
        const double cx = layout.sample_const[agent][t - 1][j][0];
        const double cy = layout.sample_const[agent][t - 1][j][1];
        // clear of a face unless its binary is set
        LinExpr left = expr_from(layout.pos_terms[agent][t - 1][0]);
        left.add(b[0], -big_m);
        model.add_constraint(std::move(left), Sense::Le, ob.xmin() - kStrictMargin - cx,
                             "c_obsl" + tag);
        LinExpr right = expr_from(layout.pos_terms[agent][t - 1][0]);
        right.add(b[1], big_m);
        model.add_constraint(std::move(right), Sense::Ge, ob.xmax() + kStrictMargin - cx,
                             "c_obsr" + tag);
        LinExpr below = expr_from(layout.pos_terms[agent][t - 1][1]);
        below.add(b[2], -big_m);
        model.add_constraint(std::move(below), Sense::Le, ob.ymin() - kStrictMargin - cy,
                             "c_obsb" + tag);
        LinExpr above = expr_from(layout.pos_terms[agent][t - 1][1]);
        above.add(b[3], big_m);
        model.add_constraint(std::move(above), Sense::Ge, ob.ymax() + kStrictMargin - cy,
                             "c_obsa" + tag);
        // all four faces relaxed marks the trajectory as violating
        LinExpr link;
        for (int f = 0; f < 4; ++f) link.add(b[f], 1.0);
        link.add(e_ids[j], -1.0);
        model.add_constraint(std::move(link), Sense::Le, 3.0, "c_obslink" + tag);
      }
    }
  }

  LinExpr budget;
  for (int j = 0; j < N; ++j) budget.add(e_ids[j], 1.0);
  model.add_constraint(std::move(budget), Sense::Le, scenario.delta_obstacle * N,
                       "c_obsbudget" + ai);
}

void encode_sa_pair(Model& model, DecisionLayout& layout, int pair_index, int t,
                    const ScenarioConfig& scenario, double big_m) {
  const auto [a1, a2] = layout.pairs[pair_index];
  const int N = layout.sample_count;
  const double eps = scenario.epsilon + kStrictMargin;

  if (layout.sa_ids.empty()) layout.sa_ids.resize(layout.pairs.size());
  if (layout.sa_ids[pair_index].empty()) layout.sa_ids[pair_index].resize(layout.horizon);
  auto& ids = layout.sa_ids[pair_index][t - 1];
  ids.resize(static_cast<std::size_t>(N) * N);

  const auto rel_x =
      relative_terms(layout.pos_terms[a1][t - 1][0], layout.pos_terms[a2][t - 1][0]);
  const auto rel_y =
      relative_terms(layout.pos_terms[a1][t - 1][1], layout.pos_terms[a2][t - 1][1]);
  const std::string pt = "_t" + std::to_string(t) + "_a" + std::to_string(a1 + 1) + "_a" +
                         std::to_string(a2 + 1);

  LinExpr budget;
  for (int j = 0; j < N; ++j) {
    for (int l = 0; l < N; ++l) {
      const std::string tag = pt + "_j" + std::to_string(j + 1) + "_l" + std::to_string(l + 1);
      auto& slot = ids[static_cast<std::size_t>(j) * N + l];
      for (int k = 0; k < 4; ++k)
        slot[k] = model.add_variable(VarKind::Binary, 0, 1, "b" + std::to_string(k + 1) + "_sa" + tag);
      slot[4] = model.add_variable(VarKind::Binary, 0, 1, "e_sa" + tag);

      const double dx = layout.sample_const[a1][t - 1][j][0] - layout.sample_const[a2][t - 1][l][0];
      const double dy = layout.sample_const[a1][t - 1][j][1] - layout.sample_const[a2][t - 1][l][1];

      LinExpr e1 = expr_from(rel_x);
      e1.add(slot[0], big_m);
      model.add_constraint(std::move(e1), Sense::Ge, eps - dx, "c_sa1" + tag);
      LinExpr e2 = expr_from(rel_x);
      e2.add(slot[1], -big_m);
      model.add_constraint(std::move(e2), Sense::Le, -eps - dx, "c_sa2" + tag);
      LinExpr e3 = expr_from(rel_y);
      e3.add(slot[2], big_m);
      model.add_constraint(std::move(e3), Sense::Ge, eps - dy, "c_sa3" + tag);
      LinExpr e4 = expr_from(rel_y);
      e4.add(slot[3], -big_m);
      model.add_constraint(std::move(e4), Sense::Le, -eps - dy, "c_sa4" + tag);

      LinExpr link;
      for (int k = 0; k < 4; ++k) link.add(slot[k], 1.0);
      link.add(slot[4], -1.0);
      model.add_constraint(std::move(link), Sense::Le, 3.0, "c_salink" + tag);
      budget.add(slot[4], 1.0);
    }
  }
  model.add_constraint(std::move(budget), Sense::Le,
                       scenario.delta_pair_at(t) * static_cast<double>(N) * N, "c_sabudget" + pt);
}

void encode_ripp_pair(Model& model, DecisionLayout& layout, int pair_index, int t,
                      const PairRegions& regions, const ScenarioConfig& scenario, double big_m) {
  const double scale = scenario.ripp_halving ? 0.5 : 1.0;
  const double sx = scale * (regions.first.alpha_x + regions.second.alpha_x) + scenario.epsilon;
  const double sy = scale * (regions.first.alpha_y + regions.second.alpha_y) + scenario.epsilon;
  encode_mean_separation(model, layout, pair_index, t, sx, sy, big_m, "ripp");
}

void encode_robust_pair(Model& model, DecisionLayout& layout, int pair_index, int t,
                        double alpha_t, const ScenarioConfig& scenario, double big_m) {
  const double s = scenario.epsilon + 2.0 * alpha_t;
  encode_mean_separation(model, layout, pair_index, t, s, s, big_m, "rob");
}

std::vector<double> robust_tightening(const Mat4& A, const Mat42& B,
                                      const Eigen::Matrix<double, 2, 4>& K, double a_max,
                                      int horizon) {
  const Mat4 L = A + B * K;
  const Mat4 L2 = L * L;
  if (L2.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + L.cwiseAbs().maxCoeff()))
    throw EncodeError("robust_tightening: gain is not two-step nilpotent (L^2 != 0)");
  const Eigen::RowVector2d row = Eigen::RowVector4d(1, 0, 0, 0) * (L * B);
  const double alpha = row.norm() * a_max;
  std::vector<double> out(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) out[t - 1] = t <= 2 ? 0.0 : alpha;
  return out;
}

Eigen::Matrix<double, 2, 4> robust_baseline_gain() {
  Eigen::Matrix<double, 2, 4> K;
  K << -1, 0, -2, 0,
        0, -1, 0, -2;
  return K;
}

double derive_big_m(const ScenarioConfig& scenario, const std::vector<AffineCoeffs>& coeffs) {
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  bool first = true;
  auto extend = [&](double x, double y, double rx, double ry) {
    if (first) {
      lo_x = x - rx; hi_x = x + rx;
      lo_y = y - ry; hi_y = y + ry;
      first = false;
      return;
    }
    lo_x = std::min(lo_x, x - rx); hi_x = std::max(hi_x, x + rx);
    lo_y = std::min(lo_y, y - ry); hi_y = std::max(hi_y, y + ry);
  };
  for (int i = 0; i < scenario.agent_count(); ++i) {
    const AgentSpec& a = scenario.agents[i];
    extend(a.goal.x(), a.goal.y(), 0, 0);
    for (int t = 1; t <= scenario.horizon; ++t) {
      // reach of the control terms in each position coordinate
      double rx = 0.0, ry = 0.0;
      for (int s = 1; s <= t; ++s) {
        const Mat42& G = coeffs[i].G[t][s - 1];
        rx += (std::abs(G(0, 0)) + std::abs(G(0, 1))) * a.u_max;
        ry += (std::abs(G(1, 0)) + std::abs(G(1, 1))) * a.u_max;
      }
      for (const auto& cj : coeffs[i].constants) extend(cj[t][0], cj[t][1], rx, ry);
    }
  }
  for (const ObstacleRect& o : scenario.obstacles) {
    extend(o.xmin(), o.ymin(), 0, 0);
    extend(o.xmax(), o.ymax(), 0, 0);
  }
  const double dx = hi_x - lo_x;
  const double dy = hi_y - lo_y;
  return 2.0 * std::sqrt(dx * dx + dy * dy) + scenario.epsilon;
}

EncodedProblem assemble(const ScenarioConfig& scenario, const std::vector<AffineCoeffs>& coeffs,
                        const std::vector<MomentTrajectory>& moments, PlanMode mode) {
  EncodedProblem ep;
  ep.mode = mode;
  ep.big_m_used = scenario.big_m ? *scenario.big_m : derive_big_m(scenario, coeffs);

  std::vector<MeanAffine> means;
  means.reserve(moments.size());
  for (const auto& m : moments) means.push_back(m.mean);

  encode_controls(ep.model, ep.layout, scenario, coeffs, means);
  ep.objective_t0_offset = encode_objective(ep.model, ep.layout, scenario);

  for (int i = 0; i < scenario.agent_count(); ++i)
    encode_obstacle_chance(ep.model, ep.layout, i, scenario, ep.big_m_used);

  const auto pairs = ep.layout.pairs;
  if (!pairs.empty()) {
    if (mode == PlanMode::SA) {
      for (int t = 1; t <= scenario.horizon; ++t)
        for (std::size_t p = 0; p < pairs.size(); ++p)
          encode_sa_pair(ep.model, ep.layout, static_cast<int>(p), t, scenario, ep.big_m_used);
    } else if (mode == PlanMode::RIPP) {
      std::vector<std::vector<Mat4>> cov_trajs;
      cov_trajs.reserve(moments.size());
      for (const auto& m : moments) cov_trajs.push_back(m.cov);
      const auto regions = build_regions(scenario, cov_trajs);
      for (int t = 1; t <= scenario.horizon; ++t)
        for (std::size_t p = 0; p < pairs.size(); ++p)
          encode_ripp_pair(ep.model, ep.layout, static_cast<int>(p), t, regions[p][t - 1],
                           scenario, ep.big_m_used);
    } else {
      double u_max = 0.0;
      for (const auto& a : scenario.agents) u_max = std::max(u_max, a.u_max);
      const auto alphas = robust_tightening(scenario.agents[0].A, scenario.agents[0].B,
                                            robust_baseline_gain(), 0.1 * u_max,
                                            scenario.horizon);
      for (int t = 1; t <= scenario.horizon; ++t)
        for (std::size_t p = 0; p < pairs.size(); ++p)
          encode_robust_pair(ep.model, ep.layout, static_cast<int>(p), t, alphas[t - 1],
                             scenario, ep.big_m_used);
    }
  }

  // family counts from the registries; they must equal the model's binaries
  for (const auto& per_agent : ep.layout.obstacle_e_ids) ep.meta.obstacle += per_agent.size();
  for (const auto& per_agent : ep.layout.obstacle_face_ids)
    for (const auto& per_sample : per_agent) ep.meta.obstacle += 4 * per_sample.size();
  for (const auto& per_pair : ep.layout.sa_ids)
    for (const auto& per_t : per_pair) ep.meta.sa_pair += 5 * per_t.size();
  for (const auto& per_pair : ep.layout.pair_mean_ids) {
    if (mode == PlanMode::RIPP)
      ep.meta.ripp_pair += 4 * per_pair.size();
    else
      ep.meta.robust_pair += 4 * per_pair.size();
  }
  if (ep.meta.total() != ep.model.num_binaries())
    throw EncodeError("assemble: binary registry does not match the model");
  return ep;
}

BinaryCounts expected_binary_counts(const ScenarioConfig& scenario, PlanMode mode) {
  BinaryCounts c;
  const long M = scenario.agent_count();
  const long H = scenario.horizon;
  const long N = scenario.sample_count;
  const long O = static_cast<long>(scenario.obstacles.size());
  const long P = M * (M - 1) / 2;
  c.obstacle = O > 0 ? M * N * (1 + 4 * H * O) : 0;
  if (mode == PlanMode::SA) c.sa_pair = 5 * N * N * H * P;
  if (mode == PlanMode::RIPP) c.ripp_pair = 4 * H * P;
  if (mode == PlanMode::ROBUST) c.robust_pair = 4 * H * P;
  return c;
}

milp::IncumbentHint make_incumbent_hint(const EncodedProblem& encoded,
                                        const ScenarioConfig& scenario) {
  const DecisionLayout* layout = &encoded.layout;
  const PlanMode mode = encoded.mode;
  const ScenarioConfig* sc = &scenario;
  return [layout, mode, sc](const Model& model,
                            const Eigen::VectorXd& lp_x) -> std::optional<Eigen::VectorXd> {
    Eigen::VectorXd cand = Eigen::VectorXd::Zero(model.num_variables());
    const int M = layout->agent_count;
    const int H = layout->horizon;
    const int N = layout->sample_count;

    for (int i = 0; i < M; ++i)
      for (int t = 1; t <= H; ++t)
        for (int axis = 0; axis < 2; ++axis) {
          const int v = layout->control_ids[i][t - 1][axis];
          cand[v] = lp_x[v];
        }

    // positions and objective aux values implied by the controls
    std::vector<std::vector<std::vector<Vec2>>> pos(M);
    for (int i = 0; i < M; ++i) {
      pos[i].resize(H);
      for (int t = 1; t <= H; ++t) {
        pos[i][t - 1].resize(N);
        double tx = 0.0, ty = 0.0;
        for (const LinTerm& tm : layout->pos_terms[i][t - 1][0]) tx += tm.coef * cand[tm.var];
        for (const LinTerm& tm : layout->pos_terms[i][t - 1][1]) ty += tm.coef * cand[tm.var];
        for (int j = 0; j < N; ++j) {
          pos[i][t - 1][j] = layout->sample_const[i][t - 1][j] + Vec2(tx, ty);
          const Vec2 dev = pos[i][t - 1][j] - sc->agents[i].goal;
          cand[layout->aux_ids[i][t - 1][j][0]] = std::abs(dev.x());
          cand[layout->aux_ids[i][t - 1][j][1]] = std::abs(dev.y());
        }
      }
    }

    // obstacle family
    const int O = static_cast<int>(sc->obstacles.size());
    if (O > 0 && !layout->obstacle_e_ids.empty()) {
      for (int i = 0; i < M; ++i) {
        int violators = 0;
        for (int j = 0; j < N; ++j) {
          bool traj_violates = false;
          for (int t = 1; t <= H; ++t) {
            for (int o = 0; o < O; ++o) {
              const ObstacleRect& ob = sc->obstacles[o];
              const Vec2& p = pos[i][t - 1][j];
              const auto& b = layout->obstacle_face_ids[i][j][(t - 1) * O + o];
              int relaxed = 0;
              if (!(p.x() <= ob.xmin() - kStrictMargin)) { cand[b[0]] = 1.0; ++relaxed; }
              if (!(p.x() >= ob.xmax() + kStrictMargin)) { cand[b[1]] = 1.0; ++relaxed; }
              if (!(p.y() <= ob.ymin() - kStrictMargin)) { cand[b[2]] = 1.0; ++relaxed; }
              if (!(p.y() >= ob.ymax() + kStrictMargin)) { cand[b[3]] = 1.0; ++relaxed; }
              if (relaxed == 4) traj_violates = true;
            }
          }
          if (traj_violates) {
            cand[layout->obstacle_e_ids[i][j]] = 1.0;
            ++violators;
          }
        }
        if (violators > sc->delta_obstacle * N + 1e-9) return std::nullopt;
      }
    }

    const double eps = sc->epsilon + kStrictMargin;
    if (mode == PlanMode::SA) {
      for (std::size_t p = 0; p < layout->pairs.size(); ++p) {
        const auto [a1, a2] = layout->pairs[p];
        for (int t = 1; t <= H; ++t) {
          int close_pairs = 0;
          const auto& ids = layout->sa_ids[p][t - 1];
          for (int j = 0; j < N; ++j) {
            for (int l = 0; l < N; ++l) {
              const Vec2 d = pos[a1][t - 1][j] - pos[a2][t - 1][l];
              const auto& slot = ids[static_cast<std::size_t>(j) * N + l];
              int relaxed = 0;
              if (!(d.x() >= eps)) { cand[slot[0]] = 1.0; ++relaxed; }
              if (!(-d.x() >= eps)) { cand[slot[1]] = 1.0; ++relaxed; }
              if (!(d.y() >= eps)) { cand[slot[2]] = 1.0; ++relaxed; }
              if (!(-d.y() >= eps)) { cand[slot[3]] = 1.0; ++relaxed; }
              if (relaxed == 4) {
                cand[slot[4]] = 1.0;
                ++close_pairs;
              }
            }
          }
          if (close_pairs > sc->delta_pair_at(t) * static_cast<double>(N) * N + 1e-9)
            return std::nullopt;
        }
      }
    } else {
      for (std::size_t p = 0; p < layout->pairs.size(); ++p) {
        const auto [a1, a2] = layout->pairs[p];
        for (int t = 1; t <= H; ++t) {
          double mx1 = layout->mean_const[a1][t - 1][0], my1 = layout->mean_const[a1][t - 1][1];
          double mx2 = layout->mean_const[a2][t - 1][0], my2 = layout->mean_const[a2][t - 1][1];
          for (const LinTerm& tm : layout->pos_terms[a1][t - 1][0]) mx1 += tm.coef * cand[tm.var];
          for (const LinTerm& tm : layout->pos_terms[a1][t - 1][1]) my1 += tm.coef * cand[tm.var];
          for (const LinTerm& tm : layout->pos_terms[a2][t - 1][0]) mx2 += tm.coef * cand[tm.var];
          for (const LinTerm& tm : layout->pos_terms[a2][t - 1][1]) my2 += tm.coef * cand[tm.var];
          const Vec2 thr = layout->pair_thresholds[p][t - 1] + Vec2(kStrictMargin, kStrictMargin);
          const auto& b = layout->pair_mean_ids[p][t - 1];
          int relaxed = 0;
          if (!(mx1 - mx2 >= thr.x())) { cand[b[0]] = 1.0; ++relaxed; }
          if (!(mx2 - mx1 >= thr.x())) { cand[b[1]] = 1.0; ++relaxed; }
          if (!(my1 - my2 >= thr.y())) { cand[b[2]] = 1.0; ++relaxed; }
          if (!(my2 - my1 >= thr.y())) { cand[b[3]] = 1.0; ++relaxed; }
          if (relaxed == 4) return std::nullopt;  // no direction separates
        }
      }
    }
    return cand;
  };
}

}  // namespace ccmpc
