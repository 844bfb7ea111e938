// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ccmpc/planner.hpp"
#include "ccmpc/validate.hpp"

using namespace ccmpc;

namespace {

AgentSpec static_agent(const Vec2& at, double pos_var = 0.0) {
  AgentSpec a;
  a.A = Mat4::Identity();
  a.B = Mat42::Zero();
  a.mu0 << at.x(), at.y(), 0.0, 0.0;
  a.C0 = Vec4(pos_var, pos_var, 0.0, 0.0).asDiagonal();
  a.goal = at;
  a.u_max = 1.0;
  a.noise.Q = Mat4::Zero();
  return a;
}

std::vector<std::vector<Vec2>> zero_plans(int M, int H) {
  return std::vector<std::vector<Vec2>>(M, std::vector<Vec2>(H, Vec2::Zero()));
}

/// 2-D Simpson quadrature of the Gaussian mass inside the disk of radius eps
/// around the origin, for mean m and isotropic per-axis variance var.
double disk_mass_quadrature(const Vec2& m, double var, double eps) {
  const int n = 400;
  const double h = 2.0 * eps / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -eps + i * h;
    const double wi = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (int j = 0; j <= n; ++j) {
      const double y = -eps + j * h;
      if (x * x + y * y > eps * eps) continue;
      const double wj = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      const double dx = x - m.x(), dy = y - m.y();
      sum += wi * wj * std::exp(-0.5 * (dx * dx + dy * dy) / var);
    }
  }
  return sum * h * h / 9.0 / (2.0 * M_PI * var);
}

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("far-apart deterministic agents never collide") {
  ScenarioConfig cfg;
  cfg.agents = {static_agent({0, 0}), static_agent({500, 0})};
  cfg.horizon = 5;
  cfg.epsilon = 5.0;
  const McReport rep = mc_collision_prob(cfg, zero_plans(2, 5), 2000, 7);
  for (int t = 1; t <= 5; ++t) CHECK(rep.collision_prob[0][t - 1] == 0.0);
  CHECK(rep.flags.empty());
}

TEST_CASE("identical deterministic trajectories always collide") {
  ScenarioConfig cfg;
  cfg.agents = {static_agent({10, 10}), static_agent({10, 10})};
  cfg.horizon = 4;
  cfg.epsilon = 5.0;
  cfg.delta_pair = 0.01;
  const McReport rep = mc_collision_prob(cfg, zero_plans(2, 4), 1000, 3);
  for (int t = 1; t <= 4; ++t) CHECK(rep.collision_prob[0][t - 1] == 1.0);
  CHECK(rep.flags.size() == 4);  // every timestep exceeds delta beyond 3 SE
  CHECK(rep.to_json().find("\"flags\"") != std::string::npos);
}

TEST_CASE("collision probability matches the disk quadrature oracle") {
  const double var = 4.0;
  const Vec2 separation(6.0, 2.0);
  ScenarioConfig cfg;
  cfg.agents = {static_agent({0, 0}, var), static_agent({separation.x(), separation.y()}, var)};
  cfg.horizon = 1;
  cfg.epsilon = 5.0;
  cfg.delta_pair = 1.0;
  const long S = 40000;
  const McReport rep = mc_collision_prob(cfg, zero_plans(2, 1), S, 11);
  // difference of the two positions: mean separation, per-axis variance 2*var
  const double want = disk_mass_quadrature(separation, 2.0 * var, cfg.epsilon);
  const double se = std::sqrt(want * (1.0 - want) / S);
  CHECK(std::abs(rep.collision_prob[0][0] - want) <= 3.0 * se);
}

TEST_CASE("obstacle violation: trivial cases") {
  ScenarioConfig cfg;
  cfg.agents = {static_agent({0, 0})};
  cfg.horizon = 3;
  CHECK(mc_obstacle_violation(cfg, zero_plans(1, 3), 500, 1)[0] == 0.0);

  cfg.obstacles = {{{0.0, 0.0}, 10.0, 10.0}};  // covers the start
  CHECK(mc_obstacle_violation(cfg, zero_plans(1, 3), 500, 1)[0] == 1.0);
}

TEST_CASE("obstacle violation matches the Gaussian rectangle oracle") {
  const double var = 9.0;
  ScenarioConfig cfg;
  cfg.agents = {static_agent({0, 0}, var)};
  cfg.horizon = 1;
  cfg.obstacles = {{{2.0, -1.0}, 6.0, 4.0}};
  const long S = 40000;
  const double p = mc_obstacle_violation(cfg, zero_plans(1, 1), S, 5)[0];
  const double sd = std::sqrt(var);
  const ObstacleRect& ob = cfg.obstacles[0];
  const double want = (phi(ob.xmax() / sd) - phi(ob.xmin() / sd)) *
                      (phi(ob.ymax() / sd) - phi(ob.ymin() / sd));
  const double se = std::sqrt(want * (1.0 - want) / S);
  CHECK(std::abs(p - want) <= 3.0 * se);
}

TEST_CASE("monte-carlo reports are deterministic in the seed") {
  ScenarioConfig cfg;
  cfg.agents = {static_agent({0, 0}, 4.0), static_agent({6, 0}, 4.0)};
  cfg.horizon = 2;
  cfg.epsilon = 5.0;
  cfg.delta_pair = 1.0;
  const auto plans = zero_plans(2, cfg.horizon);
  const McReport a = mc_collision_prob(cfg, plans, 3000, 99);
  const McReport b = mc_collision_prob(cfg, plans, 3000, 99);
  CHECK(a.collision_prob == b.collision_prob);
  CHECK(a.obstacle_prob == b.obstacle_prob);
  const McReport c = mc_collision_prob(cfg, plans, 3000, 100);
  CHECK(a.collision_prob != c.collision_prob);
}

TEST_CASE("complexity audit closed forms") {
  {
    ScenarioConfig cfg = random_scenario(12, 5);
    cfg.sample_count = 5;
    std::vector<AffineCoeffs> c;
    std::vector<MomentTrajectory> m;
    prepare_inputs(cfg, c, m);
    const EncodedProblem ep = assemble(cfg, c, m, PlanMode::RIPP);
    const auto audit = audit_complexity(ep, cfg);
    CHECK(audit.pass);
    CHECK(audit.expected.ripp_pair == 4 * 7 * 10);  // M=5: 10 pairs
  }
  {
    ScenarioConfig cfg = random_scenario(13, 2);
    cfg.sample_count = 30;
    CHECK(expected_binary_counts(cfg, PlanMode::SA).sa_pair == 31500);
    cfg.agents.pop_back();  // single agent: no pair binaries anywhere
    const auto counts = expected_binary_counts(cfg, PlanMode::SA);
    CHECK(counts.sa_pair == 0);
    CHECK(counts.total() == 0);
  }
}

TEST_CASE("complexity audit reports a diff on mismatch") {
  ScenarioConfig cfg = random_scenario(14, 2);
  cfg.sample_count = 4;
  std::vector<AffineCoeffs> c;
  std::vector<MomentTrajectory> m;
  prepare_inputs(cfg, c, m);
  EncodedProblem ep = assemble(cfg, c, m, PlanMode::RIPP);
  ep.meta.ripp_pair -= 1;  // simulate an encoder bug
  const auto audit = audit_complexity(ep, cfg);
  CHECK_FALSE(audit.pass);
  CHECK(audit.diff.find("ripp_pair") != std::string::npos);
}

TEST_CASE("suboptimality percentages") {
  CHECK(suboptimality_pct(42.0, 42.0) == 0.0);
  CHECK(suboptimality_pct(146.8437, 141.2349) == doctest::Approx(3.9712).epsilon(1e-3));
}
