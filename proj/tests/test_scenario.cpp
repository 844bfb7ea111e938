// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "ccmpc/scenario.hpp"

using namespace ccmpc;

namespace {

const char* kPaperExample = R"(# two UAVs heading for a gap
[global]
horizon = 7
epsilon = 5
delta_pair = 0.01
delta_obstacle = 0.01
samples = 100
delta_split = 2
mode = ripp
seed = 1
ripp_halving = false

[agent.1]
mu0 = 130 135 0 0
goal = 300 250
u_max = 12
noise = dryden 200 25.32 45 1

[agent.2]
mu0 = 130 120 0 0
goal = 300 150
u_max = 12
noise = dryden 200 25.32 45 1

[obstacle.1]
center = 215 222.5
width = 50
height = 50
)";

/// Independent parametric segment-intersection check (the library uses an
/// orientation-based one).
bool oracle_cross(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
  Eigen::Matrix2d S;
  S.col(0) = a2 - a1;
  S.col(1) = -(b2 - b1);
  if (std::abs(S.determinant()) < 1e-12) return false;  // parallel: ignore
  const Eigen::Vector2d ts = S.inverse() * (b1 - a1);
  return ts[0] >= 0.0 && ts[0] <= 1.0 && ts[1] >= 0.0 && ts[1] <= 1.0;
}

}  // namespace

TEST_CASE("parses the two-UAV example configuration") {
  const ScenarioConfig cfg = parse_scenario(kPaperExample);
  CHECK(cfg.horizon == 7);
  CHECK(cfg.epsilon == 5.0);
  CHECK(cfg.sample_count == 100);
  REQUIRE(cfg.agent_count() == 2);
  CHECK(cfg.agents[0].mu0 == Vec4(130, 135, 0, 0));
  CHECK(cfg.agents[1].mu0 == Vec4(130, 120, 0, 0));
  CHECK(cfg.agents[0].goal == Vec2(300, 250));
  CHECK(cfg.agents[1].goal == Vec2(300, 150));
  CHECK(cfg.agents[0].A == double_integrator_A());
  CHECK(cfg.agents[0].B == double_integrator_B());
  CHECK(cfg.agents[0].C0 == default_prior_covariance());
  CHECK(cfg.agents[0].noise.kind == NoiseSpec::Kind::Dryden);
  CHECK(cfg.agents[0].noise.w20_fts == 25.32);
  REQUIRE(cfg.obstacles.size() == 1);
  CHECK(cfg.obstacles[0].width == 50.0);
}

TEST_CASE("rejects delta_split at the boundary") {
  std::string text = kPaperExample;
  const auto pos = text.find("delta_split = 2");
  text.replace(pos, 15, "delta_split = 1");
  try {
    parse_scenario(text);
    FAIL("expected a validation error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("delta_split must exceed 1") != std::string::npos);
  }
}

TEST_CASE("rejects an empty ensemble") {
  std::string text = kPaperExample;
  const auto pos = text.find("samples = 100");
  text.replace(pos, 13, "samples = 0");
  CHECK_THROWS_AS(parse_scenario(text), ScenarioError);
}

TEST_CASE("rejects a non-PSD prior covariance") {
  ScenarioConfig cfg = parse_scenario(kPaperExample);
  cfg.agents[0].C0(0, 0) = -1.0;
  CHECK_THROWS_AS(validate(cfg), ScenarioError);
}

TEST_CASE("save/load round trip is the identity") {
  ScenarioConfig cfg = parse_scenario(kPaperExample);
  cfg.big_m = 1234.5;
  cfg.delta_pair_t = {0.01, 0.02, 0.01, 0.01, 0.01, 0.01, 0.005};
  cfg.agents[0].noise.kind = NoiseSpec::Kind::Gaussian;
  cfg.agents[0].noise.Q = Vec4(0.1, 0.2, 0.3, 0.4).asDiagonal();
  const std::string text = to_text(cfg);
  const ScenarioConfig back = parse_scenario(text);
  CHECK(back == cfg);
  CHECK(to_text(back) == text);  // byte-stable
}

TEST_CASE("random scenarios round trip and validate") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const ScenarioConfig cfg = random_scenario(seed, 3);
    CHECK_NOTHROW(validate(cfg));
    CHECK(parse_scenario(to_text(cfg)) == cfg);
  }
}

TEST_CASE("random_scenario is deterministic and seed sensitive") {
  const ScenarioConfig a = random_scenario(1, 2);
  const ScenarioConfig b = random_scenario(1, 2);
  CHECK(a == b);
  const ScenarioConfig c = random_scenario(2, 2);
  CHECK_FALSE(a.agents[0].mu0 == c.agents[0].mu0);
}

TEST_CASE("random_scenario paths cross pairwise") {
  for (std::uint64_t seed : {7ull, 11ull, 23ull}) {
    for (int M : {2, 3, 4}) {
      const ScenarioConfig cfg = random_scenario(seed, M);
      for (int i = 0; i < M; ++i) {
        for (int j = i + 1; j < M; ++j) {
          CHECK_MESSAGE(oracle_cross(cfg.agents[i].mu0.head<2>(), cfg.agents[i].goal,
                                     cfg.agents[j].mu0.head<2>(), cfg.agents[j].goal),
                        "seed " << seed << " M " << M << " pair " << i << "," << j);
        }
      }
    }
  }
}

TEST_CASE("random_scenario requires two agents") {
  CHECK_THROWS_AS(random_scenario(1, 1), ScenarioError);
}

TEST_CASE("segments_intersect handles shared endpoints and separation") {
  CHECK(segments_intersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  CHECK(segments_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}));  // touching
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST_CASE("fnv1a64 fingerprints differ on different bytes") {
  CHECK(fnv1a64("abc") != fnv1a64("abd"));
  CHECK(fnv1a64("") == 14695981039346656037ull);
}
