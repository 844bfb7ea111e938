// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccmpc/types.hpp"

namespace ccmpc {

enum class PlanMode { SA, RIPP, ROBUST };

const char* to_string(PlanMode m);
std::optional<PlanMode> plan_mode_from_string(const std::string& s);

struct NoiseSpec {
  enum class Kind { Gaussian, Dryden };
  Kind kind = Kind::Gaussian;
  // Gaussian: i.i.d. draws with this covariance
  Mat4 Q = Mat4::Zero();
  // Dryden low-altitude turbulence parameters
  double altitude_ft = 200.0;
  double w20_fts = 0.0;   // wind speed at 20 ft
  double airspeed_fts = 45.0;
  double dt_s = 1.0;

  bool operator==(const NoiseSpec& o) const;
};

struct AgentSpec {
  Mat4 A;
  Mat42 B;
  Vec4 mu0 = Vec4::Zero();       // prior mean: x, y, vx, vy (ft, ft/s)
  Mat4 C0 = Mat4::Zero();        // prior covariance
  Vec2 goal = Vec2::Zero();      // target way point (ft)
  double u_max = 12.0;           // sup-norm bound on acceleration inputs
  NoiseSpec noise;

  AgentSpec();
  bool operator==(const AgentSpec& o) const;
};

/// The double-integrator motion model used throughout the benchmarks.
Mat4 double_integrator_A();
Mat42 double_integrator_B();
Mat4 default_prior_covariance();

struct ObstacleRect {
  Vec2 center = Vec2::Zero();
  double width = 0.0;
  double height = 0.0;

  double xmin() const { return center.x() - 0.5 * width; }
  double xmax() const { return center.x() + 0.5 * width; }
  double ymin() const { return center.y() - 0.5 * height; }
  double ymax() const { return center.y() + 0.5 * height; }
  bool contains(const Vec2& p) const {
    return p.x() > xmin() && p.x() < xmax() && p.y() > ymin() && p.y() < ymax();
  }
  bool operator==(const ObstacleRect& o) const {
    return center == o.center && width == o.width && height == o.height;
  }
};

struct ScenarioConfig {
  std::vector<AgentSpec> agents;
  std::vector<ObstacleRect> obstacles;
  int horizon = 7;
  double epsilon = 5.0;            // minimum inter-agent clearance (ft)
  double delta_pair = 0.01;        // per-pair per-timestep collision bound
  std::vector<double> delta_pair_t;  // optional per-timestep overrides (size H)
  double delta_obstacle = 0.01;    // per-agent obstacle-violation bound
  int sample_count = 30;
  std::optional<double> big_m;     // big-M constant; derived from bounds when absent
  double delta_split = 2.0;        // d > 1 in the chance-budget split
  PlanMode mode = PlanMode::RIPP;
  std::uint64_t seed = 1;
  bool ripp_halving = false;

  int agent_count() const { return static_cast<int>(agents.size()); }
  double delta_pair_at(int t) const {  // t is 1-based
    if (!delta_pair_t.empty()) return delta_pair_t[static_cast<std::size_t>(t - 1)];
    return delta_pair;
  }

  bool operator==(const ScenarioConfig& o) const;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ScenarioError naming the violated invariant.
void validate(const ScenarioConfig& cfg);

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);
/// Byte-stable for identical input; load(save(cfg)) == cfg.
std::string to_text(const ScenarioConfig& cfg);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

/// Randomized benchmark instance: M agents inside `arena` whose straight
/// start-to-goal segments pairwise cross, so the plans must interact.
/// Deterministic in `seed`.
ScenarioConfig random_scenario(std::uint64_t seed, int agent_count,
                               const Rect& arena = Rect{{0.0, 0.0}, {400.0, 400.0}});

/// Proper or touching intersection of segments [a1,a2] and [b1,b2].
bool segments_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2);

/// FNV-1a hash of a byte string; used to fingerprint scenario files.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace ccmpc
