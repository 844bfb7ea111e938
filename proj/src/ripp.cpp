// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/ripp.hpp"

#include <cmath>

#include "ccmpc/scenario.hpp"

namespace ccmpc {

namespace {
constexpr double kVarianceFloor = 1e-12;

void check_psd(const CovMatrix2& C) {
  if (C.c11 < 0.0 || C.c22 < 0.0 || C.c11 * C.c22 - C.c12 * C.c12 < -1e-12 * (1.0 + C.c11 * C.c22))
    throw RippError("covariance is not positive semidefinite");
}
}  // namespace

double whittle_bound(const CovMatrix2& C, double alpha_x, double alpha_y) {
  if (alpha_x <= 0.0 || alpha_y <= 0.0) throw RippError("whittle_bound: half-widths must be positive");
  check_psd(C);
  const double ax2 = alpha_x * alpha_x;
  const double ay2 = alpha_y * alpha_y;
  const double s = C.c11 * ay2 + C.c22 * ax2;
  double disc = s * s - 4.0 * C.c12 * C.c12 * ax2 * ay2;
  if (disc < 0.0) disc = 0.0;  // PSD guarantees nonnegative up to roundoff
  const double bound = (s + std::sqrt(disc)) / (2.0 * ax2 * ay2);
  return bound < 0.0 ? 0.0 : bound;
}

RippRegion size_region(const CovMatrix2& C, double gamma) {
  if (gamma <= 0.0 || gamma > 1.0) throw RippError("size_region: gamma must lie in (0, 1]");
  check_psd(C);
  const double c11 = std::max(C.c11, kVarianceFloor);
  const double c22 = std::max(C.c22, kVarianceFloor);
  double det = c11 * c22 - C.c12 * C.c12;
  if (det < 0.0) det = 0.0;
  const double g2 = gamma * gamma;
  const double inner = c11 * c22 * det * g2;
  const double ax2 = c11 / gamma + std::sqrt(inner) / (c22 * g2);
  RippRegion r;
  r.alpha_x = std::sqrt(ax2);
  r.alpha_y = std::sqrt(c22 / c11) * r.alpha_x;
  return r;
}

std::pair<double, double> split_delta(double delta, double d) {
  if (d <= 1.0) throw RippError("split_delta: d must exceed 1");
  if (delta < 0.0 || delta > 1.0) throw RippError("split_delta: delta must lie in [0, 1]");
  double gamma1 = delta / d;
  const double gamma2 = delta - gamma1;
  // re-derive the smaller part so the two sum to delta exactly (the larger
  // part lies in [delta/2, delta], making the subtraction exact)
  if (gamma1 < gamma2) gamma1 = delta - gamma2;
  return {gamma1, gamma2};
}

CovMatrix2 position_cov(const Mat4& C) {
  CovMatrix2 c;
  c.c11 = C(0, 0);
  c.c22 = C(1, 1);
  c.c12 = 0.5 * (C(0, 1) + C(1, 0));
  return c;
}

std::vector<std::pair<int, int>> agent_pairs(int agent_count) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < agent_count; ++i)
    for (int j = i + 1; j < agent_count; ++j) pairs.push_back({i, j});
  return pairs;
}

std::vector<std::vector<PairRegions>> build_regions(
    const ScenarioConfig& scenario, const std::vector<std::vector<Mat4>>& cov_trajs) {
  const auto pairs = agent_pairs(scenario.agent_count());
  std::vector<std::vector<PairRegions>> out(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    out[p].resize(scenario.horizon);
    for (int t = 1; t <= scenario.horizon; ++t) {
      const auto [gamma1, gamma2] = split_delta(scenario.delta_pair_at(t), scenario.delta_split);
      // a zero budget admits no finite region; sizing rejects gamma = 0
      out[p][t - 1].first = size_region(position_cov(cov_trajs[i][t]), gamma1);
      out[p][t - 1].second = size_region(position_cov(cov_trajs[j][t]), gamma2);
    }
  }
  return out;
}

}  // namespace ccmpc
