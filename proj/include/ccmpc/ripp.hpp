// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// Regions of increased probability of presence: a distribution-free
// Chebyshev-type bound (Whittle) on the mass outside an axis-aligned box,
// its closed-form inversion into region half-widths, and the chance-budget
// split between two agents.

#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "ccmpc/types.hpp"

namespace ccmpc {

struct ScenarioConfig;

/// Planar position covariance (the 2x2 position block of the state).
struct CovMatrix2 {
  double c11 = 0.0;  // Var(x)
  double c22 = 0.0;  // Var(y)
  double c12 = 0.0;  // Cov(x, y)
};

/// Rectangular region |x - mu_x| <= alpha_x, |y - mu_y| <= alpha_y around a
/// mean that is a decision expression at encode time; only the half-widths
/// are stored.
struct RippRegion {
  double alpha_x = 0.0;
  double alpha_y = 0.0;
};

class RippError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distribution-free upper bound on Pr(|x - mu_x| > ax or |y - mu_y| > ay)
/// for any planar random vector with covariance C.
double whittle_bound(const CovMatrix2& C, double alpha_x, double alpha_y);

/// Half-widths (alpha_x, alpha_y) with whittle_bound == gamma and the aspect
/// ratio alpha_x / alpha_y = sqrt(c11 / c22).  Degenerate variances are
/// floored at 1e-12 so the region stays nonempty.
RippRegion size_region(const CovMatrix2& C, double gamma);

/// Splits delta into (delta/d, delta - delta/d); the parts sum to delta
/// exactly in floating point.
std::pair<double, double> split_delta(double delta, double d);

/// Position block of a 4x4 state covariance.
CovMatrix2 position_cov(const Mat4& C);

/// Region pair for one unordered agent pair at one timestep.
struct PairRegions {
  RippRegion first;   // lower agent index, sized at delta/d
  RippRegion second;  // higher agent index, sized at (d-1)/d * delta
};

/// Regions for every unordered pair and every t = 1..H, keyed as
/// regions[pair_index][t-1] with pairs enumerated (0,1), (0,2), ..., in
/// lexicographic order.  cov_trajs[i][t] is agent i's state covariance.
std::vector<std::vector<PairRegions>> build_regions(
    const ScenarioConfig& scenario, const std::vector<std::vector<Mat4>>& cov_trajs);

/// Lexicographic enumeration of unordered pairs used across the toolkit.
std::vector<std::pair<int, int>> agent_pairs(int agent_count);

}  // namespace ccmpc
