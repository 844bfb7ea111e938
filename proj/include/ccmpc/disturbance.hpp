// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ccmpc/scenario.hpp"
#include "ccmpc/types.hpp"

namespace ccmpc {

/// MIL-F-8785C low-altitude Dryden parameters at a fixed flight condition.
struct DrydenParams {
  double altitude_ft = 0.0;
  double w20_fts = 0.0;   // wind speed at 20 ft
  double airspeed_fts = 0.0;
  double dt_s = 1.0;
  // derived
  double sigma_w = 0.0;   // vertical intensity, 0.1 * W20
  double sigma_u = 0.0;   // longitudinal = lateral intensity (ft/s)
  double sigma_v = 0.0;
  double length_u = 0.0;  // scale lengths (ft)
  double length_v = 0.0;
};

class DisturbanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DrydenParams dryden_params(double altitude_ft, double w20_fts, double airspeed_fts, double dt_s);

/// Noise sequences for one agent: draws[j][t-1] is nu_t of sample j.
/// Disturbances enter the velocity components; positions stay zero.
struct NoiseDraws {
  int agent = 0;
  std::vector<std::vector<Vec4>> draws;  // [N][H]

  int sample_count() const { return static_cast<int>(draws.size()); }
  int horizon() const { return draws.empty() ? 0 : static_cast<int>(draws[0].size()); }
};

/// Per-axis first-order gust filter g_{k+1} = (1 - V dt / L) g_k +
/// sqrt(2 V dt / L) sigma eta_k started from rest; the per-step gust
/// velocity increments land in the velocity components of nu.
NoiseDraws draw_dryden(const DrydenParams& params, int horizon, int sample_count,
                       std::uint64_t seed);

/// i.i.d. nu_t ~ N(0, Q) draws.
NoiseDraws draw_gaussian(const Mat4& Q, int horizon, int sample_count, std::uint64_t seed);

NoiseDraws draw_noise(const NoiseSpec& spec, int horizon, int sample_count, std::uint64_t seed);

/// Unbiased sample covariance of {nu_t,j}_j at fixed t (1-based).
Mat4 empirical_cov(const NoiseDraws& draws, int t);

/// Unbiased sample cross-covariance Cov(nu_s, nu_t) over samples (s, t 1-based).
Mat4 empirical_cross_cov(const NoiseDraws& draws, int s, int t);

}  // namespace ccmpc
