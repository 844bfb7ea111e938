// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// Linear stochastic state propagation.  Convention: controls u_1..u_H and
// noise nu_1..nu_H drive x_t = A x_{t-1} + B u_t + nu_t for t = 1..H, so a
// trajectory has H+1 states x_0..x_H.  All functions here are pure.

#pragma once

#include <vector>

#include "ccmpc/types.hpp"

namespace ccmpc {

/// One step of the linear system equation.
inline Vec4 step(const Mat4& A, const Mat42& B, const Vec4& x, const Vec2& u, const Vec4& nu) {
  return A * x + B * u + nu;
}

/// N sample trajectories over H+1 steps, all driven by the same controls.
struct TrajectoryEnsemble {
  int agent = 0;
  std::vector<std::vector<Vec4>> samples;      // [N][H+1]
  std::vector<std::vector<Vec4>> noise_draws;  // [N][H], noise_draws[j][t-1] = nu_t
  std::vector<Vec4> initial_draws;             // [N]

  int sample_count() const { return static_cast<int>(samples.size()); }
  int horizon() const { return samples.empty() ? 0 : static_cast<int>(samples[0].size()) - 1; }
};

/// Control-dependence of the state: x_{t,j} = const_{t,j} + sum_s G[t][s] u_s.
/// The coefficient matrices are built by unrolling the recursion, never from
/// a closed-form power expression, so evaluation reproduces propagation to
/// machine precision.
struct AffineCoeffs {
  int horizon = 0;
  // G[t][s] for 1 <= s <= t <= H; G[t] has t entries (index s-1)
  std::vector<std::vector<Mat42>> G;
  // constants[j][t] for t = 0..H absorb the initial and noise draws
  std::vector<std::vector<Vec4>> constants;

  /// State of sample j at time t under the given controls (u[t-1] = u_t).
  Vec4 evaluate(int j, int t, const std::vector<Vec2>& u) const {
    Vec4 x = constants[j][t];
    for (int s = 1; s <= t; ++s) x += G[t][s - 1] * u[s - 1];
    return x;
  }
};

/// Affine expression of the exact mean: mu_t = base[t] + sum_s G[t][s] u_s.
struct MeanAffine {
  int horizon = 0;
  std::vector<Vec4> base;             // [H+1], base[t] = A^t mu0 (unrolled)
  std::vector<std::vector<Mat42>> G;  // same layout as AffineCoeffs::G

  Vec4 evaluate(int t, const std::vector<Vec2>& u) const {
    Vec4 x = base[t];
    for (int s = 1; s <= t; ++s) x += G[t][s - 1] * u[s - 1];
    return x;
  }
};

/// Mean expression plus covariance sequence of the uncertain state.
struct MomentTrajectory {
  MeanAffine mean;
  std::vector<Mat4> cov;  // [H+1], cov[0] = C0
};

TrajectoryEnsemble propagate_ensemble(const Mat4& A, const Mat42& B,
                                      const std::vector<Vec4>& initial_draws,
                                      const std::vector<std::vector<Vec4>>& noise_draws,
                                      const std::vector<Vec2>& controls);

AffineCoeffs affine_coefficients(const Mat4& A, const Mat42& B, int horizon,
                                 const std::vector<Vec4>& initial_draws,
                                 const std::vector<std::vector<Vec4>>& noise_draws);

MeanAffine mean_trajectory(const Mat4& A, const Mat42& B, const Vec4& mu0, int horizon);

/// Covariance recursion C_t = A C_{t-1} A^T + Q_t + A S_t + S_t^T A^T where
/// Q_t = Cov(nu_t) and the optional S_t = Cov(x_{t-1}, nu_t) captures serially
/// correlated noise (zero for independent noise).  Q[t-1] is Q_t.
std::vector<Mat4> covariance_trajectory(const Mat4& C0, const std::vector<Mat4>& Q,
                                        const Mat4& A,
                                        const std::vector<Mat4>* cross = nullptr);

}  // namespace ccmpc
