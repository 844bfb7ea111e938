// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/dynamics.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ccmpc {

TrajectoryEnsemble propagate_ensemble(const Mat4& A, const Mat42& B,
                                      const std::vector<Vec4>& initial_draws,
                                      const std::vector<std::vector<Vec4>>& noise_draws,
                                      const std::vector<Vec2>& controls) {
  const int N = static_cast<int>(initial_draws.size());
  const int H = static_cast<int>(controls.size());
  if (static_cast<int>(noise_draws.size()) != N)
    throw std::invalid_argument("propagate_ensemble: need one noise sequence per initial draw");
  TrajectoryEnsemble ens;
  ens.initial_draws = initial_draws;
  ens.noise_draws = noise_draws;
  ens.samples.resize(N);
  for (int j = 0; j < N; ++j) {
    if (static_cast<int>(noise_draws[j].size()) != H)
      throw std::invalid_argument("propagate_ensemble: noise sequence shorter than horizon");
    auto& traj = ens.samples[j];
    traj.resize(H + 1);
    traj[0] = initial_draws[j];
    for (int t = 1; t <= H; ++t)
      traj[t] = step(A, B, traj[t - 1], controls[t - 1], noise_draws[j][t - 1]);
  }
  return ens;
}

AffineCoeffs affine_coefficients(const Mat4& A, const Mat42& B, int horizon,
                                 const std::vector<Vec4>& initial_draws,
                                 const std::vector<std::vector<Vec4>>& noise_draws) {
  AffineCoeffs co;
  co.horizon = horizon;
  co.G.resize(horizon + 1);
  for (int t = 1; t <= horizon; ++t) {
    co.G[t].resize(t);
    co.G[t][t - 1] = B;
    for (int s = 1; s < t; ++s) co.G[t][s - 1] = A * co.G[t - 1][s - 1];
  }
  const int N = static_cast<int>(initial_draws.size());
  co.constants.resize(N);
  for (int j = 0; j < N; ++j) {
    auto& cj = co.constants[j];
    cj.resize(horizon + 1);
    cj[0] = initial_draws[j];
    for (int t = 1; t <= horizon; ++t) cj[t] = A * cj[t - 1] + noise_draws[j][t - 1];
  }
  return co;
}

MeanAffine mean_trajectory(const Mat4& A, const Mat42& B, const Vec4& mu0, int horizon) {
  MeanAffine m;
  m.horizon = horizon;
  m.base.resize(horizon + 1);
  m.base[0] = mu0;
  for (int t = 1; t <= horizon; ++t) m.base[t] = A * m.base[t - 1];
  m.G.resize(horizon + 1);
  for (int t = 1; t <= horizon; ++t) {
    m.G[t].resize(t);
    m.G[t][t - 1] = B;
    for (int s = 1; s < t; ++s) m.G[t][s - 1] = A * m.G[t - 1][s - 1];
  }
  return m;
}

std::vector<Mat4> covariance_trajectory(const Mat4& C0, const std::vector<Mat4>& Q,
                                        const Mat4& A, const std::vector<Mat4>* cross) {
  auto check_psd = [](const Mat4& M, const char* what) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (M + M.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-9 * (1.0 + M.cwiseAbs().maxCoeff()))
      throw std::invalid_argument(std::string("covariance_trajectory: ") + what +
                                  " is not positive semidefinite");
  };
  check_psd(C0, "C0");
  for (const Mat4& q : Q) check_psd(q, "noise covariance");
  if (cross && cross->size() != Q.size())
    throw std::invalid_argument("covariance_trajectory: cross terms must match Q in length");

  std::vector<Mat4> C(Q.size() + 1);
  C[0] = 0.5 * (C0 + C0.transpose());
  for (std::size_t t = 1; t <= Q.size(); ++t) {
    Mat4 next = A * C[t - 1] * A.transpose() + Q[t - 1];
    if (cross) {
      const Mat4& S = (*cross)[t - 1];  // Cov(x_{t-1}, nu_t)
      next += A * S + S.transpose() * A.transpose();
    }
    C[t] = 0.5 * (next + next.transpose());
  }
  return C;
}

}  // namespace ccmpc
