// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/disturbance.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ccmpc/rng.hpp"

namespace ccmpc {

DrydenParams dryden_params(double altitude_ft, double w20_fts, double airspeed_fts, double dt_s) {
  if (altitude_ft < 10.0 || altitude_ft > 1000.0)
    throw DisturbanceError("dryden_params: altitude outside low-altitude validity [10, 1000] ft");
  if (airspeed_fts <= 0.0) throw DisturbanceError("dryden_params: airspeed must be positive");
  if (dt_s <= 0.0) throw DisturbanceError("dryden_params: dt must be positive");
  if (w20_fts < 0.0) throw DisturbanceError("dryden_params: wind speed must be nonnegative");
  DrydenParams p;
  p.altitude_ft = altitude_ft;
  p.w20_fts = w20_fts;
  p.airspeed_fts = airspeed_fts;
  p.dt_s = dt_s;
  const double denom = 0.177 + 0.000823 * altitude_ft;
  p.sigma_w = 0.1 * w20_fts;
  p.sigma_u = p.sigma_w / std::pow(denom, 0.4);
  p.sigma_v = p.sigma_u;
  p.length_u = altitude_ft / std::pow(denom, 1.2);
  p.length_v = p.length_u;
  return p;
}

NoiseDraws draw_dryden(const DrydenParams& params, int horizon, int sample_count,
                       std::uint64_t seed) {
  const double a_u = params.airspeed_fts * params.dt_s / params.length_u;
  const double a_v = params.airspeed_fts * params.dt_s / params.length_v;
  if (a_u >= 1.0 || a_v >= 1.0)
    throw DisturbanceError("draw_dryden: V*dt/L >= 1, discrete gust filter unstable");
  const double phi_u = 1.0 - a_u;
  const double phi_v = 1.0 - a_v;
  const double in_u = std::sqrt(2.0 * a_u) * params.sigma_u;
  const double in_v = std::sqrt(2.0 * a_v) * params.sigma_v;

  NoiseDraws nd;
  nd.draws.resize(sample_count);
  for (int j = 0; j < sample_count; ++j) {
    Rng rng(mix_seed(seed, 0xd47d, static_cast<std::uint64_t>(j)));
    std::normal_distribution<double> eta(0.0, 1.0);
    auto& seq = nd.draws[j];
    seq.resize(horizon);
    double gx = 0.0, gy = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const double gx_next = phi_u * gx + in_u * eta(rng);
      const double gy_next = phi_v * gy + in_v * eta(rng);
      seq[t] = Vec4(0.0, 0.0, gx_next - gx, gy_next - gy);
      gx = gx_next;
      gy = gy_next;
    }
  }
  return nd;
}

NoiseDraws draw_gaussian(const Mat4& Q, int horizon, int sample_count, std::uint64_t seed) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (Q + Q.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-9 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw DisturbanceError("draw_gaussian: covariance is not positive semidefinite");
  const Vec4 lam = es.eigenvalues().cwiseMax(0.0);
  const Mat4 L = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();

  NoiseDraws nd;
  nd.draws.resize(sample_count);
  for (int j = 0; j < sample_count; ++j) {
    Rng rng(mix_seed(seed, 0x6a55, static_cast<std::uint64_t>(j)));
    std::normal_distribution<double> eta(0.0, 1.0);
    auto& seq = nd.draws[j];
    seq.resize(horizon);
    for (int t = 0; t < horizon; ++t) {
      const Vec4 z(eta(rng), eta(rng), eta(rng), eta(rng));
      seq[t] = L * z;
    }
  }
  return nd;
}

NoiseDraws draw_noise(const NoiseSpec& spec, int horizon, int sample_count, std::uint64_t seed) {
  if (spec.kind == NoiseSpec::Kind::Gaussian)
    return draw_gaussian(spec.Q, horizon, sample_count, seed);
  const DrydenParams p =
      dryden_params(spec.altitude_ft, spec.w20_fts, spec.airspeed_fts, spec.dt_s);
  return draw_dryden(p, horizon, sample_count, seed);
}

Mat4 empirical_cov(const NoiseDraws& draws, int t) {
  return empirical_cross_cov(draws, t, t);
}

Mat4 empirical_cross_cov(const NoiseDraws& draws, int s, int t) {
  const int N = draws.sample_count();
  if (N < 2) throw DisturbanceError("empirical_cov: need at least 2 samples");
  Vec4 mean_s = Vec4::Zero(), mean_t = Vec4::Zero();
  for (int j = 0; j < N; ++j) {
    mean_s += draws.draws[j][s - 1];
    mean_t += draws.draws[j][t - 1];
  }
  mean_s /= N;
  mean_t /= N;
  Mat4 acc = Mat4::Zero();
  for (int j = 0; j < N; ++j)
    acc += (draws.draws[j][s - 1] - mean_s) * (draws.draws[j][t - 1] - mean_t).transpose();
  return acc / (N - 1);
}

}  // namespace ccmpc
