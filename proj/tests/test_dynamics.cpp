// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "ccmpc/disturbance.hpp"
#include "ccmpc/dynamics.hpp"
#include "ccmpc/scenario.hpp"

using namespace ccmpc;

namespace {

std::vector<std::vector<Vec4>> zero_noise(int N, int H) {
  return std::vector<std::vector<Vec4>>(N, std::vector<Vec4>(H, Vec4::Zero()));
}

Mat4 random_psd4(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Mat4 R;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) R(i, j) = g(rng);
  return R * R.transpose();
}

}  // namespace

TEST_CASE("step: identity system returns the state") {
  const Vec4 x(3.0, -1.0, 0.5, 2.0);
  CHECK(step(Mat4::Identity(), Mat42::Zero(), x, Vec2(7, 9), Vec4::Zero()) == x);
}

TEST_CASE("step: double integrator moves by the velocity") {
  const Vec4 y = step(double_integrator_A(), double_integrator_B(), Vec4(0, 0, 1, 1),
                      Vec2::Zero(), Vec4::Zero());
  CHECK(y == Vec4(1, 1, 1, 1));
}

TEST_CASE("step: controls enter through the velocity rows") {
  const Vec4 y = step(double_integrator_A(), double_integrator_B(), Vec4::Zero(), Vec2(2, 3),
                      Vec4::Zero());
  CHECK(y == Vec4(0, 0, 2, 3));
}

TEST_CASE("constant unit acceleration yields the double-integrator ramp") {
  const int H = 4;
  const std::vector<Vec2> u(H, Vec2(1.0, 0.0));
  const auto ens = propagate_ensemble(double_integrator_A(), double_integrator_B(),
                                      {Vec4::Zero()}, zero_noise(1, H), u);
  const double expect[] = {0, 0, 1, 3, 6};
  for (int t = 0; t <= H; ++t) CHECK(ens.samples[0][t][0] == doctest::Approx(expect[t]));
}

TEST_CASE("zero controls and noise follow the homogeneous recursion") {
  const Mat4 A = double_integrator_A();
  const Vec4 x0(1.0, 2.0, -0.5, 0.25);
  const int H = 5;
  const auto ens = propagate_ensemble(A, double_integrator_B(), {x0}, zero_noise(1, H),
                                      std::vector<Vec2>(H, Vec2::Zero()));
  Mat4 At = Mat4::Identity();
  for (int t = 0; t <= H; ++t) {
    CHECK((ens.samples[0][t] - At * x0).cwiseAbs().maxCoeff() <= 1e-12);
    At = A * At;
  }
}

TEST_CASE("affine coefficients: single step and A*B entries") {
  const Mat4 A = double_integrator_A();
  const Mat42 B = double_integrator_B();
  const auto co1 = affine_coefficients(A, B, 1, {Vec4::Zero()}, zero_noise(1, 1));
  CHECK((co1.G[1][0] - B).cwiseAbs().maxCoeff() == 0.0);
  const auto co2 = affine_coefficients(A, B, 2, {Vec4::Zero()}, zero_noise(1, 2));
  Mat42 AB;
  AB << 1, 0,
        0, 1,
        1, 0,
        0, 1;
  CHECK((co2.G[2][0] - AB).cwiseAbs().maxCoeff() == 0.0);
  CHECK((co2.G[2][1] - B).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("affine evaluation reproduces propagation at random controls") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  const int H = 4, N = 3;
  Mat4 A;
  Mat42 B;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = g(rng);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) B(i, j) = g(rng);
  std::vector<Vec4> init(N);
  auto noise = zero_noise(N, H);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < 4; ++k) init[j][k] = g(rng);
    for (int t = 0; t < H; ++t)
      for (int k = 0; k < 4; ++k) noise[j][t][k] = g(rng);
  }
  const auto co = affine_coefficients(A, B, H, init, noise);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec2> u(H);
    for (auto& uu : u) uu = Vec2(g(rng), g(rng));
    const auto ens = propagate_ensemble(A, B, init, noise, u);
    for (int j = 0; j < N; ++j) {
      for (int t = 0; t <= H; ++t) {
        const double scale = 1.0 + ens.samples[j][t].cwiseAbs().maxCoeff();
        CHECK((co.evaluate(j, t, u) - ens.samples[j][t]).cwiseAbs().maxCoeff() <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("mean trajectory matches the homogeneous and forced cases") {
  const Mat4 A = double_integrator_A();
  const Mat42 B = double_integrator_B();
  const Vec4 mu0(130, 135, 0, 0);
  const auto m = mean_trajectory(A, B, mu0, 3);

  std::vector<Vec2> zero(3, Vec2::Zero());
  Mat4 At = Mat4::Identity();
  for (int t = 0; t <= 3; ++t) {
    CHECK((m.evaluate(t, zero) - At * mu0).cwiseAbs().maxCoeff() <= 1e-12);
    At = A * At;
  }

  std::vector<Vec2> u = {{1, 0}, {0, 0}, {0, 0}};
  CHECK(m.evaluate(1, u) == Vec4(130, 135, 1, 0));
  // position-x at t=2 reads 130 + 1*u1x + 0*u2x: with u1 applied it is
  // 131 plus a vanishing coefficient on u_2
  CHECK(m.base[2][0] == doctest::Approx(130.0).epsilon(1e-12));
  CHECK(m.G[2][0](0, 0) == doctest::Approx(1.0));
  CHECK(m.G[2][1](0, 0) == doctest::Approx(0.0));
  CHECK(m.evaluate(2, u)[0] == doctest::Approx(131.0));
}

TEST_CASE("ensemble mean converges to the exact mean (Monte-Carlo oracle)") {
  const Mat4 A = double_integrator_A();
  const Mat42 B = double_integrator_B();
  const Vec4 mu0(130, 135, 0, 0);
  const Mat4 C0 = default_prior_covariance();
  const Mat4 Q = Vec4(0.0, 0.0, 0.04, 0.04).asDiagonal();
  const int H = 4, N = 100000;

  const auto init_noise = draw_gaussian(C0, 1, N, 21);
  std::vector<Vec4> init(N);
  for (int j = 0; j < N; ++j) init[j] = mu0 + init_noise.draws[j][0];
  const auto noise = draw_gaussian(Q, H, N, 22);

  std::vector<Vec2> u(H, Vec2(0.5, -0.25));
  const auto ens = propagate_ensemble(A, B, init, noise.draws, u);
  const auto mean = mean_trajectory(A, B, mu0, H);

  for (int t = 1; t <= H; ++t) {
    Vec4 avg = Vec4::Zero();
    for (int j = 0; j < N; ++j) avg += ens.samples[j][t];
    avg /= N;
    const Vec4 exact = mean.evaluate(t, u);
    Vec4 var = Vec4::Zero();
    for (int j = 0; j < N; ++j) var += (ens.samples[j][t] - avg).cwiseAbs2();
    var /= (N - 1);
    for (int k = 0; k < 4; ++k) {
      const double se = std::sqrt(var[k] / N);
      CHECK(std::abs(avg[k] - exact[k]) <= 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("sample-mean error scales like 1/sqrt(N)") {
  const Mat4 A = double_integrator_A();
  const Mat42 B = double_integrator_B();
  const Mat4 Q = Vec4(0.0, 0.0, 1.0, 1.0).asDiagonal();
  const int H = 5;
  const std::vector<Vec2> u(H, Vec2(0.2, 0.1));
  const auto mean = mean_trajectory(A, B, Vec4::Zero(), H);

  // RMS over repetitions keeps the ratio statistic stable
  std::vector<double> errs;
  const int reps = 30;
  for (int N : {100, 1000, 10000}) {
    double err2 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto noise = draw_gaussian(Q, H, N, 55 + 1000 * rep);
      const auto ens =
          propagate_ensemble(A, B, std::vector<Vec4>(N, Vec4::Zero()), noise.draws, u);
      for (int t = 1; t <= H; ++t) {
        Vec4 avg = Vec4::Zero();
        for (int j = 0; j < N; ++j) avg += ens.samples[j][t];
        avg /= N;
        err2 += (avg - mean.evaluate(t, u)).squaredNorm();
      }
    }
    errs.push_back(std::sqrt(err2 / reps));
  }
  for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
    const double factor = errs[k] / errs[k + 1];
    CHECK(factor >= 2.0);
    CHECK(factor <= 5.0);
  }
}

TEST_CASE("covariance recursion: identity system keeps C0") {
  std::mt19937_64 rng(3);
  const Mat4 C0 = random_psd4(rng, 1.0);
  const auto C = covariance_trajectory(C0, std::vector<Mat4>(5, Mat4::Zero()), Mat4::Identity());
  for (const Mat4& Ct : C) CHECK((Ct - C[0]).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("covariance recursion: one step of the double integrator") {
  const Mat4 A = double_integrator_A();
  const auto C = covariance_trajectory(default_prior_covariance(), {Mat4::Zero()}, A);
  CHECK(C[1](0, 0) == doctest::Approx(1e-3 + 1e-5).epsilon(1e-12));
  CHECK((C[1] - A * default_prior_covariance() * A.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("covariance recursion matches a 1e5-sample empirical covariance") {
  const Mat4 A = double_integrator_A();
  const Mat42 B = double_integrator_B();
  const Mat4 C0 = default_prior_covariance();
  const Mat4 Q = Vec4(0.0, 0.0, 0.09, 0.09).asDiagonal();
  const int H = 4, N = 100000;
  const auto init_noise = draw_gaussian(C0, 1, N, 31);
  std::vector<Vec4> init(N);
  for (int j = 0; j < N; ++j) init[j] = init_noise.draws[j][0];
  const auto noise = draw_gaussian(Q, H, N, 32);
  const auto ens = propagate_ensemble(A, B, init, noise.draws,
                                      std::vector<Vec2>(H, Vec2::Zero()));
  const auto C = covariance_trajectory(C0, std::vector<Mat4>(H, Q), A);
  for (int t = 1; t <= H; ++t) {
    Vec4 avg = Vec4::Zero();
    for (int j = 0; j < N; ++j) avg += ens.samples[j][t];
    avg /= N;
    Mat4 emp = Mat4::Zero();
    for (int j = 0; j < N; ++j) {
      const Vec4 d = ens.samples[j][t] - avg;
      emp += d * d.transpose();
    }
    emp /= (N - 1);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        const double se =
            std::sqrt((C[t](r, r) * C[t](c, c) + C[t](r, c) * C[t](r, c)) / N);
        CHECK_MESSAGE(std::abs(emp(r, c) - C[t](r, c)) <= 5.0 * se + 1e-12,
                      "t=" << t << " entry " << r << "," << c);
      }
    }
  }
}

TEST_CASE("covariances stay symmetric PSD along the horizon") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat4 C0 = random_psd4(rng, 1.0);
    std::vector<Mat4> Q;
    for (int t = 0; t < 6; ++t) Q.push_back(random_psd4(rng, 0.3));
    const auto C = covariance_trajectory(C0, Q, double_integrator_A());
    for (const Mat4& Ct : C) {
      CHECK((Ct - Ct.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      Eigen::SelfAdjointEigenSolver<Mat4> es(Ct);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("covariance recursion rejects non-PSD inputs") {
  Mat4 bad = Mat4::Identity();
  bad(0, 0) = -1.0;
  CHECK_THROWS(covariance_trajectory(bad, {Mat4::Zero()}, Mat4::Identity()));
  CHECK_THROWS(covariance_trajectory(Mat4::Identity(), {bad}, Mat4::Identity()));
}

TEST_CASE("noise-free single sample equals the mean trajectory") {
  const Mat4 A = double_integrator_A();
  const Mat42 B = double_integrator_B();
  const Vec4 mu0(10, 20, 1, -1);
  const int H = 6;
  std::vector<Vec2> u(H);
  for (int t = 0; t < H; ++t) u[t] = Vec2(0.3 * t, -0.1 * t);
  const auto ens = propagate_ensemble(A, B, {mu0}, zero_noise(1, H), u);
  const auto mean = mean_trajectory(A, B, mu0, H);
  for (int t = 0; t <= H; ++t)
    CHECK((ens.samples[0][t] - mean.evaluate(t, u)).cwiseAbs().maxCoeff() <= 1e-12);
}
