// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/planner.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ccmpc/disturbance.hpp"
#include "ccmpc/rng.hpp"

namespace ccmpc {

namespace {

constexpr std::uint64_t kInitDrawTag = 0x696e6974;   // planning ensemble, prior
constexpr std::uint64_t kNoiseDrawTag = 0x6e6f6973;  // planning ensemble, noise
constexpr std::uint64_t kCovEstTag = 0x71657374;     // covariance estimation
constexpr std::uint64_t kRecedingTag = 0x72686f72;   // receding-horizon sim

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Vec4> draw_initial_states(const AgentSpec& a, int N, std::uint64_t seed) {
  const NoiseDraws d = draw_gaussian(a.C0, 1, N, seed);
  std::vector<Vec4> out(N);
  for (int j = 0; j < N; ++j) out[j] = a.mu0 + d.draws[j][0];
  return out;
}

MomentTrajectory build_moments(const AgentSpec& a, int H, std::uint64_t cov_seed) {
  MomentTrajectory m;
  m.mean = mean_trajectory(a.A, a.B, a.mu0, H);
  if (a.noise.kind == NoiseSpec::Kind::Gaussian) {
    m.cov = covariance_trajectory(a.C0, std::vector<Mat4>(H, a.noise.Q), a.A);
    return m;
  }
  // Serially correlated turbulence: estimate per-step covariances and the
  // cross terms Cov(x_{t-1}, nu_t) from a large fresh draw.
  const NoiseDraws est = draw_noise(a.noise, H, kCovEstimateDraws, cov_seed);
  std::vector<Mat4> Q(H);
  for (int t = 1; t <= H; ++t) Q[t - 1] = empirical_cov(est, t);
  std::vector<Mat4> cross(H, Mat4::Zero());
  std::vector<Mat4> a_pow(H);  // a_pow[k] = A^k
  a_pow[0] = Mat4::Identity();
  for (int k = 1; k < H; ++k) a_pow[k] = a.A * a_pow[k - 1];
  for (int t = 2; t <= H; ++t) {
    Mat4 s = Mat4::Zero();
    for (int u = 1; u < t; ++u) s += a_pow[t - 1 - u] * empirical_cross_cov(est, u, t);
    cross[t - 1] = s;
  }
  m.cov = covariance_trajectory(a.C0, Q, a.A, &cross);
  return m;
}

/// Names the first family whose constraints alone render the scenario
/// infeasible; used for the infeasibility diagnostic.
std::string diagnose_infeasibility(const ScenarioConfig& scenario,
                                   const std::vector<AffineCoeffs>& coeffs,
                                   const std::vector<MomentTrajectory>& moments, PlanMode mode,
                                   const milp::SolveSettings& base) {
  const char* pair_family = mode == PlanMode::SA      ? "sa_pair"
                            : mode == PlanMode::RIPP ? "ripp_pair"
                                                      : "robust_pair";
  if (!scenario.obstacles.empty()) {
    for (int i = 0; i < scenario.agent_count(); ++i) {
      ScenarioConfig solo = scenario;
      solo.agents = {scenario.agents[i]};
      const std::vector<AffineCoeffs> c1 = {coeffs[i]};
      const std::vector<MomentTrajectory> m1 = {moments[i]};
      EncodedProblem ep = assemble(solo, c1, m1, mode);
      milp::SolveSettings st = base;
      st.incumbent_hint = make_incumbent_hint(ep, solo);
      if (milp::solve(ep.model, st).status == milp::Status::Infeasible)
        return "obstacle (agent " + std::to_string(i + 1) + ")";
    }
  }
  if (scenario.agent_count() > 1) {
    ScenarioConfig no_obs = scenario;
    no_obs.obstacles.clear();
    EncodedProblem ep = assemble(no_obs, coeffs, moments, mode);
    milp::SolveSettings st = base;
    st.incumbent_hint = make_incumbent_hint(ep, no_obs);
    if (milp::solve(ep.model, st).status == milp::Status::Infeasible) return pair_family;
  }
  return std::string("interaction of obstacle and ") + pair_family + " families";
}

}  // namespace

void prepare_inputs(const ScenarioConfig& scenario, std::vector<AffineCoeffs>& coeffs,
                    std::vector<MomentTrajectory>& moments, PlanArtifacts* artifacts) {
  const int M = scenario.agent_count();
  const int H = scenario.horizon;
  const int N = scenario.sample_count;
  coeffs.clear();
  moments.clear();
  coeffs.reserve(M);
  moments.reserve(M);
  if (artifacts) {
    artifacts->initial_draws.resize(M);
    artifacts->noise_draws.resize(M);
  }
  for (int i = 0; i < M; ++i) {
    const AgentSpec& a = scenario.agents[i];
    const auto init = draw_initial_states(
        a, N, mix_seed(scenario.seed, kInitDrawTag, static_cast<std::uint64_t>(i)));
    const auto noise =
        draw_noise(a.noise, H, N, mix_seed(scenario.seed, kNoiseDrawTag, static_cast<std::uint64_t>(i)));
    coeffs.push_back(affine_coefficients(a.A, a.B, H, init, noise.draws));
    moments.push_back(
        build_moments(a, H, mix_seed(scenario.seed, kCovEstTag, static_cast<std::uint64_t>(i))));
    if (artifacts) {
      artifacts->initial_draws[i] = init;
      artifacts->noise_draws[i] = noise.draws;
    }
  }
}

PlanResult plan(const ScenarioConfig& scenario, PlanMode mode,
                const milp::SolveSettings& base_settings, PlanArtifacts* artifacts) {
  validate(scenario);
  PlanResult res;
  res.mode = mode;

  const auto t_build = std::chrono::steady_clock::now();
  std::vector<AffineCoeffs> coeffs;
  std::vector<MomentTrajectory> moments;
  prepare_inputs(scenario, coeffs, moments, artifacts);
  EncodedProblem ep = assemble(scenario, coeffs, moments, mode);
  res.build_seconds = now_seconds(t_build);
  res.meta = ep.meta;
  res.big_m_used = ep.big_m_used;
  res.objective_t0_offset = ep.objective_t0_offset;

  milp::SolveSettings settings = base_settings;
  settings.incumbent_hint = make_incumbent_hint(ep, scenario);
  const auto t_solve = std::chrono::steady_clock::now();
  const milp::Solution sol = milp::solve(ep.model, settings);
  res.solve_seconds = now_seconds(t_solve);

  res.status = sol.status;
  res.stats = sol.stats;
  if (sol.status == milp::Status::Optimal || (sol.status == milp::Status::IterationLimit &&
                                              sol.values.size() == ep.model.num_variables())) {
    res.objective = sol.objective;
    const int M = scenario.agent_count();
    const int H = scenario.horizon;
    res.controls.resize(M);
    res.mean_traj.resize(M);
    for (int i = 0; i < M; ++i) {
      res.controls[i].resize(H);
      for (int t = 1; t <= H; ++t)
        for (int axis = 0; axis < 2; ++axis)
          res.controls[i][t - 1][axis] = sol.values[ep.layout.control_ids[i][t - 1][axis]];
      res.mean_traj[i].resize(H + 1);
      for (int t = 0; t <= H; ++t)
        res.mean_traj[i][t] = moments[i].mean.evaluate(t, res.controls[i]);
    }
  } else if (sol.status == milp::Status::Infeasible) {
    res.infeasible_family = diagnose_infeasibility(scenario, coeffs, moments, mode, base_settings);
  }
  if (artifacts) artifacts->encoded = std::move(ep);
  if (artifacts) {
    artifacts->coeffs = std::move(coeffs);
    artifacts->moments = std::move(moments);
  }
  return res;
}

double suboptimality_pct(const PlanResult& ripp, const PlanResult& sa) {
  if (ripp.status != milp::Status::Optimal || sa.status != milp::Status::Optimal)
    throw std::invalid_argument("suboptimality_pct: both runs must be solved to Optimal");
  return 100.0 * (ripp.objective - sa.objective) / sa.objective;
}

std::string record_to_json(const PlanResult& r, const ScenarioConfig& scenario,
                           std::uint64_t scenario_digest) {
  nlohmann::ordered_json j;
  char digest[17];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(scenario_digest));
  j["record_version"] = 1;
  j["scenario_digest"] = digest;
  j["mode"] = to_string(r.mode);
  j["seed"] = scenario.seed;
  j["samples"] = scenario.sample_count;
  j["horizon"] = scenario.horizon;
  j["status"] = milp::to_string(r.status);
  j["objective"] = r.objective;
  j["objective_t0_offset"] = r.objective_t0_offset;
  j["big_m"] = r.big_m_used;
  bool any_dryden = false;
  for (const auto& a : scenario.agents)
    any_dryden = any_dryden || a.noise.kind == NoiseSpec::Kind::Dryden;
  if (any_dryden) j["cov_estimate_draws"] = kCovEstimateDraws;
  j["binaries"] = {{"objective", r.meta.objective},
                   {"obstacle", r.meta.obstacle},
                   {"sa_pair", r.meta.sa_pair},
                   {"ripp_pair", r.meta.ripp_pair},
                   {"robust_pair", r.meta.robust_pair}};
  j["solver"] = {{"nodes", r.stats.nodes},
                 {"lp_pivots", r.stats.lp_pivots},
                 {"root_lp_objective", r.stats.root_lp_objective},
                 {"best_bound", r.stats.best_bound}};
  j["timing"] = {{"build_seconds", r.build_seconds},
                 {"solve_seconds", r.solve_seconds},
                 {"solver_wall_seconds", r.stats.wall_seconds}};
  if (r.status == milp::Status::Infeasible) j["infeasible_family"] = r.infeasible_family;
  nlohmann::ordered_json controls = nlohmann::ordered_json::array();
  for (const auto& per_agent : r.controls) {
    nlohmann::ordered_json ja = nlohmann::ordered_json::array();
    for (const Vec2& u : per_agent) ja.push_back({u.x(), u.y()});
    controls.push_back(ja);
  }
  j["controls"] = controls;
  nlohmann::ordered_json means = nlohmann::ordered_json::array();
  for (const auto& per_agent : r.mean_traj) {
    nlohmann::ordered_json ja = nlohmann::ordered_json::array();
    for (const Vec4& x : per_agent) ja.push_back({x[0], x[1], x[2], x[3]});
    means.push_back(ja);
  }
  j["mean_trajectories"] = means;
  return j.dump(2) + "\n";
}

RunRecord record_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunRecord rec;
  rec.scenario_digest = std::stoull(j.at("scenario_digest").get<std::string>(), nullptr, 16);
  const auto mode = plan_mode_from_string(j.at("mode").get<std::string>());
  if (!mode) throw std::invalid_argument("record_from_json: unknown mode");
  rec.mode = *mode;
  rec.status = j.at("status").get<std::string>();
  rec.objective = j.at("objective").get<double>();
  for (const auto& ja : j.at("controls")) {
    std::vector<Vec2> per_agent;
    for (const auto& ju : ja) per_agent.push_back(Vec2(ju[0].get<double>(), ju[1].get<double>()));
    rec.controls.push_back(std::move(per_agent));
  }
  return rec;
}

std::string trajectories_csv(const PlanResult& r, const PlanArtifacts* artifacts) {
  std::ostringstream os;
  os << "agent,t,kind,x,y,vx,vy\n";
  auto emit = [&os](int agent, int t, const std::string& kind, const Vec4& x) {
    os << agent + 1 << "," << t << "," << kind << "," << x[0] << "," << x[1] << "," << x[2]
       << "," << x[3] << "\n";
  };
  for (std::size_t i = 0; i < r.mean_traj.size(); ++i)
    for (std::size_t t = 0; t < r.mean_traj[i].size(); ++t)
      emit(static_cast<int>(i), static_cast<int>(t), "mean", r.mean_traj[i][t]);
  if (artifacts) {
    for (std::size_t i = 0; i < artifacts->coeffs.size(); ++i) {
      const AffineCoeffs& co = artifacts->coeffs[i];
      const int N = static_cast<int>(co.constants.size());
      for (int j = 0; j < N; ++j)
        for (int t = 0; t <= co.horizon; ++t)
          emit(static_cast<int>(i), t, "sample" + std::to_string(j + 1),
               co.evaluate(j, t, r.controls[i]));
    }
  }
  return os.str();
}

RecedingResult receding_horizon_run(const ScenarioConfig& scenario, PlanMode mode,
                                    std::uint64_t sim_seed) {
  const int M = scenario.agent_count();
  const int H = scenario.horizon;
  RecedingResult out;
  out.realized.resize(M);

  // one realized disturbance sequence and initial state per agent
  std::vector<std::vector<Vec4>> noise(M);
  for (int i = 0; i < M; ++i) {
    const auto seq = draw_noise(scenario.agents[i].noise, H, 1,
                                mix_seed(sim_seed, kRecedingTag, static_cast<std::uint64_t>(i)));
    noise[i] = seq.draws[0];
    const auto init = draw_initial_states(
        scenario.agents[i], 1,
        mix_seed(sim_seed, kRecedingTag + 1, static_cast<std::uint64_t>(i)));
    out.realized[i].push_back(init[0]);
  }

  out.completed = true;
  for (int k = 1; k <= H; ++k) {
    ScenarioConfig sub = scenario;
    sub.horizon = H - k + 1;
    sub.delta_pair_t.clear();
    sub.seed = mix_seed(scenario.seed, kRecedingTag + 2, static_cast<std::uint64_t>(k));
    for (int i = 0; i < M; ++i) {
      sub.agents[i].mu0 = out.realized[i].back();
      sub.agents[i].C0 = Mat4::Zero();  // realized state known exactly
    }
    const PlanResult step_plan = plan(sub, mode);
    out.step_status.push_back(milp::to_string(step_plan.status));
    if (step_plan.status != milp::Status::Optimal) {
      out.completed = false;
      break;
    }
    for (int i = 0; i < M; ++i) {
      const Vec4 next = step(scenario.agents[i].A, scenario.agents[i].B, out.realized[i].back(),
                             step_plan.controls[i][0], noise[i][k - 1]);
      out.realized[i].push_back(next);
    }
  }
  return out;
}

}  // namespace ccmpc
