// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: plan, compare modes, validate plans against fresh
// Monte-Carlo draws, export LP files and run benchmark sweeps.
// Exit codes: 0 ok, 2 infeasible, 3 validation flag raised, 4 input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "ccmpc/planner.hpp"
#include "ccmpc/validate.hpp"

namespace fs = std::filesystem;
using namespace ccmpc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitFlagged = 3;
constexpr int kExitInput = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write file: " + path);
  out << text;
}

struct CommonOpts {
  std::string scenario_path;
  std::string mode_name;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  bool ripp_halving = false;
  std::string out;
};

ScenarioConfig load_with_overrides(const CommonOpts& o, std::uint64_t* digest) {
  const std::string bytes = slurp(o.scenario_path);
  if (digest) *digest = fnv1a64(bytes);
  ScenarioConfig cfg = parse_scenario(bytes);
  if (o.seed) cfg.seed = *o.seed;
  if (o.samples) cfg.sample_count = *o.samples;
  if (o.ripp_halving) cfg.ripp_halving = true;
  validate(cfg);
  return cfg;
}

PlanMode pick_mode(const CommonOpts& o, const ScenarioConfig& cfg) {
  if (o.mode_name.empty()) return cfg.mode;
  const auto m = plan_mode_from_string(o.mode_name);
  if (!m) throw ScenarioError("unknown mode: " + o.mode_name);
  return *m;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mode = true) {
  cmd->add_option("--scenario", o.scenario_path, "scenario file")->required();
  if (with_mode) cmd->add_option("--mode", o.mode_name, "sa, ripp or robust");
  cmd->add_option("--seed", o.seed, "override the scenario seed");
  cmd->add_option("--samples", o.samples, "override the ensemble size N");
  cmd->add_flag("--ripp-halving", o.ripp_halving, "use the halved RIPP thresholds");
  cmd->add_option("--out", o.out, "output directory (or file for export-lp)");
}

int cmd_plan(const CommonOpts& o, bool receding) {
  std::uint64_t digest = 0;
  const ScenarioConfig cfg = load_with_overrides(o, &digest);
  const PlanMode mode = pick_mode(o, cfg);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);

  if (receding) {
    const RecedingResult rr = receding_horizon_run(cfg, mode, cfg.seed);
    std::ostringstream csv;
    csv << "agent,t,kind,x,y,vx,vy\n";
    for (std::size_t i = 0; i < rr.realized.size(); ++i)
      for (std::size_t t = 0; t < rr.realized[i].size(); ++t) {
        const Vec4& x = rr.realized[i][t];
        csv << i + 1 << "," << t << ",realized," << x[0] << "," << x[1] << "," << x[2] << ","
            << x[3] << "\n";
      }
    const std::string path = (dir / ("receding_" + std::string(to_string(mode)) + ".csv")).string();
    spill(path, csv.str());
    std::cout << "receding-horizon run (" << to_string(mode) << "): "
              << (rr.completed ? "completed" : "stopped early") << ", trajectory in " << path
              << "\n";
    for (std::size_t k = 0; k < rr.step_status.size(); ++k)
      std::cout << "  step " << k + 1 << ": " << rr.step_status[k] << "\n";
    return rr.completed ? kExitOk : kExitInfeasible;
  }

  PlanArtifacts art;
  const PlanResult res = plan(cfg, mode, {}, &art);
  if (res.status == milp::Status::Infeasible) {
    std::cerr << "infeasible: first infeasible constraint family: " << res.infeasible_family
              << "\n";
    return kExitInfeasible;
  }
  if (res.status != milp::Status::Optimal) {
    std::cerr << "solver stopped: " << milp::to_string(res.status) << "\n";
    return kExitInfeasible;
  }
  const std::string tag = to_string(mode);
  spill((dir / ("record_" + tag + ".json")).string(), record_to_json(res, cfg, digest));
  spill((dir / ("trajectories_" + tag + ".csv")).string(), trajectories_csv(res, &art));
  std::cout << "mode " << tag << ": objective " << res.objective << " (t0 offset "
            << res.objective_t0_offset << "), nodes " << res.stats.nodes << ", build "
            << res.build_seconds << " s, solve " << res.solve_seconds << " s\n"
            << "wrote " << (dir / ("record_" + tag + ".json")).string() << "\n";
  return kExitOk;
}

int cmd_compare(const CommonOpts& o, std::vector<std::string> mode_names) {
  std::uint64_t digest = 0;
  const ScenarioConfig cfg = load_with_overrides(o, &digest);
  if (mode_names.empty()) mode_names = {"ripp", "sa"};
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);

  struct Row {
    std::string mode;
    PlanResult res;
  };
  std::vector<Row> rows;
  for (const std::string& name : mode_names) {
    const auto m = plan_mode_from_string(name);
    if (!m) throw ScenarioError("unknown mode: " + name);
    rows.push_back({name, plan(cfg, *m)});  // identical draws: same scenario seed
  }

  const Row* sa_row = nullptr;
  for (const Row& r : rows)
    if (r.mode == "sa" && r.res.status == milp::Status::Optimal) sa_row = &r;
  const Row* baseline = sa_row ? sa_row : &rows.front();

  std::ostringstream csv;
  csv << "mode,status,objective,suboptimality_pct,build_seconds,solve_seconds,nodes,"
         "binaries_total\n";
  std::cout << "mode      status      objective    subopt%   build_s   solve_s   binaries\n";
  for (const Row& r : rows) {
    double sub = std::numeric_limits<double>::quiet_NaN();
    if (r.res.status == milp::Status::Optimal && baseline->res.status == milp::Status::Optimal)
      sub = suboptimality_pct(r.res.objective, baseline->res.objective);
    csv << r.mode << "," << milp::to_string(r.res.status) << "," << r.res.objective << "," << sub
        << "," << r.res.build_seconds << "," << r.res.solve_seconds << "," << r.res.stats.nodes
        << "," << r.res.meta.total() << "\n";
    std::printf("%-9s %-11s %11.5f %8.3f %9.3f %9.3f %10ld\n", r.mode.c_str(),
                milp::to_string(r.res.status), r.res.objective, sub, r.res.build_seconds,
                r.res.solve_seconds, r.res.meta.total());
  }
  spill((dir / "compare.csv").string(), csv.str());
  std::cout << "wrote " << (dir / "compare.csv").string() << "\n";
  for (const Row& r : rows)
    if (r.res.status == milp::Status::Infeasible) return kExitInfeasible;
  return kExitOk;
}

int cmd_validate(const CommonOpts& o, const std::string& record_path, long mc_samples) {
  std::uint64_t digest = 0;
  const ScenarioConfig cfg = load_with_overrides(o, &digest);
  const RunRecord rec = record_from_json(slurp(record_path));
  if (rec.scenario_digest != digest)
    std::cerr << "warning: record was produced from a different scenario file\n";
  if (rec.status != "Optimal") throw ScenarioError("record does not hold an Optimal plan");

  const McReport rep = mc_collision_prob(cfg, rec.controls, mc_samples,
                                         o.seed ? *o.seed : cfg.seed + 1);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  const std::string path = (dir / "mc_report.json").string();
  spill(path, rep.to_json());
  std::cout << "wrote " << path << "\n";
  for (const auto& f : rep.flags)
    std::cout << "flag: pair (" << rep.pairs[f.pair_index].first + 1 << ","
              << rep.pairs[f.pair_index].second + 1 << ") t=" << f.t << " prob=" << f.prob
              << " exceeds delta + 3 SE = " << f.threshold << "\n";
  return rep.flags.empty() ? kExitOk : kExitFlagged;
}

int cmd_export_lp(const CommonOpts& o) {
  const ScenarioConfig cfg = load_with_overrides(o, nullptr);
  const PlanMode mode = pick_mode(o, cfg);
  std::vector<AffineCoeffs> coeffs;
  std::vector<MomentTrajectory> moments;
  prepare_inputs(cfg, coeffs, moments);
  const EncodedProblem ep = assemble(cfg, coeffs, moments, mode);
  const std::string path = o.out.empty() ? "model.lp" : o.out;
  spill(path, milp::export_lp_text(ep.model));
  std::cout << "wrote " << path << " (" << ep.model.num_variables() << " variables, "
            << ep.model.num_binaries() << " binary, " << ep.model.num_constraints()
            << " constraints)\n";
  return kExitOk;
}

int cmd_bench(const CommonOpts& o, std::vector<int> agent_counts, int runs,
              std::vector<std::string> mode_names) {
  if (agent_counts.empty()) agent_counts = {2, 3, 4, 5};
  if (mode_names.empty()) mode_names = {"ripp"};
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);

  std::ostringstream csv;
  csv << "mode,agents,seed,status,objective,build_seconds,solve_seconds,nodes,binaries\n";
  struct Agg {
    std::vector<double> times;
    std::vector<double> objectives;
  };
  std::map<std::pair<std::string, int>, Agg> agg;

  for (int M : agent_counts) {
    for (int run = 0; run < runs; ++run) {
      ScenarioConfig cfg = random_scenario(1000 + run, M);
      if (o.samples) cfg.sample_count = *o.samples;
      if (o.ripp_halving) cfg.ripp_halving = true;
      for (const std::string& name : mode_names) {
        const auto m = plan_mode_from_string(name);
        if (!m) throw ScenarioError("unknown mode: " + name);
        const PlanResult res = plan(cfg, *m);
        csv << name << "," << M << "," << cfg.seed << "," << milp::to_string(res.status) << ","
            << res.objective << "," << res.build_seconds << "," << res.solve_seconds << ","
            << res.stats.nodes << "," << res.meta.total() << "\n";
        if (res.status == milp::Status::Optimal) {
          agg[{name, M}].times.push_back(res.solve_seconds);
          agg[{name, M}].objectives.push_back(res.objective);
        }
      }
    }
  }
  spill((dir / "bench.csv").string(), csv.str());

  std::ostringstream plot;
  plot << "mode,agents,solve_seconds_min,solve_seconds_max,solve_seconds_mean,"
          "suboptimality_pct_mean\n";
  std::cout << "mode      M    min_s     max_s     mean_s    subopt%\n";
  for (const auto& [key, a] : agg) {
    if (a.times.empty()) continue;
    const double mn = *std::min_element(a.times.begin(), a.times.end());
    const double mx = *std::max_element(a.times.begin(), a.times.end());
    const double mean = std::accumulate(a.times.begin(), a.times.end(), 0.0) / a.times.size();
    double sub = std::numeric_limits<double>::quiet_NaN();
    const auto sa_it = agg.find({"sa", key.second});
    if (key.first != "sa" && sa_it != agg.end() &&
        sa_it->second.objectives.size() == a.objectives.size()) {
      sub = 0.0;
      for (std::size_t k = 0; k < a.objectives.size(); ++k)
        sub += suboptimality_pct(a.objectives[k], sa_it->second.objectives[k]);
      sub /= a.objectives.size();
    }
    plot << key.first << "," << key.second << "," << mn << "," << mx << "," << mean << "," << sub
         << "\n";
    std::printf("%-9s %-4d %9.3f %9.3f %9.3f %9.3f\n", key.first.c_str(), key.second, mn, mx,
                mean, sub);
  }
  spill((dir / "bench_summary.csv").string(), plot.str());
  std::cout << "wrote " << (dir / "bench.csv").string() << " and "
            << (dir / "bench_summary.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccmpc: chance-constrained multi-agent MPC planning toolkit"};
  app.require_subcommand(1);

  CommonOpts plan_opts;
  bool receding = false;
  CLI::App* c_plan = app.add_subcommand("plan", "plan one scenario and write record + CSV");
  add_common(c_plan, plan_opts);
  c_plan->add_flag("--receding", receding, "replan each step from the realized state");

  CommonOpts cmp_opts;
  std::vector<std::string> cmp_modes;
  CLI::App* c_cmp = app.add_subcommand("compare", "run several modes on identical draws");
  add_common(c_cmp, cmp_opts, false);
  c_cmp->add_option("--modes", cmp_modes, "modes to compare (default: ripp sa)");

  CommonOpts val_opts;
  std::string record_path;
  long mc_samples = 100000;
  CLI::App* c_val = app.add_subcommand("validate", "Monte-Carlo validation of a plan record");
  add_common(c_val, val_opts, false);
  c_val->add_option("--record", record_path, "record JSON produced by plan")->required();
  c_val->add_option("--mc", mc_samples, "Monte-Carlo sample count (default 1e5)");

  CommonOpts lp_opts;
  CLI::App* c_lp = app.add_subcommand("export-lp", "write the MILP in LP text format");
  add_common(c_lp, lp_opts);

  CommonOpts bench_opts;
  std::vector<int> bench_agents;
  int bench_runs = 10;
  std::vector<std::string> bench_modes;
  CLI::App* c_bench = app.add_subcommand("bench", "randomized benchmark sweep");
  c_bench->add_option("--agents", bench_agents, "agent counts (default 2 3 4 5)");
  c_bench->add_option("--runs", bench_runs, "scenarios per agent count");
  c_bench->add_option("--modes", bench_modes, "modes to run (default ripp)");
  c_bench->add_option("--samples", bench_opts.samples, "ensemble size N");
  c_bench->add_flag("--ripp-halving", bench_opts.ripp_halving, "use the halved RIPP thresholds");
  c_bench->add_option("--out", bench_opts.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitInput;
  }

  try {
    if (c_plan->parsed()) return cmd_plan(plan_opts, receding);
    if (c_cmp->parsed()) return cmd_compare(cmp_opts, cmp_modes);
    if (c_val->parsed()) return cmd_validate(val_opts, record_path, mc_samples);
    if (c_lp->parsed()) return cmd_export_lp(lp_opts);
    if (c_bench->parsed()) return cmd_bench(bench_opts, bench_agents, bench_runs, bench_modes);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
