// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ccmpc/rng.hpp"

namespace ccmpc {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

void write_matrix(std::ostringstream& os, const char* key, const double* data, int count) {
  os << key << " =";
  for (int i = 0; i < count; ++i) os << " " << fmt(data[i]);
  os << "\n";
}

bool is_psd(const Mat4& m, double tol = 1e-10) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
    return false;
  Eigen::SelfAdjointEigenSolver<Mat4> es(m);
  return es.eigenvalues().minCoeff() >= -tol * (1.0 + m.cwiseAbs().maxCoeff());
}

struct Parser {
  std::string section;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ScenarioError("scenario parse error at line " + std::to_string(line_no) + ": " + msg);
  }

  std::vector<double> numbers(const std::string& value, std::size_t expected = 0) const {
    std::vector<double> out;
    std::istringstream is(value);
    std::string tok;
    while (is >> tok) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) fail("malformed number '" + tok + "'");
      } catch (const std::logic_error&) {
        fail("malformed number '" + tok + "'");
      }
    }
    if (expected != 0 && out.size() != expected)
      fail("expected " + std::to_string(expected) + " numbers, got " + std::to_string(out.size()));
    return out;
  }
};

}  // namespace

const char* to_string(PlanMode m) {
  switch (m) {
    case PlanMode::SA: return "sa";
    case PlanMode::RIPP: return "ripp";
    case PlanMode::ROBUST: return "robust";
  }
  return "?";
}

std::optional<PlanMode> plan_mode_from_string(const std::string& s) {
  if (s == "sa") return PlanMode::SA;
  if (s == "ripp") return PlanMode::RIPP;
  if (s == "robust") return PlanMode::ROBUST;
  return std::nullopt;
}

Mat4 double_integrator_A() {
  Mat4 A;
  A << 1, 0, 1, 0,
       0, 1, 0, 1,
       0, 0, 1, 0,
       0, 0, 0, 1;
  return A;
}

Mat42 double_integrator_B() {
  Mat42 B;
  B << 0, 0,
       0, 0,
       1, 0,
       0, 1;
  return B;
}

Mat4 default_prior_covariance() {
  return Vec4(1e-3, 1e-3, 1e-5, 1e-5).asDiagonal();
}

AgentSpec::AgentSpec()
    : A(double_integrator_A()), B(double_integrator_B()), C0(default_prior_covariance()) {}

bool NoiseSpec::operator==(const NoiseSpec& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Gaussian) return Q == o.Q;
  return altitude_ft == o.altitude_ft && w20_fts == o.w20_fts &&
         airspeed_fts == o.airspeed_fts && dt_s == o.dt_s;
}

bool AgentSpec::operator==(const AgentSpec& o) const {
  return A == o.A && B == o.B && mu0 == o.mu0 && C0 == o.C0 && goal == o.goal &&
         u_max == o.u_max && noise == o.noise;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return agents == o.agents && obstacles == o.obstacles && horizon == o.horizon &&
         epsilon == o.epsilon && delta_pair == o.delta_pair && delta_pair_t == o.delta_pair_t &&
         delta_obstacle == o.delta_obstacle && sample_count == o.sample_count &&
         big_m == o.big_m && delta_split == o.delta_split && mode == o.mode && seed == o.seed &&
         ripp_halving == o.ripp_halving;
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.horizon < 1) throw ScenarioError("horizon must be at least 1");
  if (cfg.sample_count < 1) throw ScenarioError("samples must be at least 1");
  if (cfg.epsilon <= 0.0) throw ScenarioError("epsilon must be positive");
  if (cfg.delta_split <= 1.0) throw ScenarioError("delta_split must exceed 1");
  if (cfg.delta_pair < 0.0 || cfg.delta_pair > 1.0)
    throw ScenarioError("delta_pair must lie in [0, 1]");
  if (cfg.delta_obstacle < 0.0 || cfg.delta_obstacle > 1.0)
    throw ScenarioError("delta_obstacle must lie in [0, 1]");
  if (!cfg.delta_pair_t.empty()) {
    if (static_cast<int>(cfg.delta_pair_t.size()) != cfg.horizon)
      throw ScenarioError("delta_pair_t must list one bound per timestep");
    for (double d : cfg.delta_pair_t)
      if (d < 0.0 || d > 1.0) throw ScenarioError("delta_pair_t entries must lie in [0, 1]");
  }
  if (cfg.big_m && *cfg.big_m <= 0.0) throw ScenarioError("big_m must be positive");
  if (cfg.agents.empty()) throw ScenarioError("at least one agent is required");
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    const AgentSpec& a = cfg.agents[i];
    const std::string who = "agent " + std::to_string(i + 1);
    if (a.u_max <= 0.0) throw ScenarioError(who + ": u_max must be positive");
    if (!is_psd(a.C0)) throw ScenarioError(who + ": C0 must be symmetric positive semidefinite");
    if (a.noise.kind == NoiseSpec::Kind::Gaussian) {
      if (!is_psd(a.noise.Q))
        throw ScenarioError(who + ": noise covariance must be symmetric positive semidefinite");
    } else {
      if (a.noise.altitude_ft < 10.0 || a.noise.altitude_ft > 1000.0)
        throw ScenarioError(who + ": dryden altitude must lie in [10, 1000] feet");
      if (a.noise.airspeed_fts <= 0.0) throw ScenarioError(who + ": dryden airspeed must be positive");
      if (a.noise.dt_s <= 0.0) throw ScenarioError(who + ": dryden dt must be positive");
      if (a.noise.w20_fts < 0.0) throw ScenarioError(who + ": dryden wind speed must be nonnegative");
    }
  }
  for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
    if (cfg.obstacles[i].width <= 0.0 || cfg.obstacles[i].height <= 0.0)
      throw ScenarioError("obstacle " + std::to_string(i + 1) + ": width and height must be positive");
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  cfg.agents.clear();
  Parser p;

  std::istringstream is(text);
  std::string raw;
  AgentSpec* agent = nullptr;
  ObstacleRect* obstacle = nullptr;

  while (std::getline(is, raw)) {
    ++p.line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);

    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      p.section = line.substr(1, line.size() - 2);
      agent = nullptr;
      obstacle = nullptr;
      if (p.section == "global") {
        // nothing to allocate
      } else if (p.section.rfind("agent.", 0) == 0) {
        const int idx = std::atoi(p.section.c_str() + 6);
        if (idx != static_cast<int>(cfg.agents.size()) + 1)
          p.fail("agent sections must be numbered consecutively from 1");
        cfg.agents.emplace_back();
        agent = &cfg.agents.back();
      } else if (p.section.rfind("obstacle.", 0) == 0) {
        const int idx = std::atoi(p.section.c_str() + 9);
        if (idx != static_cast<int>(cfg.obstacles.size()) + 1)
          p.fail("obstacle sections must be numbered consecutively from 1");
        cfg.obstacles.emplace_back();
        obstacle = &cfg.obstacles.back();
      } else {
        p.fail("unknown section '" + p.section + "'");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kb = key.find_last_not_of(" \t");
    key = key.substr(0, kb + 1);
    if (const auto vb = value.find_first_not_of(" \t"); vb != std::string::npos)
      value = value.substr(vb);
    else
      value.clear();

    if (p.section == "global") {
      if (key == "horizon") cfg.horizon = static_cast<int>(p.numbers(value, 1)[0]);
      else if (key == "epsilon") cfg.epsilon = p.numbers(value, 1)[0];
      else if (key == "delta_pair") cfg.delta_pair = p.numbers(value, 1)[0];
      else if (key == "delta_pair_t") cfg.delta_pair_t = p.numbers(value);
      else if (key == "delta_obstacle") cfg.delta_obstacle = p.numbers(value, 1)[0];
      else if (key == "samples") cfg.sample_count = static_cast<int>(p.numbers(value, 1)[0]);
      else if (key == "big_m") cfg.big_m = p.numbers(value, 1)[0];
      else if (key == "delta_split") cfg.delta_split = p.numbers(value, 1)[0];
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(p.numbers(value, 1)[0]);
      else if (key == "ripp_halving") {
        if (value == "true") cfg.ripp_halving = true;
        else if (value == "false") cfg.ripp_halving = false;
        else p.fail("ripp_halving must be true or false");
      } else if (key == "mode") {
        const auto m = plan_mode_from_string(value);
        if (!m) p.fail("mode must be one of sa, ripp, robust");
        cfg.mode = *m;
      } else {
        p.fail("unknown global key '" + key + "'");
      }
    } else if (agent) {
      if (key == "A") {
        const auto v = p.numbers(value, 16);
        agent->A = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(v.data());
      } else if (key == "B") {
        const auto v = p.numbers(value, 8);
        agent->B = Eigen::Map<const Eigen::Matrix<double, 4, 2, Eigen::RowMajor>>(v.data());
      } else if (key == "C0") {
        const auto v = p.numbers(value, 16);
        agent->C0 = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(v.data());
      } else if (key == "mu0") {
        const auto v = p.numbers(value, 4);
        agent->mu0 = Eigen::Map<const Vec4>(v.data());
      } else if (key == "goal") {
        const auto v = p.numbers(value, 2);
        agent->goal = Eigen::Map<const Vec2>(v.data());
      } else if (key == "u_max") {
        agent->u_max = p.numbers(value, 1)[0];
      } else if (key == "noise") {
        std::istringstream ns(value);
        std::string kind;
        ns >> kind;
        std::string rest;
        std::getline(ns, rest);
        if (kind == "gaussian") {
          const auto v = p.numbers(rest, 16);
          agent->noise.kind = NoiseSpec::Kind::Gaussian;
          agent->noise.Q = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(v.data());
        } else if (kind == "dryden") {
          const auto v = p.numbers(rest, 4);
          agent->noise.kind = NoiseSpec::Kind::Dryden;
          agent->noise.altitude_ft = v[0];
          agent->noise.w20_fts = v[1];
          agent->noise.airspeed_fts = v[2];
          agent->noise.dt_s = v[3];
        } else {
          p.fail("noise kind must be gaussian or dryden");
        }
      } else {
        p.fail("unknown agent key '" + key + "'");
      }
    } else if (obstacle) {
      if (key == "center") {
        const auto v = p.numbers(value, 2);
        obstacle->center = Eigen::Map<const Vec2>(v.data());
      } else if (key == "width") obstacle->width = p.numbers(value, 1)[0];
      else if (key == "height") obstacle->height = p.numbers(value, 1)[0];
      else p.fail("unknown obstacle key '" + key + "'");
    } else {
      p.fail("key outside of any section");
    }
  }

  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string to_text(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "[global]\n";
  os << "horizon = " << cfg.horizon << "\n";
  os << "epsilon = " << fmt(cfg.epsilon) << "\n";
  os << "delta_pair = " << fmt(cfg.delta_pair) << "\n";
  if (!cfg.delta_pair_t.empty()) {
    os << "delta_pair_t =";
    for (double d : cfg.delta_pair_t) os << " " << fmt(d);
    os << "\n";
  }
  os << "delta_obstacle = " << fmt(cfg.delta_obstacle) << "\n";
  os << "samples = " << cfg.sample_count << "\n";
  if (cfg.big_m) os << "big_m = " << fmt(*cfg.big_m) << "\n";
  os << "delta_split = " << fmt(cfg.delta_split) << "\n";
  os << "mode = " << to_string(cfg.mode) << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "ripp_halving = " << (cfg.ripp_halving ? "true" : "false") << "\n";

  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    const AgentSpec& a = cfg.agents[i];
    os << "\n[agent." << i + 1 << "]\n";
    Eigen::Matrix<double, 4, 4, Eigen::RowMajor> Ar = a.A;
    write_matrix(os, "A", Ar.data(), 16);
    Eigen::Matrix<double, 4, 2, Eigen::RowMajor> Br = a.B;
    write_matrix(os, "B", Br.data(), 8);
    write_matrix(os, "mu0", a.mu0.data(), 4);
    Eigen::Matrix<double, 4, 4, Eigen::RowMajor> Cr = a.C0;
    write_matrix(os, "C0", Cr.data(), 16);
    write_matrix(os, "goal", a.goal.data(), 2);
    os << "u_max = " << fmt(a.u_max) << "\n";
    if (a.noise.kind == NoiseSpec::Kind::Gaussian) {
      Eigen::Matrix<double, 4, 4, Eigen::RowMajor> Qr = a.noise.Q;
      os << "noise = gaussian";
      for (int k = 0; k < 16; ++k) os << " " << fmt(Qr.data()[k]);
      os << "\n";
    } else {
      os << "noise = dryden " << fmt(a.noise.altitude_ft) << " " << fmt(a.noise.w20_fts) << " "
         << fmt(a.noise.airspeed_fts) << " " << fmt(a.noise.dt_s) << "\n";
    }
  }

  for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
    const ObstacleRect& o = cfg.obstacles[i];
    os << "\n[obstacle." << i + 1 << "]\n";
    write_matrix(os, "center", o.center.data(), 2);
    os << "width = " << fmt(o.width) << "\n";
    os << "height = " << fmt(o.height) << "\n";
  }
  return os.str();
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write scenario file: " + path);
  out << to_text(cfg);
}

bool segments_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
  auto cross = [](const Vec2& o, const Vec2& p, const Vec2& q) {
    return (p.x() - o.x()) * (q.y() - o.y()) - (p.y() - o.y()) * (q.x() - o.x());
  };
  auto on_seg = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x(), r.x()) <= q.x() && q.x() <= std::max(p.x(), r.x()) &&
           std::min(p.y(), r.y()) <= q.y() && q.y() <= std::max(p.y(), r.y());
  };
  const double d1 = cross(b1, b2, a1);
  const double d2 = cross(b1, b2, a2);
  const double d3 = cross(a1, a2, b1);
  const double d4 = cross(a1, a2, b2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_seg(b1, a1, b2)) return true;
  if (d2 == 0 && on_seg(b1, a2, b2)) return true;
  if (d3 == 0 && on_seg(a1, b1, a2)) return true;
  if (d4 == 0 && on_seg(a1, b2, a2)) return true;
  return false;
}

ScenarioConfig random_scenario(std::uint64_t seed, int agent_count, const Rect& arena) {
  if (agent_count < 2) throw ScenarioError("random_scenario requires at least 2 agents");
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.mode = PlanMode::RIPP;

  Rng rng(mix_seed(seed, 0x5ce9a1d0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto dryden_defaults = [](AgentSpec& a) {
    a.noise.kind = NoiseSpec::Kind::Dryden;
    a.noise.altitude_ft = 200.0;
    a.noise.w20_fts = 3.0;
    a.noise.airspeed_fts = 45.0;
    a.noise.dt_s = 1.0;
  };

  if (agent_count == 2) {
    // A mirrored pair with a guaranteed single-timestep encounter.  With the
    // x way point out of reach within the horizon, the cost-optimal x profile
    // is maximum acceleration at least through t = 5, i.e. x(t) = 6 t (t-1)
    // exactly, so reflecting agent 1 about the vertical line through x(5)
    // puts both agents on that line at t = 5.  A small y offset keeps the
    // encounter inside the clearance without a perfectly symmetric model.
    const double span_x = arena.width();
    const double sx = arena.lo.x() + 0.1 * span_x + 0.2 * span_x * unit(rng);
    const double dx = 240.0 + 22.0 * unit(rng);
    // offset the mirror line so the means pass a little outside the
    // clearance: a noise-width shell of sample pairs still collides, which
    // makes the chance budget bind without locking every pair at once
    const double mirror = sx + 120.0 + 3.1 + 0.4 * unit(rng);
    const double dir_y = unit(rng) < 0.5 ? 1.0 : -1.0;
    const double dy = 90.0 + 40.0 * unit(rng);
    const double sy = arena.center().y() - dir_y * (0.5 * dy) + 30.0 * (unit(rng) - 0.5);
    const double jitter_y = 2.0 + 1.5 * unit(rng);

    cfg.agents.assign(2, AgentSpec{});
    cfg.agents[0].mu0 << sx, sy, 0.0, 0.0;
    cfg.agents[0].goal = Vec2(sx + dx, sy + dir_y * dy);
    cfg.agents[1].mu0 << 2.0 * mirror - sx, sy + jitter_y, 0.0, 0.0;
    cfg.agents[1].goal = Vec2(2.0 * mirror - (sx + dx), sy + dir_y * dy + jitter_y);
    dryden_defaults(cfg.agents[0]);
    dryden_defaults(cfg.agents[1]);
    validate(cfg);
    return cfg;
  }

  // Three or more agents: starts on a narrow ring with goals near the
  // antipode, so every start-to-goal segment passes close to the arena
  // center and all pairs cross.
  const Vec2 c = arena.center();
  const double mid_r = 0.30 * std::min(arena.width(), arena.height());
  const double max_r = mid_r + 3.0;
  const double min_r = mid_r - 3.0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    cfg.agents.assign(static_cast<std::size_t>(agent_count), AgentSpec{});
    const double phi0 = 2.0 * M_PI * unit(rng);
    for (int i = 0; i < agent_count; ++i) {
      const double theta = phi0 + 2.0 * M_PI * i / agent_count + 0.1 * (unit(rng) - 0.5);
      const double r_start = min_r + (max_r - min_r) * unit(rng);
      const double r_goal = min_r + (max_r - min_r) * unit(rng);
      const double theta_goal = theta + M_PI + 0.1 * (unit(rng) - 0.5);
      AgentSpec& a = cfg.agents[static_cast<std::size_t>(i)];
      a.mu0.head<2>() = c + r_start * Vec2(std::cos(theta), std::sin(theta));
      a.mu0.tail<2>().setZero();
      a.goal = c + r_goal * Vec2(std::cos(theta_goal), std::sin(theta_goal));
      dryden_defaults(a);
    }
    bool all_cross = true;
    for (int i = 0; i < agent_count && all_cross; ++i) {
      for (int j = i + 1; j < agent_count && all_cross; ++j) {
        all_cross = segments_intersect(cfg.agents[i].mu0.head<2>(), cfg.agents[i].goal,
                                       cfg.agents[j].mu0.head<2>(), cfg.agents[j].goal);
      }
    }
    if (all_cross) break;
  }
  validate(cfg);
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ccmpc
