// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <cmath>
#include <deque>
#include <memory>
#include <queue>

#include "ccmpc/milp.hpp"
#include "simplex.hpp"

namespace ccmpc::milp {

namespace {

using detail::ActiveLp;
using detail::BasisSnapshot;

struct Node {
  double bound = -kInf;
  std::int64_t id = 0;
  int parent = -1;
  int branch_var = -1;
  std::int8_t branch_up = 0;  // 0: ub<-0, 1: lb<-1
  std::shared_ptr<const BasisSnapshot> basis;
};

struct NodeOrder {
  // best bound first; among equal bounds the newest node (diving)
  bool operator()(const std::pair<double, int>& a, const std::pair<double, int>& b) const {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  }
};

/// Interval-arithmetic fixing of binaries plus infeasibility detection.
/// Only binary bounds ever tighten here (branching alters nothing else).
class Propagator {
 public:
  explicit Propagator(const Model& m) : model_(m) {
    const int nv = m.num_variables();
    var_rows_.resize(nv);
    for (int r = 0; r < m.num_constraints(); ++r) {
      bool has_binary = false;
      for (const LinTerm& t : m.constraint(r).expr.terms())
        if (m.variable(t.var).kind == VarKind::Binary) { has_binary = true; break; }
      if (!has_binary) continue;
      for (const LinTerm& t : m.constraint(r).expr.terms()) var_rows_[t.var].push_back(r);
      binary_rows_.push_back(r);
    }
  }

  /// Returns false on detected infeasibility.  lb/ub are tightened in place.
  bool run(std::vector<double>& lb, std::vector<double>& ub,
           const std::vector<int>& seed_vars) const {
    std::deque<int> work;
    std::vector<char> queued(model_.num_constraints(), 0);
    auto push_rows_of = [&](int v) {
      for (int r : var_rows_[v])
        if (!queued[r]) { queued[r] = 1; work.push_back(r); }
    };
    if (seed_vars.empty()) {
      for (int r : binary_rows_) { queued[r] = 1; work.push_back(r); }
    } else {
      for (int v : seed_vars) push_rows_of(v);
    }
    while (!work.empty()) {
      const int r = work.front();
      work.pop_front();
      queued[r] = 0;
      const Constraint& con = model_.constraint(r);
      // check both directions for Eq, one for Le/Ge (normalized as <=)
      for (int pass = 0; pass < 2; ++pass) {
        double flip;
        double rhs;
        if (pass == 0) {
          if (con.sense == Sense::Ge) continue;
          flip = 1.0;
          rhs = con.rhs;
        } else {
          if (con.sense == Sense::Le) continue;
          flip = -1.0;
          rhs = -con.rhs;
        }
        double minact = 0.0;
        for (const LinTerm& t : con.expr.terms()) {
          const double a = flip * t.coef;
          minact += a > 0.0 ? a * lb[t.var] : a * ub[t.var];
        }
        if (minact > rhs + 1e-9) return false;
        for (const LinTerm& t : con.expr.terms()) {
          if (model_.variable(t.var).kind != VarKind::Binary) continue;
          if (lb[t.var] >= ub[t.var]) continue;  // already fixed
          const double a = flip * t.coef;
          const double own_min = a > 0.0 ? a * lb[t.var] : a * ub[t.var];
          const double others = minact - own_min;
          if (a > 0.0 && others + a > rhs + 1e-9) {
            ub[t.var] = 0.0;  // value 1 impossible
            push_rows_of(t.var);
          } else if (a < 0.0 && others > rhs + 1e-9) {
            lb[t.var] = 1.0;  // value 0 impossible
            push_rows_of(t.var);
          }
          if (lb[t.var] > ub[t.var]) return false;
        }
      }
    }
    return true;
  }

 private:
  const Model& model_;
  std::vector<std::vector<int>> var_rows_;
  std::vector<int> binary_rows_;
};

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Solution lp_relaxation(const Model& model, const LpOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  ActiveLp lp(model, options);
  const auto res = lp.solve_lazy();
  Solution sol;
  sol.status = res.status;
  sol.values = lp.full_solution();
  sol.objective = res.status == Status::Optimal ? res.objective : 0.0;
  sol.stats.lp_pivots = res.pivots;
  sol.stats.wall_seconds = now_seconds(t0);
  sol.stats.best_bound = res.status == Status::Optimal ? res.objective : -kInf;
  return sol;
}

Solution solve(const Model& model, const SolveSettings& settings) {
  const auto t0 = std::chrono::steady_clock::now();
  Solution out;
  out.stats.best_bound = -kInf;

  ActiveLp lp(model, settings.lp);
  Propagator prop(model);

  const int nv = model.num_variables();
  std::vector<double> base_lb(nv), base_ub(nv);
  for (int i = 0; i < nv; ++i) {
    base_lb[i] = model.variable(i).lb;
    base_ub[i] = model.variable(i).ub;
  }

  const bool debug_log = std::getenv("CCMPC_BB_LOG") != nullptr;
  std::deque<Node> nodes;
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>, NodeOrder> open;
  nodes.push_back(Node{});
  open.push({-kInf, 0});

  Eigen::VectorXd best_x;
  double best_obj = kInf;
  bool have_inc = false;
  double proven_bound = -kInf;

  std::vector<double> lb, ub;
  std::vector<int> seed;
  bool hit_limit = false;

  while (!open.empty()) {
    const auto [bound, idx] = open.top();
    if (have_inc && bound >= best_obj - settings.absolute_gap) {
      proven_bound = std::max(proven_bound, best_obj);
      break;  // best-first: every remaining node is pruned too
    }
    open.pop();
    proven_bound = std::max(proven_bound, bound);

    if (out.stats.nodes >= settings.node_limit ||
        now_seconds(t0) > settings.time_limit_seconds) {
      hit_limit = true;
      break;
    }

    // reconstruct node bounds by replaying the branching path
    lb = base_lb;
    ub = base_ub;
    seed.clear();
    for (int cur = idx; cur > 0; cur = nodes[cur].parent) {
      const Node& nd = nodes[cur];
      if (nd.branch_up)
        lb[nd.branch_var] = 1.0;
      else
        ub[nd.branch_var] = 0.0;
      seed.push_back(nd.branch_var);
    }

    if (!prop.run(lb, ub, seed)) continue;  // infeasible by propagation

    lp.set_var_bounds(lb, ub);
    lp.load_snapshot(nodes[idx].basis ? *nodes[idx].basis : BasisSnapshot{});
    const auto res = lp.solve_lazy();
    ++out.stats.nodes;
    out.stats.lp_pivots += res.pivots;
    if (debug_log && out.stats.nodes % 50 == 0) {
      int depth = 0;
      for (int cur = idx; cur > 0; cur = nodes[cur].parent) ++depth;
      std::cerr << "[bb] node " << out.stats.nodes << " bound " << bound << " lp "
                << (res.status == Status::Optimal ? res.objective : -1) << " depth " << depth
                << " inc " << (have_inc ? best_obj : -1) << " open " << open.size()
                << " rows " << lp.num_active_rows() << " pivots " << res.pivots << "\n";
    }

    if (res.status == Status::Infeasible) continue;
    if (res.status == Status::IterationLimit) { hit_limit = true; break; }
    if (res.status == Status::Unbounded) {
      out.status = Status::Unbounded;
      out.stats.wall_seconds = now_seconds(t0);
      return out;
    }
    if (idx == 0) out.stats.root_lp_objective = res.objective;
    if (have_inc && res.objective >= best_obj - settings.absolute_gap) continue;

    const Eigen::VectorXd& x = lp.full_solution();

    int frac_var = -1;
    double frac_score = -1.0;
    for (int i = 0; i < nv; ++i) {
      if (model.variable(i).kind != VarKind::Binary) continue;
      const double f = x[i] - std::floor(x[i]);
      const double dist = std::min(f, 1.0 - f);
      if (dist <= settings.integrality_tol) continue;
      if (dist > frac_score + 1e-12) {  // strict: ties keep the lowest id
        frac_score = dist;
        frac_var = i;
      }
    }

    if (frac_var < 0) {
      if (res.objective < best_obj - 1e-12) {
        best_obj = res.objective;
        best_x = x;
        have_inc = true;
      }
      continue;
    }

    if (settings.incumbent_hint) {
      if (auto cand = settings.incumbent_hint(model, x)) {
        if (cand->size() == nv &&
            model.max_integrality_violation(*cand) <= settings.integrality_tol &&
            model.max_violation(*cand) <= 10.0 * settings.lp.feas_tol) {
          const double obj = model.objective_value(*cand);
          if (obj < best_obj - 1e-12) {
            best_obj = obj;
            best_x = *cand;
            have_inc = true;
          }
        }
      }
    }

    auto snap = std::make_shared<const BasisSnapshot>(lp.snapshot());
    // child exploring the relaxed side (lb<-1) is pushed last so that it is
    // preferred among equal bounds: the search dives before it diversifies
    Node down;
    down.bound = res.objective;
    down.parent = idx;
    down.branch_var = frac_var;
    down.branch_up = 0;
    down.basis = snap;
    Node up = down;
    up.branch_up = 1;
    down.id = static_cast<std::int64_t>(nodes.size());
    nodes.push_back(down);
    open.push({down.bound, static_cast<int>(nodes.size()) - 1});
    up.id = static_cast<std::int64_t>(nodes.size());
    nodes.push_back(up);
    open.push({up.bound, static_cast<int>(nodes.size()) - 1});
  }

  out.stats.wall_seconds = now_seconds(t0);
  if (open.empty() && !hit_limit) proven_bound = have_inc ? best_obj : kInf;
  out.stats.best_bound = proven_bound;

  if (hit_limit) {
    out.status = Status::IterationLimit;
    if (have_inc) {
      out.values = best_x;
      out.objective = best_obj;
    }
    return out;
  }
  if (!have_inc) {
    out.status = Status::Infeasible;
    return out;
  }
  out.status = Status::Optimal;
  out.values = best_x;
  out.objective = best_obj;
  return out;
}

}  // namespace ccmpc::milp
