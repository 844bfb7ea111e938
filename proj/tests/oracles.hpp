// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations, independent of the library's solve
// paths: a vertex-enumeration LP oracle and a full binary-enumeration MILP
// oracle for small models.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ccmpc/milp.hpp"

namespace ccmpc::test {

inline constexpr double kOracleInf = std::numeric_limits<double>::infinity();

/// Minimizes the model objective over the continuous relaxation of `model`
/// with the given variable bounds by enumerating candidate vertices: every
/// choice of active rows plus variables pinned at bounds.  All variables must
/// have finite bounds.  Returns nullopt when infeasible.
inline std::optional<double> lp_vertex_oracle(const milp::Model& model,
                                              const std::vector<double>& lb,
                                              const std::vector<double>& ub,
                                              Eigen::VectorXd* arg_best = nullptr) {
  const int n = model.num_variables();
  const int m = model.num_constraints();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    for (const auto& t : model.constraint(r).expr.terms()) A(r, t.var) = t.coef;
    rhs[r] = model.constraint(r).rhs;
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (const auto& t : model.objective().terms()) c[t.var] = t.coef;

  const double tol = 1e-7;
  auto feasible = [&](const Eigen::VectorXd& x) {
    for (int i = 0; i < n; ++i)
      if (x[i] < lb[i] - tol || x[i] > ub[i] + tol) return false;
    for (int r = 0; r < m; ++r) {
      const double v = A.row(r).dot(x);
      switch (model.constraint(r).sense) {
        case milp::Sense::Le: if (v > rhs[r] + tol) return false; break;
        case milp::Sense::Ge: if (v < rhs[r] - tol) return false; break;
        case milp::Sense::Eq: if (std::abs(v - rhs[r]) > tol) return false; break;
      }
    }
    return true;
  };

  double best = kOracleInf;
  Eigen::VectorXd best_x;

  // variables with lb == ub are constants, not enumeration candidates
  std::vector<int> cand;
  for (int v = 0; v < n; ++v)
    if (lb[v] < ub[v]) cand.push_back(v);
  const int ncand = static_cast<int>(cand.size());

  // choose k active rows and pin the remaining candidate vars at a bound
  for (int k = 0; k <= std::min(ncand, m); ++k) {
    std::vector<int> rows(k);
    std::function<void(int, int)> pick_rows = [&](int start, int depth) {
      if (depth == k) {
        const int nfixed = ncand - k;
        std::vector<int> fixed(nfixed);
        std::function<void(int, int)> pick_vars = [&](int vstart, int vdepth) {
          if (vdepth == nfixed) {
            std::vector<int> free_vars;
            {
              std::vector<char> isfixed(n, 0);
              for (int v : fixed) isfixed[v] = 1;
              for (int v : cand)
                if (!isfixed[v]) free_vars.push_back(v);
            }
            for (long mask = 0; mask < (1L << nfixed); ++mask) {
              Eigen::VectorXd x(n);
              for (int v = 0; v < n; ++v)
                if (lb[v] == ub[v]) x[v] = lb[v];
              for (int i = 0; i < nfixed; ++i)
                x[fixed[i]] = (mask >> i) & 1 ? ub[fixed[i]] : lb[fixed[i]];
              if (k > 0) {
                Eigen::MatrixXd S(k, k);
                Eigen::VectorXd b(k);
                for (int i = 0; i < k; ++i) {
                  b[i] = rhs[rows[i]];
                  for (int j = 0; j < k; ++j) S(i, j) = A(rows[i], free_vars[j]);
                  for (int v = 0; v < n; ++v) {
                    bool is_free = false;
                    for (int fv : free_vars)
                      if (fv == v) { is_free = true; break; }
                    if (!is_free) b[i] -= A(rows[i], v) * x[v];
                  }
                }
                Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
                if (!lu.isInvertible()) continue;
                const Eigen::VectorXd xf = lu.solve(b);
                for (int j = 0; j < k; ++j) x[free_vars[j]] = xf[j];
              }
              if (!feasible(x)) continue;
              const double obj = c.dot(x) + model.objective().constant();
              if (obj < best - 1e-12) {
                best = obj;
                best_x = x;
              }
            }
            return;
          }
          for (int v = vstart; v < ncand; ++v) {
            fixed[vdepth] = cand[v];
            pick_vars(v + 1, vdepth + 1);
          }
        };
        pick_vars(0, 0);
        return;
      }
      for (int r = start; r < m; ++r) {
        rows[depth] = r;
        pick_rows(r + 1, depth + 1);
      }
    };
    pick_rows(0, 0);
  }
  if (best == kOracleInf) return std::nullopt;
  if (arg_best) *arg_best = best_x;
  return best;
}

/// Brute-force MILP oracle: enumerate all binary assignments, solve the
/// remaining continuous LP with the vertex oracle, take the best.
inline std::optional<double> milp_enumeration_oracle(const milp::Model& model) {
  const int n = model.num_variables();
  std::vector<int> binaries;
  for (int i = 0; i < n; ++i)
    if (model.variable(i).kind == milp::VarKind::Binary) binaries.push_back(i);
  std::vector<double> lb(n), ub(n);
  for (int i = 0; i < n; ++i) {
    lb[i] = model.variable(i).lb;
    ub[i] = model.variable(i).ub;
  }
  double best = kOracleInf;
  const int nb = static_cast<int>(binaries.size());
  for (long mask = 0; mask < (1L << nb); ++mask) {
    for (int i = 0; i < nb; ++i) {
      const double v = (mask >> i) & 1 ? 1.0 : 0.0;
      if (v < model.variable(binaries[i]).lb || v > model.variable(binaries[i]).ub) {
        goto next_mask;  // assignment outside (possibly tightened) bounds
      }
      lb[binaries[i]] = v;
      ub[binaries[i]] = v;
    }
    if (auto obj = lp_vertex_oracle(model, lb, ub)) best = std::min(best, *obj);
  next_mask:;
  }
  if (best == kOracleInf) return std::nullopt;
  return best;
}

}  // namespace ccmpc::test
