// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0
//
// Bounded-variable primal simplex over a lazily activated row subset of a
// model.  Rows enter the working set only when the current point violates
// them, which keeps the factorized basis at the size of the binding set
// rather than the full model (sample-approximation models carry hundreds of
// thousands of rows of which only a few hundred ever bind).

#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "ccmpc/milp.hpp"

namespace ccmpc::milp::detail {

enum class VStat : std::uint8_t { Basic = 0, AtLower = 1, AtUpper = 2, FreeNB = 3 };

/// Basis statuses in model-id space so they survive growth of the active set.
struct BasisSnapshot {
  std::vector<std::pair<int, std::uint8_t>> var_stats;  // model var id -> VStat
  std::vector<std::pair<int, std::uint8_t>> row_stats;  // model row id -> slack VStat
  bool empty() const { return var_stats.empty() && row_stats.empty(); }
};

class ActiveLp {
 public:
  ActiveLp(const Model& model, LpOptions options);

  /// Full-length model variable bounds for the next solve (node bounds).
  void set_var_bounds(const std::vector<double>& lb, const std::vector<double>& ub);

  void load_snapshot(const BasisSnapshot& snap);
  BasisSnapshot snapshot() const;

  struct Result {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::int64_t pivots = 0;
  };

  /// Solve to optimality over all model rows (activating them as needed).
  Result solve_lazy();

  /// Composed model-variable values after a successful solve_lazy().
  const Eigen::VectorXd& full_solution() const { return full_x_; }

  int num_active_rows() const { return static_cast<int>(active_rows_.size()); }

 private:
  struct ColRef {
    int var = -1;  // model variable id, or
    int row = -1;  // active-row position whose slack this is
  };
  struct Eta {
    int pos;
    double pivot;
    std::vector<std::pair<int, double>> w;  // sparse B^{-1} a_q at pivot time
  };

  int activate_col(int var);
  void activate_row(int row);
  void compose_full_solution();
  int scan_and_activate_violated();

  void load_default_basis();
  VStat default_stat(int col) const;
  double resting_value(int col, VStat s) const;

  bool refactorize();  // false if basis was repaired (reset to slack basis)
  void recompute_basic_values();
  void ftran(Eigen::VectorXd& v);
  void btran(Eigen::VectorXd& v);

  Result run_simplex();

  const Model& model_;
  LpOptions opt_;

  std::vector<double> model_lb_, model_ub_;
  std::vector<double> obj_coef_;  // full-length objective coefficients

  std::vector<int> active_rows_;  // model row ids in activation order
  std::vector<int> row_pos_;      // model row id -> position, -1 if inactive

  std::vector<ColRef> cols_;
  std::vector<int> var_col_;        // model var id -> lp col, -1 if inactive
  std::vector<int> row_slack_col_;  // row position -> lp col of its slack
  std::vector<std::vector<std::pair<int, double>>> col_rows_;  // structural col entries
  std::vector<double> col_lb_, col_ub_, col_cost_;
  std::vector<double> row_rhs_;

  std::vector<VStat> stat_;
  std::vector<int> basic_cols_;  // row position -> basic lp col
  std::vector<double> x_;        // per lp col

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  std::vector<Eta> etas_;
  bool factor_valid_ = false;

  Eigen::VectorXd full_x_;
  std::int64_t total_pivots_ = 0;
};

}  // namespace ccmpc::milp::detail
