// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace ccmpc::milp::detail {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kRatioTie = 1e-9;
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateLimit = 120;
}  // namespace

ActiveLp::ActiveLp(const Model& model, LpOptions options)
    : model_(model), opt_(options) {
  const int nv = model_.num_variables();
  model_lb_.resize(nv);
  model_ub_.resize(nv);
  obj_coef_.assign(nv, 0.0);
  for (int i = 0; i < nv; ++i) {
    model_lb_[i] = model_.variable(i).lb;
    model_ub_[i] = model_.variable(i).ub;
  }
  for (const LinTerm& t : model_.objective().terms()) obj_coef_[t.var] = t.coef;
  var_col_.assign(nv, -1);
  row_pos_.assign(model_.num_constraints(), -1);
  for (const LinTerm& t : model_.objective().terms()) activate_col(t.var);
  load_default_basis();
}

void ActiveLp::set_var_bounds(const std::vector<double>& lb, const std::vector<double>& ub) {
  model_lb_ = lb;
  model_ub_ = ub;
  for (int c = 0; c < static_cast<int>(cols_.size()); ++c) {
    if (cols_[c].var >= 0) {
      col_lb_[c] = model_lb_[cols_[c].var];
      col_ub_[c] = model_ub_[cols_[c].var];
    }
  }
}

int ActiveLp::activate_col(int var) {
  if (var_col_[var] >= 0) return var_col_[var];
  const int c = static_cast<int>(cols_.size());
  cols_.push_back({var, -1});
  col_rows_.emplace_back();
  col_lb_.push_back(model_lb_[var]);
  col_ub_.push_back(model_ub_[var]);
  col_cost_.push_back(obj_coef_[var]);
  stat_.push_back(VStat::AtLower);
  x_.push_back(0.0);
  var_col_[var] = c;
  stat_[c] = default_stat(c);
  x_[c] = resting_value(c, stat_[c]);
  return c;
}

void ActiveLp::activate_row(int row) {
  assert(row_pos_[row] < 0);
  const int pos = static_cast<int>(active_rows_.size());
  active_rows_.push_back(row);
  row_pos_[row] = pos;

  const Constraint& con = model_.constraint(row);
  for (const LinTerm& t : con.expr.terms()) {
    const int c = activate_col(t.var);
    col_rows_[c].push_back({pos, t.coef});
  }
  row_rhs_.push_back(con.rhs);

  // the row reads a.x + s = rhs
  const int sc = static_cast<int>(cols_.size());
  cols_.push_back({-1, pos});
  col_rows_.emplace_back();
  double slo = 0.0, shi = 0.0;
  switch (con.sense) {
    case Sense::Le: slo = 0.0; shi = kInf; break;
    case Sense::Ge: slo = -kInf; shi = 0.0; break;
    case Sense::Eq: slo = 0.0; shi = 0.0; break;
  }
  col_lb_.push_back(slo);
  col_ub_.push_back(shi);
  col_cost_.push_back(0.0);
  stat_.push_back(VStat::Basic);
  x_.push_back(0.0);
  row_slack_col_.push_back(sc);
  basic_cols_.push_back(sc);
  factor_valid_ = false;
}

VStat ActiveLp::default_stat(int col) const {
  const double lo = col_lb_[col], hi = col_ub_[col];
  if (lo == -kInf && hi == kInf) return VStat::FreeNB;
  if (lo == -kInf) return VStat::AtUpper;
  if (hi == kInf) return VStat::AtLower;
  return col_cost_[col] >= 0.0 ? VStat::AtLower : VStat::AtUpper;
}

double ActiveLp::resting_value(int col, VStat s) const {
  switch (s) {
    case VStat::AtLower: return col_lb_[col];
    case VStat::AtUpper: return col_ub_[col];
    case VStat::FreeNB: return 0.0;
    case VStat::Basic: return 0.0;
  }
  return 0.0;
}

void ActiveLp::load_default_basis() {
  basic_cols_.clear();
  basic_cols_.reserve(active_rows_.size());
  for (int c = 0; c < static_cast<int>(cols_.size()); ++c) {
    if (cols_[c].row >= 0) {
      stat_[c] = VStat::Basic;
      basic_cols_.push_back(c);
    } else {
      stat_[c] = default_stat(c);
      x_[c] = resting_value(c, stat_[c]);
    }
  }
  factor_valid_ = false;
}

void ActiveLp::load_snapshot(const BasisSnapshot& snap) {
  load_default_basis();
  if (snap.empty()) return;
  for (const auto& [var, s] : snap.var_stats) {
    const int c = var_col_[var];
    if (c < 0) continue;
    stat_[c] = static_cast<VStat>(s);
    if (stat_[c] != VStat::Basic) x_[c] = resting_value(c, stat_[c]);
  }
  for (const auto& [row, s] : snap.row_stats) {
    const int pos = row_pos_[row];
    if (pos < 0) continue;
    const int c = row_slack_col_[pos];
    stat_[c] = static_cast<VStat>(s);
    if (stat_[c] != VStat::Basic) x_[c] = resting_value(c, stat_[c]);
  }
  basic_cols_.clear();
  for (int c = 0; c < static_cast<int>(cols_.size()); ++c)
    if (stat_[c] == VStat::Basic) basic_cols_.push_back(c);
  if (basic_cols_.size() != active_rows_.size()) load_default_basis();
  factor_valid_ = false;
}

BasisSnapshot ActiveLp::snapshot() const {
  BasisSnapshot snap;
  for (int c = 0; c < static_cast<int>(cols_.size()); ++c) {
    if (cols_[c].var >= 0) {
      if (stat_[c] != default_stat(c))
        snap.var_stats.push_back({cols_[c].var, static_cast<std::uint8_t>(stat_[c])});
    } else if (stat_[c] != VStat::Basic) {
      snap.row_stats.push_back({active_rows_[cols_[c].row], static_cast<std::uint8_t>(stat_[c])});
    }
  }
  return snap;
}

bool ActiveLp::refactorize() {
  const int m = static_cast<int>(active_rows_.size());
  etas_.clear();
  if (m == 0) {
    factor_valid_ = true;
    return true;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 4);
  for (int i = 0; i < m; ++i) {
    const int c = basic_cols_[i];
    if (cols_[c].row >= 0) {
      trip.emplace_back(cols_[c].row, i, 1.0);
    } else {
      for (const auto& [r, a] : col_rows_[c]) trip.emplace_back(r, i, a);
    }
  }
  Eigen::SparseMatrix<double> B(m, m);
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  lu_.compute(B);
  if (lu_.info() != Eigen::Success) {
    // singular basis (e.g. from a stale warm start): fall back to slack basis
    for (int c = 0; c < static_cast<int>(cols_.size()); ++c) {
      if (cols_[c].var >= 0 && stat_[c] == VStat::Basic) {
        stat_[c] = default_stat(c);
        if (stat_[c] == VStat::Basic) stat_[c] = VStat::FreeNB;
        x_[c] = resting_value(c, stat_[c]);
      }
    }
    basic_cols_.clear();
    for (int i = 0; i < m; ++i) {
      const int sc = row_slack_col_[i];
      stat_[sc] = VStat::Basic;
      basic_cols_.push_back(sc);
    }
    trip.clear();
    for (int i = 0; i < m; ++i) trip.emplace_back(i, i, 1.0);
    Eigen::SparseMatrix<double> I(m, m);
    I.setFromTriplets(trip.begin(), trip.end());
    lu_.compute(I);
    factor_valid_ = true;
    return false;
  }
  factor_valid_ = true;
  return true;
}

void ActiveLp::ftran(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    const double vp = v[e.pos] / e.pivot;
    if (vp != 0.0) {
      for (const auto& [i, wi] : e.w)
        if (i != e.pos) v[i] -= wi * vp;
    }
    v[e.pos] = vp;
  }
}

void ActiveLp::btran(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = v[it->pos];
    for (const auto& [i, wi] : it->w)
      if (i != it->pos) acc -= wi * v[i];
    v[it->pos] = acc / it->pivot;
  }
  v = lu_.transpose().solve(v);
}

void ActiveLp::recompute_basic_values() {
  const int m = static_cast<int>(active_rows_.size());
  if (m == 0) return;
  Eigen::VectorXd r(m);
  for (int i = 0; i < m; ++i) r[i] = row_rhs_[i];
  for (int c = 0; c < static_cast<int>(cols_.size()); ++c) {
    if (stat_[c] == VStat::Basic) continue;
    const double xv = resting_value(c, stat_[c]);
    x_[c] = xv;
    if (xv == 0.0) continue;
    if (cols_[c].row >= 0) {
      r[cols_[c].row] -= xv;
    } else {
      for (const auto& [i, a] : col_rows_[c]) r[i] -= a * xv;
    }
  }
  ftran(r);
  for (int i = 0; i < m; ++i) x_[basic_cols_[i]] = r[i];
}

ActiveLp::Result ActiveLp::run_simplex() {
  Result res;
  const double ftol = opt_.feas_tol;
  const double dtol = opt_.opt_tol;
  const int m = static_cast<int>(active_rows_.size());
  const int n = static_cast<int>(cols_.size());

  if (!factor_valid_) {
    refactorize();
    recompute_basic_values();
  }

  bool bland = false;
  int degenerate_run = 0;
  int confirmations = 0;
  Eigen::VectorXd cb(m), y(m), w(m);

  for (std::int64_t iter = 0;; ++iter) {
    if (iter >= opt_.max_pivots) {
      res.status = Status::IterationLimit;
      res.pivots = iter;
      return res;
    }

    // Any basic value outside its bounds puts us in phase 1 (minimize total
    // violation); otherwise phase 2 prices the true cost vector.
    double max_infeas = 0.0;
    for (int i = 0; i < m; ++i) {
      const int c = basic_cols_[i];
      max_infeas = std::max(max_infeas, col_lb_[c] - x_[c]);
      max_infeas = std::max(max_infeas, x_[c] - col_ub_[c]);
    }
    const bool phase1 = max_infeas > ftol;

    for (int i = 0; i < m; ++i) {
      const int c = basic_cols_[i];
      if (phase1) {
        cb[i] = x_[c] < col_lb_[c] - ftol ? -1.0 : (x_[c] > col_ub_[c] + ftol ? 1.0 : 0.0);
      } else {
        cb[i] = col_cost_[c];
      }
    }
    y = cb;
    btran(y);

    int enter = -1;
    int enter_dir = 0;
    double best_score = 0.0;
    for (int c = 0; c < n; ++c) {
      if (stat_[c] == VStat::Basic) continue;
      if (col_lb_[c] == col_ub_[c]) continue;
      double d = phase1 ? 0.0 : col_cost_[c];
      if (cols_[c].row >= 0) {
        d -= y[cols_[c].row];
      } else {
        for (const auto& [i, a] : col_rows_[c]) d -= a * y[i];
      }
      int dir = 0;
      if (stat_[c] == VStat::AtLower && d < -dtol) dir = +1;
      else if (stat_[c] == VStat::AtUpper && d > dtol) dir = -1;
      else if (stat_[c] == VStat::FreeNB && std::abs(d) > dtol) dir = d > 0.0 ? -1 : +1;
      if (dir == 0) continue;
      if (bland) {
        enter = c;
        enter_dir = dir;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        enter = c;
        enter_dir = dir;
      }
    }

    if (enter < 0) {
      // Re-check on a fresh factorization before declaring the outcome.
      if (!etas_.empty() && confirmations < 2) {
        ++confirmations;
        refactorize();
        recompute_basic_values();
        continue;
      }
      res.pivots = iter;
      if (phase1) {
        res.status = Status::Infeasible;
      } else {
        res.status = Status::Optimal;
        double obj = model_.objective().constant();
        for (int c = 0; c < n; ++c) obj += col_cost_[c] * x_[c];
        res.objective = obj;
      }
      return res;
    }

    w.setZero(m);
    if (cols_[enter].row >= 0) {
      w[cols_[enter].row] = 1.0;
    } else {
      for (const auto& [i, a] : col_rows_[enter]) w[i] = a;
    }
    ftran(w);

    const double sigma = static_cast<double>(enter_dir);
    const double span = col_ub_[enter] - col_lb_[enter];
    const double theta_flip = std::isfinite(span) ? span : kInf;

    double theta_row = kInf;
    int leave_pos = -1;
    int leave_to_upper = 0;
    double best_piv = 0.0;
    for (int i = 0; i < m; ++i) {
      const double wi = w[i];
      if (std::abs(wi) < kPivotTol) continue;
      const int c = basic_cols_[i];
      const double delta = -sigma * wi;  // change of x_[c] per unit theta
      const double xv = x_[c];
      double t = kInf;
      int to_upper = 0;
      if (phase1 && xv < col_lb_[c] - ftol) {
        if (delta > 0) { t = (col_lb_[c] - xv) / delta; to_upper = 0; }
      } else if (phase1 && xv > col_ub_[c] + ftol) {
        if (delta < 0) { t = (col_ub_[c] - xv) / delta; to_upper = 1; }
      } else {
        if (delta > 0 && col_ub_[c] != kInf) { t = (col_ub_[c] - xv) / delta; to_upper = 1; }
        else if (delta < 0 && col_lb_[c] != -kInf) { t = (col_lb_[c] - xv) / delta; to_upper = 0; }
      }
      if (t == kInf) continue;
      if (t < 0.0) t = 0.0;
      bool take = false;
      if (t < theta_row - kRatioTie) {
        take = true;
      } else if (t < theta_row + kRatioTie && leave_pos >= 0) {
        take = bland ? basic_cols_[i] < basic_cols_[leave_pos] : std::abs(wi) > best_piv;
      }
      if (take) {
        theta_row = std::min(theta_row, t);
        leave_pos = i;
        leave_to_upper = to_upper;
        best_piv = std::abs(wi);
      }
    }

    if (theta_row == kInf && theta_flip == kInf) {
      if (phase1) {
        // a kink always exists in exact arithmetic; retry once from scratch
        if (confirmations < 2) {
          ++confirmations;
          refactorize();
          recompute_basic_values();
          continue;
        }
        res.status = Status::Infeasible;
      } else {
        res.status = Status::Unbounded;
      }
      res.pivots = iter;
      return res;
    }

    const bool flip = theta_flip <= theta_row;
    const double theta = flip ? theta_flip : theta_row;

    if (theta <= 1e-11) {
      if (++degenerate_run > kDegenerateLimit) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    confirmations = 0;

    double enter_from = x_[enter];
    if (stat_[enter] == VStat::AtLower) enter_from = col_lb_[enter];
    else if (stat_[enter] == VStat::AtUpper) enter_from = col_ub_[enter];
    x_[enter] = enter_from + sigma * theta;
    if (theta > 0.0) {
      for (int i = 0; i < m; ++i)
        if (w[i] != 0.0) x_[basic_cols_[i]] -= sigma * theta * w[i];
    }

    if (flip) {
      stat_[enter] = enter_dir > 0 ? VStat::AtUpper : VStat::AtLower;
      x_[enter] = resting_value(enter, stat_[enter]);
      continue;
    }

    const int leave_col = basic_cols_[leave_pos];
    stat_[leave_col] = leave_to_upper ? VStat::AtUpper : VStat::AtLower;
    x_[leave_col] = resting_value(leave_col, stat_[leave_col]);
    stat_[enter] = VStat::Basic;
    basic_cols_[leave_pos] = enter;

    Eta eta;
    eta.pos = leave_pos;
    eta.pivot = w[leave_pos];
    for (int i = 0; i < m; ++i)
      if (w[i] != 0.0) eta.w.push_back({i, w[i]});
    etas_.push_back(std::move(eta));

    if (static_cast<int>(etas_.size()) >= kRefactorEvery) {
      refactorize();
      recompute_basic_values();
    }
  }
}

void ActiveLp::compose_full_solution() {
  const int nv = model_.num_variables();
  full_x_.resize(nv);
  for (int v = 0; v < nv; ++v) {
    const int c = var_col_[v];
    if (c >= 0) {
      full_x_[v] = x_[c];
    } else if (model_lb_[v] != -kInf) {
      full_x_[v] = model_lb_[v];
    } else if (model_ub_[v] != kInf) {
      full_x_[v] = model_ub_[v];
    } else {
      full_x_[v] = 0.0;
    }
  }

  // Inactive binaries are free to complete the point: walk the inactive rows
  // once and flip undecided binaries (each owned by the first row that needs
  // it) toward feasibility.  Indicator-style rows thus satisfy themselves
  // instead of being activated, keeping the working set at the binding core.
  std::vector<char> decided(nv, 0);
  const int nr = model_.num_constraints();
  for (int r = 0; r < nr; ++r) {
    if (row_pos_[r] >= 0) continue;
    const Constraint& con = model_.constraint(r);
    double v = con.expr.value(full_x_);
    auto violation = [&](double val) {
      switch (con.sense) {
        case Sense::Le: return val - con.rhs;
        case Sense::Ge: return con.rhs - val;
        case Sense::Eq: return std::abs(val - con.rhs);
      }
      return 0.0;
    };
    if (violation(v) <= opt_.feas_tol) continue;
    for (const LinTerm& term : con.expr.terms()) {
      if (violation(v) <= opt_.feas_tol) break;
      const int var = term.var;
      if (var_col_[var] >= 0 || decided[var]) continue;
      if (model_.variable(var).kind != VarKind::Binary) continue;
      if (model_lb_[var] >= model_ub_[var]) continue;
      const double other = full_x_[var] == model_lb_[var] ? model_ub_[var] : model_lb_[var];
      const double v_alt = v + term.coef * (other - full_x_[var]);
      if (violation(v_alt) < violation(v) - 1e-12) {
        full_x_[var] = other;
        decided[var] = 1;
        v = v_alt;
      }
    }
  }
}

int ActiveLp::scan_and_activate_violated() {
  compose_full_solution();
  const int nr = model_.num_constraints();
  std::vector<std::pair<double, int>> violated;
  for (int r = 0; r < nr; ++r) {
    if (row_pos_[r] >= 0) continue;
    const Constraint& con = model_.constraint(r);
    const double v = con.expr.value(full_x_);
    double viol = 0.0;
    switch (con.sense) {
      case Sense::Le: viol = v - con.rhs; break;
      case Sense::Ge: viol = con.rhs - v; break;
      case Sense::Eq: viol = std::abs(v - con.rhs); break;
    }
    if (viol > opt_.feas_tol) violated.push_back({viol, r});
  }
  // Activate the worst offenders first, capped per round, so that transient
  // violations of a poor interim point do not drag thousands of never-binding
  // rows into the working set.
  const std::size_t cap =
      std::max<std::size_t>(2048, 2 * active_rows_.size());
  if (violated.size() > cap) {
    std::nth_element(violated.begin(), violated.begin() + cap, violated.end(),
                     [](const auto& a, const auto& b) {
                       if (a.first != b.first) return a.first > b.first;
                       return a.second < b.second;
                     });
    violated.resize(cap);
  }
  std::sort(violated.begin(), violated.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& [viol, r] : violated) activate_row(r);
  return static_cast<int>(violated.size());
}

ActiveLp::Result ActiveLp::solve_lazy() {
  const std::int64_t pivots_at_entry = total_pivots_;
  Result last;
  bool activated_everything = false;
  for (;;) {
    last = run_simplex();
    total_pivots_ += last.pivots;
    last.pivots = total_pivots_ - pivots_at_entry;
    if (last.status == Status::Infeasible || last.status == Status::IterationLimit) {
      compose_full_solution();
      return last;
    }
    if (last.status == Status::Unbounded) {
      if (activated_everything) {
        compose_full_solution();
        return last;
      }
      for (int r = 0; r < model_.num_constraints(); ++r)
        if (row_pos_[r] < 0) activate_row(r);
      activated_everything = true;
      continue;
    }
    if (scan_and_activate_violated() == 0) return last;
  }
}

}  // namespace ccmpc::milp::detail
