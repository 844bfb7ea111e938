// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

namespace ccmpc::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Sense { Le, Ge, Eq };
enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

/// Sparse linear expression: sum of coefficient*variable terms plus a constant.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}

  LinExpr& add(int var, double coef) {
    if (coef != 0.0) terms_.push_back({var, coef});
    return *this;
  }
  LinExpr& add(const LinExpr& other, double scale = 1.0) {
    terms_.reserve(terms_.size() + other.terms_.size());
    for (const LinTerm& t : other.terms_) terms_.push_back({t.var, scale * t.coef});
    constant_ += scale * other.constant_;
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  const std::vector<LinTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }

  /// Merge duplicate variable ids, drop zero coefficients, sort by id.
  void canonicalize();

  double value(const Eigen::VectorXd& x) const {
    double v = constant_;
    for (const LinTerm& t : terms_) v += t.coef * x[t.var];
    return v;
  }

 private:
  std::vector<LinTerm> terms_;
  double constant_ = 0.0;
};

struct Variable {
  VarKind kind = VarKind::Continuous;
  double lb = -kInf;
  double ub = kInf;
  std::string name;
};

struct Constraint {
  LinExpr expr;   // constants folded into rhs by Model::add_constraint
  Sense sense = Sense::Le;
  double rhs = 0.0;
  std::string name;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixed-integer linear model, objective sense fixed to minimize.
class Model {
 public:
  int add_variable(VarKind kind, double lb, double ub, std::string name);
  int add_constraint(LinExpr expr, Sense sense, double rhs, std::string name);
  void set_objective(LinExpr expr);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(cons_.size()); }
  const Variable& variable(int i) const { return vars_[i]; }
  const Constraint& constraint(int i) const { return cons_[i]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const LinExpr& objective() const { return objective_; }

  int num_binaries() const { return num_binaries_; }
  /// Duplicate-name notices collected while building (duplicates are legal).
  const std::vector<std::string>& warnings() const { return warnings_; }

  double objective_value(const Eigen::VectorXd& x) const { return objective_.value(x); }
  /// Largest absolute constraint violation of x over all rows.
  double max_violation(const Eigen::VectorXd& x) const;
  /// Largest distance of any binary coordinate of x from {0, 1}.
  double max_integrality_violation(const Eigen::VectorXd& x) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  LinExpr objective_;
  int num_binaries_ = 0;
  std::unordered_set<std::string> seen_names_;
  std::vector<std::string> warnings_;
};

struct SolveStats {
  std::int64_t nodes = 0;
  std::int64_t lp_pivots = 0;
  double wall_seconds = 0.0;
  double best_bound = -kInf;
  double root_lp_objective = -kInf;
};

struct Solution {
  Status status = Status::Infeasible;
  Eigen::VectorXd values;
  double objective = 0.0;
  SolveStats stats;
};

struct LpOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  std::int64_t max_pivots = 2'000'000;
};

/// Proposes a full integer-feasible assignment from an LP node solution.
/// The solver verifies every proposal against the model before use, so a
/// hint can never make the result wrong, only faster.
using IncumbentHint =
    std::function<std::optional<Eigen::VectorXd>(const Model&, const Eigen::VectorXd&)>;

struct SolveSettings {
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  double time_limit_seconds = kInf;
  double absolute_gap = 1e-6;
  double integrality_tol = 1e-6;
  LpOptions lp;
  IncumbentHint incumbent_hint;
};

/// Solves the LP relaxation (binaries relaxed to [0,1]) with a bounded-variable
/// primal simplex; rows are activated lazily as they become violated.
Solution lp_relaxation(const Model& model, const LpOptions& options = {});

/// Best-first branch and bound on fractional binaries.  Deterministic: the
/// same model yields the same incumbent and node count.
Solution solve(const Model& model, const SolveSettings& settings = {});

/// Writes the model in the industry-standard LP text format
/// (Minimize / Subject To / Bounds / Binary sections).
std::string export_lp_text(const Model& model);

/// Restricts a name to [A-Za-z0-9_], mapping other characters to '_'.
std::string sanitize_name(const std::string& name);

}  // namespace ccmpc::milp
