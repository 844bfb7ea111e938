// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include "ccmpc/milp.hpp"

#include <algorithm>
#include <cmath>

namespace ccmpc::milp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::IterationLimit: return "IterationLimit";
  }
  return "?";
}

void LinExpr::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms_.size();) {
    int var = terms_[i].var;
    double coef = 0.0;
    while (i < terms_.size() && terms_[i].var == var) coef += terms_[i++].coef;
    if (coef != 0.0) terms_[out++] = {var, coef};
  }
  terms_.resize(out);
}

int Model::add_variable(VarKind kind, double lb, double ub, std::string name) {
  if (kind == VarKind::Binary) {
    lb = std::max(lb, 0.0);
    ub = std::min(ub, 1.0);
  }
  if (lb > ub) throw ModelError("variable '" + name + "': lower bound exceeds upper bound");
  if (!name.empty() && !seen_names_.insert(name).second)
    warnings_.push_back("duplicate name: " + name);
  if (kind == VarKind::Binary) ++num_binaries_;
  vars_.push_back({kind, lb, ub, std::move(name)});
  return static_cast<int>(vars_.size()) - 1;
}

int Model::add_constraint(LinExpr expr, Sense sense, double rhs, std::string name) {
  expr.canonicalize();
  for (const LinTerm& t : expr.terms()) {
    if (t.var < 0 || t.var >= num_variables())
      throw ModelError("constraint '" + name + "': unknown variable id " + std::to_string(t.var));
  }
  rhs -= expr.constant();
  expr.add_constant(-expr.constant());
  if (!name.empty() && !seen_names_.insert(name).second)
    warnings_.push_back("duplicate name: " + name);
  cons_.push_back({std::move(expr), sense, rhs, std::move(name)});
  return static_cast<int>(cons_.size()) - 1;
}

void Model::set_objective(LinExpr expr) {
  expr.canonicalize();
  for (const LinTerm& t : expr.terms()) {
    if (t.var < 0 || t.var >= num_variables())
      throw ModelError("objective references unknown variable id " + std::to_string(t.var));
  }
  objective_ = std::move(expr);
}

double Model::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (const Constraint& c : cons_) {
    const double v = c.expr.value(x);
    double viol = 0.0;
    switch (c.sense) {
      case Sense::Le: viol = v - c.rhs; break;
      case Sense::Ge: viol = c.rhs - v; break;
      case Sense::Eq: viol = std::abs(v - c.rhs); break;
    }
    worst = std::max(worst, viol);
  }
  for (int i = 0; i < num_variables(); ++i) {
    worst = std::max(worst, vars_[i].lb - x[i]);
    worst = std::max(worst, x[i] - vars_[i].ub);
  }
  return worst;
}

double Model::max_integrality_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (int i = 0; i < num_variables(); ++i) {
    if (vars_[i].kind != VarKind::Binary) continue;
    worst = std::max(worst, std::abs(x[i] - std::round(x[i])));
  }
  return worst;
}

}  // namespace ccmpc::milp
