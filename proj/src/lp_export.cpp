// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <sstream>

#include "ccmpc/milp.hpp"

namespace ccmpc::milp {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::string var_label(const Model& m, int id) {
  const std::string& n = m.variable(id).name;
  if (n.empty()) return "x" + std::to_string(id);
  return sanitize_name(n);
}

void write_expr(std::ostringstream& os, const Model& m, const LinExpr& e) {
  bool first = true;
  for (const LinTerm& t : e.terms()) {
    const double c = t.coef;
    if (first) {
      if (c < 0.0) os << "- ";
      first = false;
    } else {
      os << (c < 0.0 ? " - " : " + ");
    }
    const double a = std::abs(c);
    if (a != 1.0) os << fmt(a) << " ";
    os << var_label(m, t.var);
  }
  if (first) os << "0 " << (m.num_variables() > 0 ? var_label(m, 0) : "x0");
}

}  // namespace

std::string sanitize_name(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '_';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || (out[0] >= '0' && out[0] <= '9')) out.insert(out.begin(), 'v');
  return out;
}

std::string export_lp_text(const Model& m) {
  std::ostringstream os;
  os << "\\ ccmpc model: " << m.num_variables() << " variables ("
     << m.num_binaries() << " binary), " << m.num_constraints() << " constraints\n";
  os << "Minimize\n obj: ";
  write_expr(os, m, m.objective());
  os << "\nSubject To\n";
  for (int i = 0; i < m.num_constraints(); ++i) {
    const Constraint& c = m.constraint(i);
    os << " " << (c.name.empty() ? "c" + std::to_string(i) : sanitize_name(c.name)) << ": ";
    write_expr(os, m, c.expr);
    switch (c.sense) {
      case Sense::Le: os << " <= "; break;
      case Sense::Ge: os << " >= "; break;
      case Sense::Eq: os << " = "; break;
    }
    os << fmt(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int i = 0; i < m.num_variables(); ++i) {
    const Variable& v = m.variable(i);
    if (v.kind == VarKind::Binary && v.lb == 0.0 && v.ub == 1.0) continue;
    const std::string label = var_label(m, i);
    if (v.lb == -kInf && v.ub == kInf) {
      os << " " << label << " free\n";
    } else if (v.lb == v.ub) {
      os << " " << label << " = " << fmt(v.lb) << "\n";
    } else {
      if (v.lb == -kInf)
        os << " -inf <= " << label;
      else
        os << " " << fmt(v.lb) << " <= " << label;
      if (v.ub == kInf)
        os << "\n";
      else
        os << " <= " << fmt(v.ub) << "\n";
    }
  }
  if (m.num_binaries() > 0) {
    os << "Binary\n";
    for (int i = 0; i < m.num_variables(); ++i) {
      if (m.variable(i).kind == VarKind::Binary) os << " " << var_label(m, i) << "\n";
    }
  }
  os << "End\n";
  return os.str();
}

}  // namespace ccmpc::milp
