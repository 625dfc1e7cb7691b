#include "mip_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace levelrepair {

const char* solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kLimitReached: return "limit_reached";
  }
  return "unknown";
}

VarId MipProblem::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (kind == VarKind::kBinary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (!(lower <= upper)) {
    throw Error(ErrorCode::kInvalidArgument, "variable '" + name + "' has lower > upper");
  }
  VarId id{static_cast<int>(variables_.size())};
  auto [it, inserted] = by_name_.emplace(name, id.index);
  if (!inserted) throw Error(ErrorCode::kInvalidArgument, "duplicate variable name '" + name + "'");
  variables_.push_back({id, std::move(name), kind, lower, upper});
  return id;
}

std::vector<Term> MipProblem::normalize(std::vector<Term> terms) const {
  for (const auto& t : terms) {
    if (t.var.index < 0 || t.var.index >= static_cast<int>(variables_.size())) {
      throw Error(ErrorCode::kUnknownVarId, "variable index " + std::to_string(t.var.index));
    }
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.var.index < b.var.index; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  return merged;
}

int MipProblem::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string label) {
  auto merged = normalize(std::move(terms));
  constraints_.push_back({std::move(merged), sense, rhs, std::move(label)});
  return static_cast<int>(constraints_.size()) - 1;
}

void MipProblem::set_objective(std::vector<Term> terms) { objective_ = normalize(std::move(terms)); }

const Variable& MipProblem::variable(VarId id) const {
  if (id.index < 0 || id.index >= static_cast<int>(variables_.size())) {
    throw Error(ErrorCode::kUnknownVarId, "variable index " + std::to_string(id.index));
  }
  return variables_[static_cast<std::size_t>(id.index)];
}

std::optional<VarId> MipProblem::find_variable(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return VarId{it->second};
}

void MipProblem::set_bounds(VarId id, double lower, double upper) {
  variable(id);  // range check
  auto& v = variables_[static_cast<std::size_t>(id.index)];
  if (v.kind == VarKind::kBinary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (!(lower <= upper)) throw Error(ErrorCode::kInvalidArgument, "lower > upper for '" + v.name + "'");
  v.lower = lower;
  v.upper = upper;
}

double MipProblem::objective_value(std::span<const double> values) const {
  double sum = 0.0;
  for (const auto& t : objective_) sum += t.coef * values[static_cast<std::size_t>(t.var.index)];
  return sum;
}

double MipProblem::activity(const LinearConstraint& row, std::span<const double> values) const {
  double sum = 0.0;
  for (const auto& t : row.terms) sum += t.coef * values[static_cast<std::size_t>(t.var.index)];
  return sum;
}

bool MipProblem::has_integral_objective() const {
  for (const auto& t : objective_) {
    if (!variable(t.var).is_integral()) return false;
    if (t.coef != std::floor(t.coef)) return false;
  }
  return true;
}

namespace {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

// Appends "+ 3 x" style terms, wrapping long lines.
void append_terms(std::string& out, const std::vector<Term>& terms, const MipProblem& problem,
                  std::size_t& line_len) {
  bool first = true;
  for (const auto& t : terms) {
    std::string piece;
    double c = t.coef;
    if (first) {
      if (c < 0) piece += "- ";
    } else {
      piece += c < 0 ? " - " : " + ";
    }
    double mag = std::fabs(c);
    if (mag != 1.0) piece += format_number(mag) + " ";
    piece += problem.variable(t.var).name;
    if (line_len + piece.size() > 200) {
      out += "\n ";
      line_len = 1;
    }
    out += piece;
    line_len += piece.size();
    first = false;
  }
  if (terms.empty()) {
    // LP files need at least one term per row; 0 times the first variable is harmless.
    std::string piece = problem.num_variables() > 0 ? "0 " + problem.variables()[0].name : "0";
    out += piece;
    line_len += piece.size();
  }
}

}  // namespace

std::string export_lp(const MipProblem& problem) {
  std::string out;
  out += "\\ Problem: " + std::to_string(problem.num_variables()) + " variables, " +
         std::to_string(problem.num_constraints()) + " constraints\n";
  out += "Minimize\n obj: ";
  std::size_t len = 6;
  append_terms(out, problem.objective(), problem, len);
  out += "\nSubject To\n";
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    const auto& row = problem.constraints()[i];
    std::string label = row.label.empty() ? "c" + std::to_string(i) : row.label;
    out += " " + label + ": ";
    len = label.size() + 3;
    append_terms(out, row.terms, problem, len);
    switch (row.sense) {
      case Sense::kLessEqual: out += " <= "; break;
      case Sense::kEqual: out += " = "; break;
      case Sense::kGreaterEqual: out += " >= "; break;
    }
    out += format_number(row.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const auto& v : problem.variables()) {
    if (v.kind == VarKind::kBinary) continue;
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      out += " " + v.name + " free\n";
    } else if (v.upper == kInfinity) {
      out += " " + v.name + " >= " + format_number(v.lower) + "\n";
    } else {
      out += " " + format_number(v.lower) + " <= " + v.name + " <= " + format_number(v.upper) + "\n";
    }
  }
  auto list_section = [&](const char* title, VarKind kind) {
    bool any = std::any_of(problem.variables().begin(), problem.variables().end(),
                           [&](const Variable& v) { return v.kind == kind; });
    if (!any) return;
    out += title;
    out += "\n";
    std::size_t line = 0;
    for (const auto& v : problem.variables()) {
      if (v.kind != kind) continue;
      if (line + v.name.size() > 200) {
        out += "\n";
        line = 0;
      }
      out += " " + v.name;
      line += v.name.size() + 1;
    }
    out += "\n";
  };
  list_section("Generals", VarKind::kInteger);
  list_section("Binaries", VarKind::kBinary);
  out += "End\n";
  return out;
}

std::string Violation::describe() const {
  const char* what = kind == Kind::kConstraint ? "constraint" : kind == Kind::kBound ? "bound" : "integrality";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", amount);
  return std::string(what) + " " + label + " violated by " + buf;
}

std::vector<Violation> check_solution(const MipProblem& problem, std::span<const double> values,
                                      double feas_tol, double int_tol) {
  if (values.size() != problem.num_variables()) {
    throw Error(ErrorCode::kDimensionMismatch, "solution has " + std::to_string(values.size()) +
                                                   " values for " + std::to_string(problem.num_variables()) +
                                                   " variables");
  }
  std::vector<Violation> out;
  for (const auto& v : problem.variables()) {
    double x = values[static_cast<std::size_t>(v.id.index)];
    if (std::isnan(x)) {
      out.push_back({Violation::Kind::kBound, v.name, kInfinity});
      continue;
    }
    if (x < v.lower - feas_tol) out.push_back({Violation::Kind::kBound, v.name, v.lower - x});
    if (x > v.upper + feas_tol) out.push_back({Violation::Kind::kBound, v.name, x - v.upper});
    if (v.is_integral()) {
      double frac = std::fabs(x - std::round(x));
      if (frac > int_tol) out.push_back({Violation::Kind::kIntegrality, v.name, frac});
    }
  }
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    const auto& row = problem.constraints()[i];
    double a = problem.activity(row, values);
    double excess = 0.0;
    switch (row.sense) {
      case Sense::kLessEqual: excess = a - row.rhs; break;
      case Sense::kGreaterEqual: excess = row.rhs - a; break;
      case Sense::kEqual: excess = std::fabs(a - row.rhs); break;
    }
    if (excess > feas_tol) {
      std::string label = row.label.empty() ? "c" + std::to_string(i) : row.label;
      out.push_back({Violation::Kind::kConstraint, label, excess});
    }
  }
  return out;
}

}  // namespace levelrepair
