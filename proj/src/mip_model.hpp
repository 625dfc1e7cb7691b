#pragma once

#include <compare>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace levelrepair {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VarId {
  int index = -1;
  auto operator<=>(const VarId&) const = default;
};

enum class VarKind { kBinary, kInteger, kContinuous };

struct Variable {
  VarId id;
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;

  bool is_integral() const { return kind != VarKind::kContinuous; }
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  double coef = 0.0;
  VarId var;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::kEqual;
  double rhs = 0.0;
  std::string label;
};

// Minimisation problem with linear rows and bounded variables.
class MipProblem {
 public:
  VarId add_variable(std::string name, VarKind kind, double lower = 0.0, double upper = kInfinity);
  VarId add_binary(std::string name) { return add_variable(std::move(name), VarKind::kBinary, 0.0, 1.0); }

  // Duplicate variables in `terms` are merged and zero coefficients dropped.
  int add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string label);
  void set_objective(std::vector<Term> terms);

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  const Variable& variable(VarId id) const;
  std::optional<VarId> find_variable(std::string_view name) const;

  // Changes the bounds of an existing variable; binaries stay within [0, 1].
  void set_bounds(VarId id, double lower, double upper);

  double objective_value(std::span<const double> values) const;
  double activity(const LinearConstraint& row, std::span<const double> values) const;

  // True when every objective coefficient is integral and sits on an
  // integer or binary variable, so objective values of integer points are
  // integers.
  bool has_integral_objective() const;

 private:
  std::vector<Term> normalize(std::vector<Term> terms) const;

  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<Term> objective_;
  std::unordered_map<std::string, int> by_name_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kLimitReached };

const char* solve_status_name(SolveStatus status);

struct MipSolution {
  std::vector<double> values;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  // Proven lower bound on the optimum; equals objective_value when optimal.
  double best_bound = -kInfinity;
  long long nodes = 0;
  long long lp_iterations = 0;

  bool has_solution() const { return !values.empty(); }
};

// CPLEX LP text format. Output is deterministic for a given problem.
std::string export_lp(const MipProblem& problem);

struct Violation {
  enum class Kind { kConstraint, kBound, kIntegrality };
  Kind kind = Kind::kConstraint;
  std::string label;
  double amount = 0.0;

  std::string describe() const;
};

std::vector<Violation> check_solution(const MipProblem& problem, std::span<const double> values,
                                      double feas_tol, double int_tol);

}  // namespace levelrepair
