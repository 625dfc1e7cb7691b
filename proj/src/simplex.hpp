#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <vector>

#include "basis_factor.hpp"
#include "mip_model.hpp"

namespace levelrepair {

// Bounded-variable simplex over the LP relaxation of a MipProblem.
//
// Rows are handled through logical variables r = A x, so the working matrix
// is [A | -I] with bounds on both structural and logical columns. Cold
// starts use the slack basis; the dual simplex runs whenever the starting
// basis is dual feasible (always the case after bound changes on an
// optimal basis), otherwise the two-phase primal simplex does.
class SimplexEngine {
 public:
  enum class Status { kOptimal, kInfeasible, kUnbounded, kCutoff, kIterationLimit, kTimeLimit, kNumericalFailure };

  enum VarStatus : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kAtZero = 3 };

  struct Options {
    double primal_tol = 1e-7;
    double dual_tol = 1e-7;
    double pivot_tol = 1e-7;
    long long max_iterations = 5'000'000;
    // Dual simplex stops with kCutoff once its (monotone) objective exceeds this.
    double cutoff = kInfinity;
    std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
    // Degenerate pivots in a row before the primal simplex switches to Bland's rule.
    int bland_after = 50;
    int refactor_interval = 80;
    // Relative size of the cost perturbation used against dual degeneracy; 0 disables it.
    double perturbation = 1e-6;
  };

  // Basis snapshot, reusable as a warm start after bound changes.
  struct Basis {
    std::vector<std::uint8_t> status;
    std::vector<double> dse_weight;
  };

  explicit SimplexEngine(const MipProblem& problem);

  int num_rows() const { return m_; }
  int num_cols() const { return n_; }

  void set_col_bounds(int j, double lower, double upper);
  double col_lower(int j) const { return lower_[static_cast<std::size_t>(j)]; }
  double col_upper(int j) const { return upper_[static_cast<std::size_t>(j)]; }

  Status solve(const Options& options);

  double objective() const;
  std::vector<double> column_values() const;
  double column_value(int j) const { return x_[static_cast<std::size_t>(j)]; }

  Basis basis() const;
  void set_basis(const Basis& basis);
  void set_slack_basis();

  long long iterations() const { return iterations_; }

 private:
  // Column access for j in [0, n+m).
  template <typename F>
  void for_column(int j, F&& f) const;

  bool refactor();
  void compute_primal();
  void compute_dual();
  void place_nonbasic(int j);
  bool make_dual_feasible();
  bool is_dual_feasible(double tol) const;
  void restore_costs();
  double current_objective() const;
  void perturb_costs(double scale);
  bool exceeds_cutoff(const Options& opt);

  Status dual_simplex(const Options& opt);
  Status primal_simplex(const Options& opt);
  void pivot(int row, int entering, int leaving_status, std::vector<double>& column);

  int m_;
  int n_;
  int total_;

  // Structural columns (CSC) and rows (CSR).
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<int> row_start_, row_col_;
  std::vector<double> row_val_;

  std::vector<double> cost_, orig_cost_;
  std::vector<double> lower_, upper_;
  bool costs_shifted_ = false;

  std::vector<std::uint8_t> status_;
  std::vector<int> head_;  // basic variable of each row
  std::vector<double> x_;  // values of all variables
  std::vector<double> d_;  // reduced costs
  std::vector<double> dse_weight_;

  BasisFactor factor_;
  bool factor_valid_ = false;
  long long iterations_ = 0;

  struct Candidate {
    int var;
    double ratio;
    double relaxed;
    double abs_alpha;
  };

  // Scratch.
  std::vector<double> work_row_, work_col_, work_tau_, work_flip_, alpha_row_;
  std::vector<int> alpha_idx_;
  std::vector<char> alpha_mark_;
  std::vector<Candidate> candidates_;
  std::vector<int> bcol_start_, bcol_row_;
  std::vector<double> bcol_val_;
};

const char* simplex_status_name(SimplexEngine::Status status);

}  // namespace levelrepair
