#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mip_model.hpp"

namespace levelrepair {

struct SolverOptions {
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  long long node_limit = 10'000'000;
  double time_limit_seconds = 300.0;
  bool use_integral_objective_pruning = true;
  // Optional rounding heuristic: maps a node's LP values to a candidate full
  // assignment (or an empty vector). Candidates are checked before use.
  std::function<std::vector<double>(std::span<const double>)> primal_heuristic;
};

// Solves the LP relaxation (integrality dropped).
MipSolution solve_lp(const MipProblem& problem, const SolverOptions& options = {});

// Branch-and-bound. `warm_incumbent`, when non-empty, is a full assignment
// that is used as the starting incumbent if it passes check_solution.
MipSolution solve_mip(const MipProblem& problem, const SolverOptions& options = {},
                      std::span<const double> warm_incumbent = {});

// Writes the problem as an LP file, runs `command_template` through the
// shell with {lp} and {sol} replaced by file paths, and reads back
// "name value" lines. An empty template falls back to $LEVEL_REPAIR_SOLVER.
MipSolution solve_external(const MipProblem& problem, const std::string& command_template,
                           const SolverOptions& options = {});

// Parses the external solution format. Variables not mentioned are zero.
MipSolution parse_solution_text(const MipProblem& problem, const std::string& text, const SolverOptions& options = {});

}  // namespace levelrepair
