#pragma once

#include <string>
#include <vector>

#include "flows.hpp"
#include "level.hpp"
#include "mip_model.hpp"
#include "mip_solver.hpp"

namespace levelrepair {

// Repair MIP for one input level plus the index of every variable family.
// Family vectors are indexed as [type * |V| + node] or [type * |E| + edge].
struct RepairMip {
  MipProblem problem;
  SpaceGraph graph{1, 1, false};
  int num_types = 0;
  std::vector<int> input;  // input type per cell (the c_v constants)

  std::vector<VarId> object;  // o_v
  bool has_reachability = false;
  std::vector<VarId> reach_edge;    // f(u,v), per edge
  std::vector<VarId> reach_source;  // f^s_v
  std::vector<VarId> reach_target;  // f^t_v
  std::vector<VarId> edit_edge;     // f_o(u,v)
  std::vector<VarId> edit_target;   // f^t_{o,v}
  std::vector<VarId> edit_waste;    // r^t_{o,v}

  int num_nodes() const { return graph.node_count(); }
  int num_edges() const { return static_cast<int>(graph.edges().size()); }
  VarId object_var(int type, int node) const { return object[static_cast<std::size_t>(type * num_nodes() + node)]; }
};

// Builds the MIP. No-dead-end rows are added when the config asks for them.
RepairMip compile_repair_mip(const Level& input, const GameConfig& config);

// Every non-blocking cell gets at least two non-blocking neighbours.
void add_no_dead_end_constraints(RepairMip& mip, const GameConfig& config);

// Full MIP assignment that realises `output`: reachability flows along BFS
// trees, edit flows along shortest paths of the oracle matching. Feasible
// iff `output` is playable.
std::vector<double> assignment_for(const RepairMip& mip, const Level& output, const GameConfig& config);

struct Decoded {
  Level level;
  EditReport report;
};

Decoded decode(const RepairMip& mip, const MipSolution& solution, const GameConfig& config);

// Deterministic playable level: border, counted objects in the first interior
// cells in row-major order, filler elsewhere. Dimensions default to the config's.
Level canonical_playable(const GameConfig& config, int rows = 0, int cols = 0);

enum class SolverBackend { kEmbedded, kExternal };

struct RepairOptions {
  SolverOptions solver;
  SolverBackend backend = SolverBackend::kEmbedded;
  std::string external_command;  // empty: $LEVEL_REPAIR_SOLVER
  bool warm_start = true;
};

struct RepairResult {
  Level level;
  EditReport report;
  SolveStatus status = SolveStatus::kOptimal;
  double objective = 0.0;
  double best_bound = 0.0;
  long long nodes = 0;
  long long lp_iterations = 0;
  std::size_t num_variables = 0;
  std::size_t num_constraints = 0;
  double seconds = 0.0;
};

RepairResult repair(const Level& input, const GameConfig& config, const RepairOptions& options = {});

}  // namespace levelrepair
