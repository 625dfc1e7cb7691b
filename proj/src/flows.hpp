#pragma once

#include <optional>
#include <string>
#include <vector>

#include "level.hpp"

namespace levelrepair {

struct Move {
  int type = 0;
  int from = 0;
  int to = 0;
  int path_cost = 0;  // tiles travelled
};

struct Deletion {
  int type = 0;
  int cell = 0;
};

struct Addition {
  int type = 0;
  int cell = 0;
};

struct EditReport {
  std::vector<Move> moves;
  std::vector<Deletion> deletions;
  std::vector<Addition> additions;
  long long total_cost = 0;

  bool empty() const { return moves.empty() && deletions.empty() && additions.empty(); }
  // One line per edit plus a closing "total" line. Cells are printed as (row,col).
  std::string to_text(const GameConfig& config, int cols) const;
};

struct EditDistance {
  long long total = 0;
  std::vector<long long> per_type;  // indexed by type id
  EditReport report;
};

// Minimum total cost of per-type moves and deletions turning `a` into `b`.
EditDistance edit_distance(const Level& a, const Level& b, const GameConfig& config);

// Min-cost assignment of every row to a distinct column; cost is rows x cols
// with rows <= cols. Returns the column chosen for each row.
std::vector<int> solve_assignment(const std::vector<std::vector<long long>>& cost);

struct PlayabilityViolation {
  enum class Kind { kSizeMismatch, kCountMismatch, kBorder, kDensity, kUnreachable, kDeadEnd };
  Kind kind = Kind::kCountMismatch;
  int type = -1;
  int cell = -1;
  long long actual = 0;
  long long expected = 0;

  std::string describe(const GameConfig& config, int cols) const;
};

struct Verdict {
  std::vector<PlayabilityViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Counting and breadth-first search only; independent of the MIP.
Verdict validate_playable(const Level& level, const GameConfig& config);

// A* step count between the unique cells of `from_type` and `to_type`.
// Intermediate cells must not be blocking; the endpoints themselves may be.
std::optional<int> min_path_length(const Level& level, int from_type, int to_type, const GameConfig& config);

}  // namespace levelrepair
