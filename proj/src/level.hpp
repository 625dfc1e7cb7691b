#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace levelrepair {

struct ObjectType {
  int id = 0;
  std::string name;
  char glyph = '?';
};

// Exact rational, used for density limits so that MIP rows and the
// validator compare the same integers.
struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct CountConstraint {
  int type = 0;
  int count = 0;
};

// Objects of `types` may occupy at most `max_fraction` of the available
// space, where available space is every cell not holding a solid type.
struct DensityConstraint {
  std::vector<int> types;
  Fraction max_fraction;
};

struct GameConfig {
  std::string name;
  std::vector<ObjectType> alphabet;
  std::vector<int> source_set;
  std::vector<int> target_set;
  std::vector<int> blocking_set;
  std::vector<int> solid_set;
  int delete_cost = 10;
  int move_cost = 1;
  bool wraparound = false;
  std::vector<CountConstraint> count_constraints;
  std::vector<DensityConstraint> density_constraints;
  std::optional<int> border_object;
  bool no_dead_ends = false;
  std::optional<int> filler;
  // Optional key/door style endpoints for path-length statistics.
  std::optional<int> path_from;
  std::optional<int> path_to;
  // Expected level dimensions; 0 means any.
  int rows = 0;
  int cols = 0;

  int num_types() const { return static_cast<int>(alphabet.size()); }
  bool is_source(int type) const;
  bool is_target(int type) const;
  bool is_blocking(int type) const;
  bool is_solid(int type) const;
  std::optional<int> type_by_glyph(char glyph) const;
  std::optional<int> type_by_name(std::string_view name) const;
  const std::string& type_name(int type) const { return alphabet.at(type).name; }

  // Throws Error(kConfigError) when an invariant is broken.
  void validate() const;
};

GameConfig parse_config(std::string_view text);
GameConfig load_config(const std::string& path);

class Level {
 public:
  Level() = default;
  Level(int rows, int cols, int fill);
  Level(int rows, int cols, std::vector<int> cells);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }

  int at(int row, int col) const { return cells_[static_cast<std::size_t>(row * cols_ + col)]; }
  int operator[](int cell) const { return cells_[static_cast<std::size_t>(cell)]; }
  void set(int cell, int type) { cells_[static_cast<std::size_t>(cell)] = type; }
  void set(int row, int col, int type) { set(row * cols_ + col, type); }

  int row_of(int cell) const { return cell / cols_; }
  int col_of(int cell) const { return cell % cols_; }
  bool on_perimeter(int cell) const;

  int count(int type) const;
  std::span<const int> cells() const { return cells_; }

  bool operator==(const Level&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> cells_;
};

Level parse_level(std::string_view text, const GameConfig& config);
Level load_level(const std::string& path, const GameConfig& config);
std::string render_level(const Level& level, const GameConfig& config);

struct Edge {
  int from = 0;
  int to = 0;
};

// Directed 4-neighbourhood graph over grid cells. Wraparound edges join the
// first and last row/column and are only added along dimensions of at least
// three cells; on smaller dimensions they would duplicate existing edges or
// form self-loops.
class SpaceGraph {
 public:
  SpaceGraph(int rows, int cols, bool wraparound);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool wraparound() const { return wraparound_; }
  int node_count() const { return rows_ * cols_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const int> out_edges(int node) const;
  std::span<const int> in_edges(int node) const;
  std::span<const int> neighbors(int node) const;

  // Shortest unblocked path length, i.e. wraparound-aware Manhattan distance.
  int distance(int a, int b) const;

 private:
  int rows_;
  int cols_;
  bool wraparound_;
  std::vector<Edge> edges_;
  std::vector<int> out_start_, out_list_;
  std::vector<int> in_start_, in_list_;
  std::vector<int> nbr_list_;
};

SpaceGraph build_space_graph(int rows, int cols, bool wraparound);

// Fraction of cells holding each object type, indexed by type id.
std::vector<double> object_frequencies(std::span<const Level> corpus, const GameConfig& config);

}  // namespace levelrepair
