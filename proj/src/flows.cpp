#include "flows.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <tuple>

#include "errors.hpp"

namespace levelrepair {

namespace {

std::string cell_text(int cell, int cols) {
  return "(" + std::to_string(cell / cols) + "," + std::to_string(cell % cols) + ")";
}

}  // namespace

std::string EditReport::to_text(const GameConfig& config, int cols) const {
  std::string out;
  for (const auto& m : moves) {
    out += "move " + config.type_name(m.type) + " " + cell_text(m.from, cols) + " -> " + cell_text(m.to, cols) +
           " tiles " + std::to_string(m.path_cost) + "\n";
  }
  for (const auto& d : deletions) out += "delete " + config.type_name(d.type) + " " + cell_text(d.cell, cols) + "\n";
  for (const auto& a : additions) out += "add " + config.type_name(a.type) + " " + cell_text(a.cell, cols) + "\n";
  out += "total " + std::to_string(total_cost) + "\n";
  return out;
}

std::vector<int> solve_assignment(const std::vector<std::vector<long long>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost[0].size());
  if (m < n) throw Error(ErrorCode::kInvalidArgument, "assignment needs rows <= cols");
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  // Shortest augmenting paths with potentials; index 0 is a sentinel.
  std::vector<long long> u(static_cast<std::size_t>(n) + 1, 0), v(static_cast<std::size_t>(m) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(static_cast<std::size_t>(m) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      long long delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const long long cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                              u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (p[static_cast<std::size_t>(j)] != 0) assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return assignment;
}

EditDistance edit_distance(const Level& a, const Level& b, const GameConfig& config) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "levels are " + std::to_string(a.rows()) + "x" +
                                                   std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                                                   "x" + std::to_string(b.cols()));
  }
  const SpaceGraph graph(a.rows(), a.cols(), config.wraparound);
  EditDistance out;
  out.per_type.assign(static_cast<std::size_t>(config.num_types()), 0);

  for (int o = 0; o < config.num_types(); ++o) {
    // Cells holding o in both levels are matched to themselves: any optimal
    // matching can be rearranged into one that does so without extra cost.
    std::vector<int> supplies, demands;
    for (int v = 0; v < a.size(); ++v) {
      const bool in_a = a[v] == o, in_b = b[v] == o;
      if (in_a && !in_b) supplies.push_back(v);
      if (in_b && !in_a) demands.push_back(v);
    }
    const std::size_t ns = supplies.size(), nd = demands.size();
    long long type_cost = 0;
    std::vector<char> demand_used(nd, 0);
    if (ns > 0) {
      // Columns: every demand, then one waste column per supply.
      std::vector<std::vector<long long>> cost(ns, std::vector<long long>(nd + ns, 0));
      for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nd; ++j) {
          cost[i][j] = static_cast<long long>(config.move_cost) * graph.distance(supplies[i], demands[j]);
        }
        for (std::size_t w = 0; w < ns; ++w) cost[i][nd + w] = config.delete_cost;
      }
      const auto assign = solve_assignment(cost);
      for (std::size_t i = 0; i < ns; ++i) {
        const auto j = static_cast<std::size_t>(assign[i]);
        type_cost += cost[i][j];
        if (j < nd) {
          demand_used[j] = 1;
          out.report.moves.push_back({o, supplies[i], demands[j], graph.distance(supplies[i], demands[j])});
        } else {
          out.report.deletions.push_back({o, supplies[i]});
        }
      }
    }
    for (std::size_t j = 0; j < nd; ++j) {
      if (!demand_used[j]) out.report.additions.push_back({o, demands[j]});
    }
    out.per_type[static_cast<std::size_t>(o)] = type_cost;
    out.total += type_cost;
  }
  out.report.total_cost = out.total;
  return out;
}

std::string PlayabilityViolation::describe(const GameConfig& config, int cols) const {
  auto name = [&](int t) { return t >= 0 ? config.type_name(t) : std::string("?"); };
  switch (kind) {
    case Kind::kSizeMismatch:
      return "SizeMismatch(" + std::to_string(actual) + " cells, expected " + std::to_string(expected) + ")";
    case Kind::kCountMismatch:
      return "CountMismatch(" + name(type) + ", " + std::to_string(actual) + ", " + std::to_string(expected) + ")";
    case Kind::kBorder: return "BorderViolation(" + name(type) + ", " + cell_text(cell, cols) + ")";
    case Kind::kDensity:
      return "DensityExceeded(" + std::to_string(actual) + " > " + std::to_string(expected) + ")";
    case Kind::kUnreachable: return "Unreachable(" + name(type) + ", " + cell_text(cell, cols) + ")";
    case Kind::kDeadEnd:
      return "DeadEnd(" + cell_text(cell, cols) + ", " + std::to_string(actual) + " passable neighbours)";
  }
  return "Unknown";
}

Verdict validate_playable(const Level& level, const GameConfig& config) {
  using K = PlayabilityViolation::Kind;
  Verdict verdict;
  auto& out = verdict.violations;
  if ((config.rows > 0 && level.rows() != config.rows) || (config.cols > 0 && level.cols() != config.cols)) {
    out.push_back({K::kSizeMismatch, -1, -1, level.size(),
                   static_cast<long long>(config.rows > 0 ? config.rows : level.rows()) *
                       (config.cols > 0 ? config.cols : level.cols())});
  }

  for (const auto& c : config.count_constraints) {
    const int have = level.count(c.type);
    if (have != c.count) out.push_back({K::kCountMismatch, c.type, -1, have, c.count});
  }

  if (config.border_object) {
    for (int v = 0; v < level.size(); ++v) {
      if (level.on_perimeter(v) && level[v] != *config.border_object) out.push_back({K::kBorder, level[v], v, 0, 0});
    }
  }

  long long solid = 0;
  for (int v = 0; v < level.size(); ++v) solid += config.is_solid(level[v]) ? 1 : 0;
  for (const auto& d : config.density_constraints) {
    long long members = 0;
    for (int t : d.types) members += level.count(t);
    // members <= (num/den) * (|V| - solid), compared in integers
    const long long lhs = d.max_fraction.den * members;
    const long long rhs = d.max_fraction.num * (level.size() - solid);
    if (lhs > rhs) out.push_back({K::kDensity, -1, -1, members, rhs / d.max_fraction.den});
  }

  const SpaceGraph graph(level.rows(), level.cols(), config.wraparound);
  if (!config.target_set.empty()) {
    std::vector<char> seen(static_cast<std::size_t>(level.size()), 0);
    std::deque<int> queue;
    for (int v = 0; v < level.size(); ++v) {
      if (config.is_source(level[v])) {
        seen[static_cast<std::size_t>(v)] = 1;
        queue.push_back(v);
      }
    }
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      if (config.is_blocking(level[v])) continue;  // entered, but nothing leaves
      for (int u : graph.neighbors(v)) {
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = 1;
          queue.push_back(u);
        }
      }
    }
    for (int v = 0; v < level.size(); ++v) {
      if (config.is_target(level[v]) && !seen[static_cast<std::size_t>(v)]) {
        out.push_back({K::kUnreachable, level[v], v, 0, 0});
      }
    }
  }

  if (config.no_dead_ends) {
    for (int v = 0; v < level.size(); ++v) {
      if (config.is_blocking(level[v])) continue;
      int passable = 0;
      for (int u : graph.neighbors(v)) passable += config.is_blocking(level[u]) ? 0 : 1;
      if (passable < 2) out.push_back({K::kDeadEnd, level[v], v, passable, 2});
    }
  }
  return verdict;
}

std::optional<int> min_path_length(const Level& level, int from_type, int to_type, const GameConfig& config) {
  auto unique_cell = [&](int type) {
    int found = -1;
    for (int v = 0; v < level.size(); ++v) {
      if (level[v] != type) continue;
      if (found >= 0) throw Error(ErrorCode::kEndpointNotUnique, "more than one " + config.type_name(type));
      found = v;
    }
    if (found < 0) throw Error(ErrorCode::kEndpointMissing, "no " + config.type_name(type) + " in level");
    return found;
  };
  const int start = unique_cell(from_type);
  const int goal = unique_cell(to_type);
  if (start == goal) return 0;

  const SpaceGraph graph(level.rows(), level.cols(), config.wraparound);
  std::vector<int> g(static_cast<std::size_t>(level.size()), std::numeric_limits<int>::max());
  using Entry = std::tuple<int, int, int>;  // f, g, cell
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[static_cast<std::size_t>(start)] = 0;
  open.emplace(graph.distance(start, goal), 0, start);
  while (!open.empty()) {
    auto [f, gv, v] = open.top();
    open.pop();
    if (gv > g[static_cast<std::size_t>(v)]) continue;
    if (v == goal) return gv;
    if (v != start && config.is_blocking(level[v])) continue;
    for (int u : graph.neighbors(v)) {
      const int ng = gv + 1;
      if (ng < g[static_cast<std::size_t>(u)]) {
        g[static_cast<std::size_t>(u)] = ng;
        open.emplace(ng + graph.distance(u, goal), ng, u);
      }
    }
  }
  return std::nullopt;
}

}  // namespace levelrepair
