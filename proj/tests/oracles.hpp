#pragma once

// Reference implementations written without the library's graph or
// matching code. Slow, and only meant for small grids.

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <vector>

#include "level.hpp"

namespace oracle {

inline int axis_distance(int a, int b, int n, bool wrap) {
  int d = std::abs(a - b);
  if (wrap && n >= 3) d = std::min(d, n - d);
  return d;
}

inline int grid_distance(const levelrepair::Level& l, int u, int v, bool wrap) {
  return axis_distance(l.row_of(u), l.row_of(v), l.rows(), wrap) +
         axis_distance(l.col_of(u), l.col_of(v), l.cols(), wrap);
}

// Per type, every object of `a` is deleted or moved onto a distinct cell of
// the same type in `b`; uncovered cells of `b` are free additions. Subset DP
// over the cells of `b`.
inline long long edit_distance(const levelrepair::Level& a, const levelrepair::Level& b,
                               const levelrepair::GameConfig& config) {
  long long total = 0;
  for (int t = 0; t < config.num_types(); ++t) {
    std::vector<int> from, to;
    for (int v = 0; v < a.size(); ++v) {
      if (a[v] == t) from.push_back(v);
      if (b[v] == t) to.push_back(v);
    }
    const std::size_t states = std::size_t{1} << to.size();
    std::vector<long long> dp(states, LLONG_MAX), next(states);
    dp[0] = 0;
    for (int u : from) {
      std::fill(next.begin(), next.end(), LLONG_MAX);
      for (std::size_t mask = 0; mask < states; ++mask) {
        if (dp[mask] == LLONG_MAX) continue;
        next[mask] = std::min(next[mask], dp[mask] + config.delete_cost);
        for (std::size_t j = 0; j < to.size(); ++j) {
          if (mask & (std::size_t{1} << j)) continue;
          const long long c = dp[mask] + static_cast<long long>(config.move_cost) * grid_distance(a, u, to[j], config.wraparound);
          auto& slot = next[mask | (std::size_t{1} << j)];
          slot = std::min(slot, c);
        }
      }
      dp.swap(next);
    }
    total += *std::min_element(dp.begin(), dp.end());
  }
  return total;
}

inline std::vector<int> neighbours(const levelrepair::Level& l, int v, bool wrap) {
  std::vector<int> out;
  const int r = l.row_of(v), c = l.col_of(v);
  const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
  for (int k = 0; k < 4; ++k) {
    int nr = r + dr[k], nc = c + dc[k];
    if (wrap && l.rows() >= 3) nr = (nr + l.rows()) % l.rows();
    if (wrap && l.cols() >= 3) nc = (nc + l.cols()) % l.cols();
    if (nr < 0 || nc < 0 || nr >= l.rows() || nc >= l.cols()) continue;
    int u = nr * l.cols() + nc;
    if (u != v && std::find(out.begin(), out.end(), u) == out.end()) out.push_back(u);
  }
  return out;
}

// Playability by direct counting and a depth-first flood fill. A blocking
// cell can be entered but not left.
inline bool playable(const levelrepair::Level& l, const levelrepair::GameConfig& config) {
  if (config.rows > 0 && l.rows() != config.rows) return false;
  if (config.cols > 0 && l.cols() != config.cols) return false;
  for (const auto& c : config.count_constraints) {
    if (l.count(c.type) != c.count) return false;
  }
  if (config.border_object) {
    for (int r = 0; r < l.rows(); ++r) {
      for (int c = 0; c < l.cols(); ++c) {
        bool edge = r == 0 || c == 0 || r == l.rows() - 1 || c == l.cols() - 1;
        if (edge && l.at(r, c) != *config.border_object) return false;
      }
    }
  }
  int open = 0;
  for (int v = 0; v < l.size(); ++v) open += config.is_solid(l[v]) ? 0 : 1;
  for (const auto& d : config.density_constraints) {
    long long members = 0;
    for (int v = 0; v < l.size(); ++v) {
      if (std::find(d.types.begin(), d.types.end(), l[v]) != d.types.end()) ++members;
    }
    if (static_cast<double>(members) > d.max_fraction.value() * open + 1e-9) return false;
  }
  if (!config.target_set.empty()) {
    std::vector<char> seen(static_cast<std::size_t>(l.size()), 0);
    std::vector<int> stack;
    for (int v = 0; v < l.size(); ++v) {
      if (config.is_source(l[v])) {
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (config.is_blocking(l[v])) continue;
      for (int u : neighbours(l, v, config.wraparound)) {
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = 1;
          stack.push_back(u);
        }
      }
    }
    for (int v = 0; v < l.size(); ++v) {
      if (config.is_target(l[v]) && !seen[static_cast<std::size_t>(v)]) return false;
    }
  }
  if (config.no_dead_ends) {
    for (int v = 0; v < l.size(); ++v) {
      if (config.is_blocking(l[v])) continue;
      int n = 0;
      for (int u : neighbours(l, v, config.wraparound)) n += config.is_blocking(l[u]) ? 0 : 1;
      if (n < 2) return false;
    }
  }
  return true;
}

// Breadth-first step count from the cell of `from` to the cell of `to`
// through non-blocking intermediate cells; -1 when unreachable.
inline int path_length(const levelrepair::Level& l, int from, int to, const levelrepair::GameConfig& config) {
  int s = -1, g = -1;
  for (int v = 0; v < l.size(); ++v) {
    if (l[v] == from) s = v;
    if (l[v] == to) g = v;
  }
  std::vector<int> dist(static_cast<std::size_t>(l.size()), -1), queue{s};
  dist[static_cast<std::size_t>(s)] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int v = queue[head];
    if (v == g) return dist[static_cast<std::size_t>(v)];
    if (v != s && config.is_blocking(l[v])) continue;
    for (int u : neighbours(l, v, config.wraparound)) {
      if (dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(u);
      }
    }
  }
  return -1;
}

}  // namespace oracle
