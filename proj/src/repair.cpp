#include "repair.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <span>

#include "errors.hpp"

namespace levelrepair {

namespace {

std::size_t ix(int i) { return static_cast<std::size_t>(i); }

void check_level(const Level& level, const GameConfig& config) {
  if ((config.rows > 0 && level.rows() != config.rows) || (config.cols > 0 && level.cols() != config.cols)) {
    throw Error(ErrorCode::kConfigMismatch, "level is " + std::to_string(level.rows()) + "x" +
                                                std::to_string(level.cols()) + ", config '" + config.name +
                                                "' expects " + std::to_string(config.rows) + "x" +
                                                std::to_string(config.cols));
  }
  for (int t : level.cells()) {
    if (t < 0 || t >= config.num_types()) throw Error(ErrorCode::kConfigMismatch, "cell type outside alphabet");
  }
}

int edge_between(const SpaceGraph& g, int from, int to) {
  auto out = g.out_edges(from);
  auto nbr = g.neighbors(from);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (nbr[k] == to) return out[k];
  }
  throw Error(ErrorCode::kInvalidArgument, "cells are not adjacent");
}

// Level read off rounded LP values, then nudged towards the border and count rows.
Level round_level(const RepairMip& mip, std::span<const double> lp, const GameConfig& config) {
  const auto& g = mip.graph;
  const int nv = g.node_count();
  auto value = [&](int o, int v) { return lp[ix(mip.object_var(o, v).index)]; };
  Level level(g.rows(), g.cols(), 0);
  for (int v = 0; v < nv; ++v) {
    int best = 0;
    for (int o = 1; o < mip.num_types; ++o) {
      if (value(o, v) > value(best, v)) best = o;
    }
    level.set(v, best);
  }
  if (config.border_object) {
    for (int v = 0; v < nv; ++v) {
      if (level.on_perimeter(v)) level.set(v, *config.border_object);
    }
  }
  std::vector<char> counted(ix(mip.num_types), 0);
  for (const auto& c : config.count_constraints) counted[ix(c.type)] = 1;
  for (const auto& c : config.count_constraints) {
    std::vector<int> cells;
    for (int v = 0; v < nv; ++v) {
      const bool locked = config.border_object && level.on_perimeter(v);
      if (!locked && (level[v] == c.type || !counted[ix(level[v])])) cells.push_back(v);
    }
    std::stable_sort(cells.begin(), cells.end(), [&](int a, int b) { return value(c.type, a) > value(c.type, b); });
    int placed = 0;
    for (int v : cells) {
      if (placed < c.count) {
        level.set(v, c.type);
        ++placed;
      } else if (level[v] == c.type) {
        level.set(v, config.filler.value_or(0));
      }
    }
  }
  return level;
}

}  // namespace

RepairMip compile_repair_mip(const Level& input, const GameConfig& config) {
  check_level(input, config);
  RepairMip mip;
  mip.graph = SpaceGraph(input.rows(), input.cols(), config.wraparound);
  mip.num_types = config.num_types();
  mip.input.assign(input.cells().begin(), input.cells().end());
  auto& p = mip.problem;
  const auto& g = mip.graph;
  const int nv = g.node_count();
  const int ne = static_cast<int>(g.edges().size());
  const int no = config.num_types();
  const double big_m = nv;
  auto vs = [](int i) { return std::to_string(i); };

  for (int o = 0; o < no; ++o) {
    for (int v = 0; v < nv; ++v) mip.object.push_back(p.add_binary("x_" + config.type_name(o) + "_" + vs(v)));
  }

  mip.has_reachability = !config.target_set.empty();
  if (mip.has_reachability) {
    for (int e = 0; e < ne; ++e) {
      const auto& ed = g.edges()[ix(e)];
      mip.reach_edge.push_back(p.add_variable("f_" + vs(ed.from) + "_" + vs(ed.to), VarKind::kInteger, 0, big_m));
    }
    for (int v = 0; v < nv; ++v) mip.reach_source.push_back(p.add_variable("fs_" + vs(v), VarKind::kInteger, 0, big_m));
    for (int v = 0; v < nv; ++v) mip.reach_target.push_back(p.add_binary("ft_" + vs(v)));
  }

  for (int o = 0; o < no; ++o) {
    const auto& name = config.type_name(o);
    for (int e = 0; e < ne; ++e) {
      const auto& ed = g.edges()[ix(e)];
      mip.edit_edge.push_back(
          p.add_variable("m_" + name + "_" + vs(ed.from) + "_" + vs(ed.to), VarKind::kInteger, 0, big_m));
    }
    for (int v = 0; v < nv; ++v) mip.edit_target.push_back(p.add_binary("mt_" + name + "_" + vs(v)));
    for (int v = 0; v < nv; ++v) {
      mip.edit_waste.push_back(p.add_variable("mr_" + name + "_" + vs(v), VarKind::kInteger, 0, big_m));
    }
  }

  for (int v = 0; v < nv; ++v) {
    std::vector<Term> terms;
    for (int o = 0; o < no; ++o) terms.push_back({1.0, mip.object_var(o, v)});
    p.add_constraint(std::move(terms), Sense::kEqual, 1.0, "unique_" + vs(v));
  }

  if (mip.has_reachability) {
    for (int v = 0; v < nv; ++v) {
      std::vector<Term> terms{{1.0, mip.reach_source[ix(v)]}};
      for (int s : config.source_set) terms.push_back({-big_m, mip.object_var(s, v)});
      p.add_constraint(std::move(terms), Sense::kLessEqual, 0.0, "source_" + vs(v));
    }
    for (int v = 0; v < nv; ++v) {
      std::vector<Term> terms{{-1.0, mip.reach_target[ix(v)]}};
      for (int t : config.target_set) terms.push_back({1.0, mip.object_var(t, v)});
      p.add_constraint(std::move(terms), Sense::kEqual, 0.0, "target_" + vs(v));
    }
    for (int v = 0; v < nv; ++v) {
      std::vector<Term> terms{{1.0, mip.reach_source[ix(v)]}, {-1.0, mip.reach_target[ix(v)]}};
      for (int e : g.in_edges(v)) terms.push_back({1.0, mip.reach_edge[ix(e)]});
      for (int e : g.out_edges(v)) terms.push_back({-1.0, mip.reach_edge[ix(e)]});
      p.add_constraint(std::move(terms), Sense::kEqual, 0.0, "conserve_" + vs(v));
    }
    // Flow may enter a blocking cell but never leave it.
    for (int e = 0; e < ne; ++e) {
      const auto& ed = g.edges()[ix(e)];
      std::vector<Term> terms{{1.0, mip.reach_edge[ix(e)]}};
      for (int b : config.blocking_set) terms.push_back({big_m, mip.object_var(b, ed.from)});
      p.add_constraint(std::move(terms), Sense::kLessEqual, big_m, "block_" + vs(ed.from) + "_" + vs(ed.to));
    }
  }

  std::vector<Term> objective;
  for (int o = 0; o < no; ++o) {
    const auto& name = config.type_name(o);
    const std::size_t vbase = ix(o * nv), ebase = ix(o * ne);
    double supply = 0.0;
    for (int v = 0; v < nv; ++v) {
      const double c = input[v] == o ? 1.0 : 0.0;
      supply += c;
      // c_v + inflow = waste + absorbed + outflow
      std::vector<Term> terms{{-1.0, mip.edit_waste[vbase + ix(v)]}, {-1.0, mip.edit_target[vbase + ix(v)]}};
      for (int e : g.in_edges(v)) terms.push_back({1.0, mip.edit_edge[ebase + ix(e)]});
      for (int e : g.out_edges(v)) terms.push_back({-1.0, mip.edit_edge[ebase + ix(e)]});
      p.add_constraint(std::move(terms), Sense::kEqual, -c, "edit_" + name + "_conserve_" + vs(v));
    }
    for (int v = 0; v < nv; ++v) {
      p.add_constraint({{1.0, mip.edit_target[vbase + ix(v)]}, {-1.0, mip.object_var(o, v)}}, Sense::kLessEqual, 0.0,
                       "edit_" + name + "_demand_" + vs(v));
    }
    std::vector<Term> balance;
    for (int v = 0; v < nv; ++v) {
      balance.push_back({1.0, mip.edit_target[vbase + ix(v)]});
      balance.push_back({1.0, mip.edit_waste[vbase + ix(v)]});
    }
    p.add_constraint(std::move(balance), Sense::kEqual, supply, "edit_" + name + "_balance");

    for (int v = 0; v < nv; ++v) objective.push_back({static_cast<double>(config.delete_cost), mip.edit_waste[vbase + ix(v)]});
    for (int e = 0; e < ne; ++e) objective.push_back({static_cast<double>(config.move_cost), mip.edit_edge[ebase + ix(e)]});
  }
  p.set_objective(std::move(objective));

  for (const auto& c : config.count_constraints) {
    std::vector<Term> terms;
    for (int v = 0; v < nv; ++v) terms.push_back({1.0, mip.object_var(c.type, v)});
    p.add_constraint(std::move(terms), Sense::kEqual, c.count, "count_" + config.type_name(c.type));
  }
  for (std::size_t k = 0; k < config.density_constraints.size(); ++k) {
    // members <= (num/den)(|V| - solid)  <=>  den*members + num*solid <= num*|V|
    const auto& d = config.density_constraints[k];
    std::vector<Term> terms;
    for (int v = 0; v < nv; ++v) {
      for (int t : d.types) terms.push_back({static_cast<double>(d.max_fraction.den), mip.object_var(t, v)});
      for (int s : config.solid_set) terms.push_back({static_cast<double>(d.max_fraction.num), mip.object_var(s, v)});
    }
    p.add_constraint(std::move(terms), Sense::kLessEqual, static_cast<double>(d.max_fraction.num) * nv,
                     "density_" + vs(static_cast<int>(k)));
  }
  if (config.border_object) {
    std::vector<Term> terms;
    for (int v = 0; v < nv; ++v) {
      if (input.on_perimeter(v)) terms.push_back({1.0, mip.object_var(*config.border_object, v)});
    }
    const double perimeter = static_cast<double>(terms.size());
    p.add_constraint(std::move(terms), Sense::kEqual, perimeter, "border");
  }
  if (config.no_dead_ends) add_no_dead_end_constraints(mip, config);
  return mip;
}

void add_no_dead_end_constraints(RepairMip& mip, const GameConfig& config) {
  // sum_u (1 - B_u) >= 2 (1 - B_v)  rearranged to  -sum_u B_u + 2 B_v >= 2 - deg(v)
  const auto& g = mip.graph;
  for (int v = 0; v < g.node_count(); ++v) {
    auto nbrs = g.neighbors(v);
    std::vector<Term> terms;
    for (int u : nbrs) {
      for (int b : config.blocking_set) terms.push_back({-1.0, mip.object_var(b, u)});
    }
    for (int b : config.blocking_set) terms.push_back({2.0, mip.object_var(b, v)});
    mip.problem.add_constraint(std::move(terms), Sense::kGreaterEqual, 2.0 - static_cast<double>(nbrs.size()),
                               "deadend_" + std::to_string(v));
  }
}

std::vector<double> assignment_for(const RepairMip& mip, const Level& output, const GameConfig& config) {
  const auto& g = mip.graph;
  const int nv = g.node_count();
  const int ne = mip.num_edges();
  if (output.size() != nv) throw Error(ErrorCode::kDimensionMismatch, "output level size differs from the MIP");
  std::vector<double> x(mip.problem.num_variables(), 0.0);
  auto set = [&](VarId id, double v) { x[ix(id.index)] = v; };
  auto add = [&](VarId id, double v) { x[ix(id.index)] += v; };

  for (int v = 0; v < nv; ++v) set(mip.object_var(output[v], v), 1.0);

  if (mip.has_reachability) {
    std::vector<int> parent_edge(ix(nv), -2);
    std::deque<int> queue;
    for (int v = 0; v < nv; ++v) {
      if (config.is_source(output[v])) {
        parent_edge[ix(v)] = -1;
        queue.push_back(v);
      }
    }
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      if (config.is_blocking(output[v])) continue;
      auto out = g.out_edges(v);
      auto nbr = g.neighbors(v);
      for (std::size_t k = 0; k < out.size(); ++k) {
        if (parent_edge[ix(nbr[k])] != -2) continue;
        parent_edge[ix(nbr[k])] = out[k];
        queue.push_back(nbr[k]);
      }
    }
    for (int v = 0; v < nv; ++v) {
      if (!config.is_target(output[v])) continue;
      set(mip.reach_target[ix(v)], 1.0);
      if (parent_edge[ix(v)] == -2) continue;  // unreachable: leaves the assignment infeasible
      int cur = v;
      while (parent_edge[ix(cur)] >= 0) {
        const int e = parent_edge[ix(cur)];
        add(mip.reach_edge[ix(e)], 1.0);
        cur = g.edges()[ix(e)].from;
      }
      add(mip.reach_source[ix(cur)], 1.0);
    }
  }

  Level input(g.rows(), g.cols(), mip.input);
  const auto dist = edit_distance(input, output, config);
  for (int v = 0; v < nv; ++v) {
    if (input[v] == output[v]) set(mip.edit_target[ix(output[v] * nv + v)], 1.0);
  }
  for (const auto& m : dist.report.moves) {
    int cur = m.from;
    while (cur != m.to) {
      int next = -1;
      for (int u : g.neighbors(cur)) {
        if (g.distance(u, m.to) == g.distance(cur, m.to) - 1) {
          next = u;
          break;
        }
      }
      add(mip.edit_edge[ix(m.type * ne + edge_between(g, cur, next))], 1.0);
      cur = next;
    }
    set(mip.edit_target[ix(m.type * nv + m.to)], 1.0);
  }
  for (const auto& d : dist.report.deletions) add(mip.edit_waste[ix(d.type * nv + d.cell)], 1.0);
  return x;
}

Decoded decode(const RepairMip& mip, const MipSolution& solution, const GameConfig& config) {
  const auto& g = mip.graph;
  const int nv = g.node_count();
  const int ne = mip.num_edges();
  const int no = mip.num_types;
  if (solution.values.size() != mip.problem.num_variables()) {
    throw Error(ErrorCode::kDimensionMismatch, "solution does not match the repair MIP");
  }
  auto val = [&](VarId id) { return solution.values[ix(id.index)]; };
  auto ival = [&](VarId id) { return static_cast<long long>(std::llround(val(id))); };

  Decoded out;
  out.level = Level(g.rows(), g.cols(), 0);
  for (int v = 0; v < nv; ++v) {
    int chosen = -1;
    for (int o = 0; o < no; ++o) {
      const double x = val(mip.object_var(o, v));
      if (std::fabs(x - std::round(x)) > 1e-6) {
        throw Error(ErrorCode::kNonUniqueAssignment, "fractional object variable at cell " + std::to_string(v));
      }
      if (x > 0.5) {
        if (chosen >= 0) throw Error(ErrorCode::kNonUniqueAssignment, "two objects at cell " + std::to_string(v));
        chosen = o;
      }
    }
    if (chosen < 0) throw Error(ErrorCode::kNonUniqueAssignment, "no object at cell " + std::to_string(v));
    out.level.set(v, chosen);
  }

  auto& report = out.report;
  long long path_total = 0;
  for (int o = 0; o < no; ++o) {
    std::vector<long long> edge_left(ix(ne)), absorb_left(ix(nv)), waste_left(ix(nv));
    for (int e = 0; e < ne; ++e) edge_left[ix(e)] = ival(mip.edit_edge[ix(o * ne + e)]);
    for (int v = 0; v < nv; ++v) {
      absorb_left[ix(v)] = ival(mip.edit_target[ix(o * nv + v)]);
      waste_left[ix(v)] = ival(mip.edit_waste[ix(o * nv + v)]);
    }
    const auto absorbed = absorb_left;
    // Follow each supply unit until it is absorbed or wasted.
    for (int s = 0; s < nv; ++s) {
      if (mip.input[ix(s)] != o) continue;
      int cur = s;
      int length = 0;
      for (;;) {
        if (absorb_left[ix(cur)] > 0) {
          --absorb_left[ix(cur)];
          if (cur != s) report.moves.push_back({o, s, cur, length});
          break;
        }
        if (waste_left[ix(cur)] > 0) {
          --waste_left[ix(cur)];
          if (cur != s) report.moves.push_back({o, s, cur, length});
          report.deletions.push_back({o, cur});
          break;
        }
        int next_edge = -1;
        for (int e : g.out_edges(cur)) {
          if (edge_left[ix(e)] > 0) {
            next_edge = e;
            break;
          }
        }
        if (next_edge < 0) throw Error(ErrorCode::kNonUniqueAssignment, "edit flow does not conserve supply");
        --edge_left[ix(next_edge)];
        cur = g.edges()[ix(next_edge)].to;
        ++length;
      }
      path_total += length;
    }
    for (int v = 0; v < nv; ++v) {
      if (out.level[v] == o && absorbed[ix(v)] == 0 && mip.input[ix(v)] != o) report.additions.push_back({o, v});
    }
  }
  report.total_cost = static_cast<long long>(config.move_cost) * path_total +
                      static_cast<long long>(config.delete_cost) * static_cast<long long>(report.deletions.size());
  return out;
}

Level canonical_playable(const GameConfig& config, int rows, int cols) {
  if (rows <= 0) rows = config.rows;
  if (cols <= 0) cols = config.cols;
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::kInvalidArgument, "level dimensions unknown");
  if (!config.filler) throw Error(ErrorCode::kConfigError, "config has no filler object");
  Level level(rows, cols, *config.filler);
  std::vector<int> interior;
  for (int v = 0; v < level.size(); ++v) {
    if (config.border_object && level.on_perimeter(v)) {
      level.set(v, *config.border_object);
    } else {
      interior.push_back(v);
    }
  }
  std::size_t next = 0;
  for (const auto& c : config.count_constraints) {
    if (config.border_object && c.type == *config.border_object) continue;
    if (config.filler && c.type == *config.filler) continue;
    for (int k = 0; k < c.count; ++k) {
      if (next >= interior.size()) {
        throw Error(ErrorCode::kGridTooSmall, std::to_string(rows) + "x" + std::to_string(cols) +
                                                  " grid has too few interior cells");
      }
      level.set(interior[next++], c.type);
    }
  }
  const auto verdict = validate_playable(level, config);
  if (!verdict.ok()) {
    throw Error(ErrorCode::kGridTooSmall, "no canonical playable level for this grid: " +
                                              verdict.violations.front().describe(config, cols));
  }
  return level;
}

RepairResult repair(const Level& input, const GameConfig& config, const RepairOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RepairMip mip = compile_repair_mip(input, config);
  RepairResult result;
  result.num_variables = mip.problem.num_variables();
  result.num_constraints = mip.problem.num_constraints();

  MipSolution solution;
  if (options.backend == SolverBackend::kExternal) {
    solution = solve_external(mip.problem, options.external_command, options.solver);
  } else {
    std::vector<double> warm;
    if (options.warm_start) {
      const Level seed = validate_playable(input, config).ok() ? input
                                                                : canonical_playable(config, input.rows(), input.cols());
      warm = assignment_for(mip, seed, config);
    }
    SolverOptions solver = options.solver;
    if (!solver.primal_heuristic) {
      solver.primal_heuristic = [&](std::span<const double> lp) {
        const Level candidate = round_level(mip, lp, config);
        if (!validate_playable(candidate, config).ok()) return std::vector<double>{};
        return assignment_for(mip, candidate, config);
      };
    }
    solution = solve_mip(mip.problem, solver, warm);
  }
  if (!solution.has_solution()) {
    throw Error(ErrorCode::kSolverFailed, std::string("no repaired level found (") + solve_status_name(solution.status) + ")");
  }
  auto decoded = decode(mip, solution, config);
  result.level = std::move(decoded.level);
  result.report = std::move(decoded.report);
  result.status = solution.status;
  result.objective = solution.objective_value;
  result.best_bound = solution.best_bound;
  result.nodes = solution.nodes;
  result.lp_iterations = solution.lp_iterations;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace levelrepair
