#include "mip_solver.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "errors.hpp"
#include "simplex.hpp"

namespace levelrepair {

namespace {

using Clock = std::chrono::steady_clock;

Clock::time_point deadline_after(double seconds) {
  if (!(seconds < 1e9)) return Clock::time_point::max();
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  std::vector<BoundChange> changes;  // cumulative from the root
  double bound = -kInfinity;
  long long seq = 0;
  std::shared_ptr<const SimplexEngine::Basis> basis;
};

// Best-bound order; later nodes first among equal bounds.
struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq < b.seq;
  }
};

double frac_part(double v) { return std::fabs(v - std::round(v)); }

}  // namespace

MipSolution solve_lp(const MipProblem& problem, const SolverOptions& options) {
  SimplexEngine engine(problem);
  SimplexEngine::Options lp;
  lp.primal_tol = options.feas_tol;
  lp.deadline = deadline_after(options.time_limit_seconds);
  auto st = engine.solve(lp);
  MipSolution out;
  out.lp_iterations = engine.iterations();
  switch (st) {
    case SimplexEngine::Status::kOptimal:
      out.status = SolveStatus::kOptimal;
      out.values = engine.column_values();
      out.objective_value = problem.objective_value(out.values);
      out.best_bound = out.objective_value;
      break;
    case SimplexEngine::Status::kInfeasible: out.status = SolveStatus::kInfeasible; break;
    case SimplexEngine::Status::kUnbounded: out.status = SolveStatus::kUnbounded; break;
    case SimplexEngine::Status::kIterationLimit:
    case SimplexEngine::Status::kTimeLimit:
    case SimplexEngine::Status::kCutoff: out.status = SolveStatus::kLimitReached; break;
    case SimplexEngine::Status::kNumericalFailure:
      throw Error(ErrorCode::kNumericalFailure, "LP relaxation could not be solved");
  }
  return out;
}

MipSolution solve_mip(const MipProblem& problem, const SolverOptions& options,
                      std::span<const double> warm_incumbent) {
  const auto deadline = deadline_after(options.time_limit_seconds);
  const int n = static_cast<int>(problem.num_variables());
  const auto& vars = problem.variables();
  const bool integral_obj = options.use_integral_objective_pruning && problem.has_integral_objective();

  MipSolution result;
  double incumbent = kInfinity;

  auto try_incumbent = [&](std::vector<double> values) {
    for (int j = 0; j < n; ++j) {
      if (vars[static_cast<std::size_t>(j)].is_integral()) values[static_cast<std::size_t>(j)] = std::round(values[static_cast<std::size_t>(j)]);
    }
    if (!check_solution(problem, values, std::max(options.feas_tol, 1e-6), options.int_tol).empty()) return false;
    double obj = problem.objective_value(values);
    if (obj >= incumbent) return false;
    incumbent = obj;
    result.values = std::move(values);
    result.objective_value = obj;
    return true;
  };

  if (!warm_incumbent.empty()) {
    if (static_cast<int>(warm_incumbent.size()) != n) {
      throw Error(ErrorCode::kDimensionMismatch, "warm incumbent size does not match problem");
    }
    try_incumbent(std::vector<double>(warm_incumbent.begin(), warm_incumbent.end()));
  }

  // A node whose relaxation bound exceeds this cannot improve the incumbent.
  auto prune_threshold = [&]() {
    if (incumbent == kInfinity) return kInfinity;
    if (integral_obj) return incumbent - 1.0 + options.int_tol;
    return incumbent - 1e-9 * std::max(1.0, std::fabs(incumbent));
  };

  SimplexEngine engine(problem);
  SimplexEngine::Options lp;
  lp.primal_tol = options.feas_tol;
  lp.deadline = deadline;

  std::vector<Node> open;
  open.push_back(Node{});
  long long seq = 0;
  bool best_first = false;
  bool limit_hit = false;
  std::vector<int> touched;
  std::vector<char> is_touched(static_cast<std::size_t>(n), 0);
  std::shared_ptr<const SimplexEngine::Basis> live_basis;

  auto apply_node = [&](const Node& node) {
    for (int j : touched) {
      const auto& v = vars[static_cast<std::size_t>(j)];
      engine.set_col_bounds(j, v.lower, v.upper);
      is_touched[static_cast<std::size_t>(j)] = 0;
    }
    touched.clear();
    for (const auto& c : node.changes) {
      engine.set_col_bounds(c.var, c.lower, c.upper);
      if (!is_touched[static_cast<std::size_t>(c.var)]) {
        is_touched[static_cast<std::size_t>(c.var)] = 1;
        touched.push_back(c.var);
      }
    }
    // A child popped right after its parent can keep the live basis and factorisation.
    if (node.basis && node.basis != live_basis) engine.set_basis(*node.basis);
  };

  double open_bound_at_limit = kInfinity;

  // Depth-first until the search itself produces an incumbent.
  auto switch_to_best_first = [&]() {
    if (best_first) return;
    best_first = true;
    std::make_heap(open.begin(), open.end(), WorseNode{});
  };

  // After branching in best-first mode the preferred child is solved next
  // (a plunge), which keeps the factorisation warm and finds incumbents early.
  std::optional<Node> dive;

  while (!open.empty() || dive) {
    if (result.nodes >= options.node_limit || Clock::now() > deadline) {
      if (dive) open.push_back(std::move(*dive));
      limit_hit = true;
      break;
    }
    Node node;
    if (dive) {
      node = std::move(*dive);
      dive.reset();
    } else if (best_first) {
      std::pop_heap(open.begin(), open.end(), WorseNode{});
      node = std::move(open.back());
      open.pop_back();
    } else {
      node = std::move(open.back());
      open.pop_back();
    }
    if (node.bound > prune_threshold()) continue;

    ++result.nodes;
    apply_node(node);
    const double threshold = prune_threshold();
    lp.cutoff = threshold == kInfinity ? kInfinity : (integral_obj ? incumbent - 1.0 + 1e-3 : threshold);

    live_basis.reset();
    auto st = engine.solve(lp);
    if (st == SimplexEngine::Status::kNumericalFailure) {
      engine.set_slack_basis();
      st = engine.solve(lp);
      if (st == SimplexEngine::Status::kNumericalFailure) {
        throw Error(ErrorCode::kNumericalFailure, "LP relaxation failed at node " + std::to_string(result.nodes));
      }
    }
    if (st == SimplexEngine::Status::kTimeLimit || st == SimplexEngine::Status::kIterationLimit) {
      open.push_back(std::move(node));
      limit_hit = true;
      break;
    }
    if (st == SimplexEngine::Status::kInfeasible || st == SimplexEngine::Status::kCutoff) continue;
    if (st == SimplexEngine::Status::kUnbounded) {
      if (result.nodes == 1) {
        result.status = SolveStatus::kUnbounded;
        result.lp_iterations = engine.iterations();
        result.values.clear();
        return result;
      }
      continue;
    }

    const double bound = engine.objective();
    if (bound > prune_threshold()) continue;

    // Most fractional binary, lowest index on ties; general integers only
    // when no binary is fractional.
    int branch = -1;
    double best_frac = options.int_tol;
    for (int pass = 0; pass < 2 && branch < 0; ++pass) {
      for (int j = 0; j < n; ++j) {
        const auto& v = vars[static_cast<std::size_t>(j)];
        if (pass == 0 ? v.kind != VarKind::kBinary : v.kind != VarKind::kInteger) continue;
        const double f = frac_part(engine.column_value(j));
        if (f > best_frac) {
          best_frac = f;
          branch = j;
        }
      }
    }

    if (branch >= 0 && options.primal_heuristic) {
      auto candidate = options.primal_heuristic(engine.column_values());
      if (candidate.size() == static_cast<std::size_t>(n) && try_incumbent(std::move(candidate))) {
        switch_to_best_first();
      }
      if (bound > prune_threshold()) continue;
    }

    if (branch < 0) {
      if (try_incumbent(engine.column_values())) switch_to_best_first();
      continue;
    }

    const double value = engine.column_value(branch);
    auto basis = std::make_shared<const SimplexEngine::Basis>(engine.basis());
    live_basis = basis;
    Node down, up;
    down.changes = node.changes;
    up.changes = std::move(node.changes);
    down.changes.push_back({branch, engine.col_lower(branch), std::floor(value)});
    up.changes.push_back({branch, std::ceil(value), engine.col_upper(branch)});
    down.bound = up.bound = bound;
    down.basis = up.basis = basis;
    // In depth-first mode the child pushed last is explored first.
    const bool up_first = value - std::floor(value) >= 0.5;
    Node& first = up_first ? down : up;
    Node& second = up_first ? up : down;
    first.seq = ++seq;
    second.seq = ++seq;
    open.push_back(std::move(first));
    if (best_first) {
      std::push_heap(open.begin(), open.end(), WorseNode{});
      dive = std::move(second);
    } else {
      open.push_back(std::move(second));
    }
  }

  result.lp_iterations = engine.iterations();
  if (limit_hit) {
    for (const auto& nd : open) open_bound_at_limit = std::min(open_bound_at_limit, nd.bound);
    result.status = SolveStatus::kLimitReached;
    result.best_bound = std::min(open_bound_at_limit, incumbent);
    return result;
  }
  if (incumbent == kInfinity) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }
  result.status = SolveStatus::kOptimal;
  result.best_bound = result.objective_value;
  return result;
}

MipSolution parse_solution_text(const MipProblem& problem, const std::string& text, const SolverOptions& options) {
  std::vector<double> values(problem.num_variables(), 0.0);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name) || name[0] == '#') continue;
    if (name == "infeasible") throw Error(ErrorCode::kInfeasibleReported, "external solver reported infeasibility");
    std::string number;
    if (!(ls >> number)) {
      throw Error(ErrorCode::kSolutionParseError, "line " + std::to_string(line_no) + ": missing value for '" + name + "'");
    }
    auto id = problem.find_variable(name);
    if (!id) throw Error(ErrorCode::kSolutionParseError, "line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
    char* end = nullptr;
    double v = std::strtod(number.c_str(), &end);
    if (end == number.c_str() || *end != '\0') {
      throw Error(ErrorCode::kSolutionParseError, "line " + std::to_string(line_no) + ": bad number '" + number + "'");
    }
    values[static_cast<std::size_t>(id->index)] = v;
  }
  auto violations = check_solution(problem, values, std::max(options.feas_tol, 1e-6), options.int_tol);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " violation(s) in external solution";
    for (std::size_t i = 0; i < violations.size() && i < 5; ++i) msg += "; " + violations[i].describe();
    throw Error(ErrorCode::kSolutionParseError, msg);
  }
  for (const auto& v : problem.variables()) {
    if (v.is_integral()) values[static_cast<std::size_t>(v.id.index)] = std::round(values[static_cast<std::size_t>(v.id.index)]);
  }
  MipSolution out;
  out.objective_value = problem.objective_value(values);
  out.best_bound = out.objective_value;
  out.values = std::move(values);
  out.status = SolveStatus::kOptimal;
  return out;
}

MipSolution solve_external(const MipProblem& problem, const std::string& command_template,
                           const SolverOptions& options) {
  std::string tmpl = command_template;
  if (tmpl.empty()) {
    if (const char* env = std::getenv("LEVEL_REPAIR_SOLVER")) tmpl = env;
  }
  if (tmpl.empty()) throw Error(ErrorCode::kExternalSolverUnavailable, "no solver command given");

  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("levelrepair-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};

  const fs::path lp_path = dir / "problem.lp";
  const fs::path sol_path = dir / "solution.txt";
  {
    std::ofstream out(lp_path);
    out << export_lp(problem);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + lp_path.string());
  }

  auto replace_all = [](std::string s, const std::string& key, const std::string& value) {
    for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
      s.replace(pos, key.size(), value);
    }
    return s;
  };
  std::string cmd = replace_all(replace_all(tmpl, "{lp}", lp_path.string()), "{sol}", sol_path.string());

  int rc = std::system(cmd.c_str());
  if (rc == -1) throw Error(ErrorCode::kExternalSolverUnavailable, "could not start shell");
  if (WIFEXITED(rc) && WEXITSTATUS(rc) == 127) {
    throw Error(ErrorCode::kExternalSolverUnavailable, "command not found: " + cmd);
  }
  if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) {
    throw Error(ErrorCode::kSolverFailed, "external solver exited with status " + std::to_string(WEXITSTATUS(rc)));
  }

  std::ifstream in(sol_path);
  if (!in) throw Error(ErrorCode::kSolutionParseError, "solver produced no solution file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solution_text(problem, buf.str(), options);
}

}  // namespace levelrepair
