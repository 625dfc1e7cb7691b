#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mip_solver.hpp"

using namespace levelrepair;
using testing::code_of;

namespace {

struct Enumerated {
  bool feasible = false;
  double best = 0.0;
};

// Tries every point of the box; integer variables only.
Enumerated enumerate(const MipProblem& p) {
  Enumerated out;
  const std::size_t n = p.num_variables();
  std::vector<double> x(n);
  std::vector<int> lo(n), hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = static_cast<int>(p.variables()[j].lower);
    hi[j] = static_cast<int>(p.variables()[j].upper);
    x[j] = lo[j];
  }
  while (true) {
    if (check_solution(p, x, 1e-9, 1e-9).empty()) {
      double obj = p.objective_value(x);
      if (!out.feasible || obj < out.best) out.best = obj;
      out.feasible = true;
    }
    std::size_t j = 0;
    while (j < n && x[j] == hi[j]) {
      x[j] = lo[j];
      ++j;
    }
    if (j == n) break;
    x[j] += 1;
  }
  return out;
}

MipProblem random_problem(std::mt19937_64& rng, bool with_integers) {
  std::uniform_int_distribution<int> nvars(1, 12), ncons(0, 10), coef(-5, 5), pick(0, 2);
  MipProblem p;
  int n = nvars(rng);
  if (with_integers) n = std::min(n, 6);
  std::vector<VarId> vars;
  for (int j = 0; j < n; ++j) {
    if (with_integers && j % 2 == 1) {
      vars.push_back(p.add_variable("n" + std::to_string(j), VarKind::kInteger, 0, 3));
    } else {
      vars.push_back(p.add_binary("b" + std::to_string(j)));
    }
  }
  std::vector<Term> obj;
  for (auto v : vars) obj.push_back({static_cast<double>(coef(rng)), v});
  // occasionally a fractional objective, which disables integral pruning
  if (pick(rng) == 0) obj[0].coef += 0.25;
  p.set_objective(obj);
  int m = ncons(rng);
  for (int i = 0; i < m; ++i) {
    std::vector<Term> row;
    double sum_abs = 0;
    for (auto v : vars) {
      int c = coef(rng);
      if (c != 0 && pick(rng) != 0) {
        row.push_back({static_cast<double>(c), v});
        sum_abs += std::abs(c);
      }
    }
    std::uniform_int_distribution<int> rhs(-static_cast<int>(sum_abs / 2) - 1, static_cast<int>(sum_abs / 2) + 1);
    Sense sense = pick(rng) == 0 ? Sense::kEqual : (pick(rng) == 0 ? Sense::kGreaterEqual : Sense::kLessEqual);
    p.add_constraint(row, sense, rhs(rng), "r" + std::to_string(i));
  }
  return p;
}

void write_script(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  out << "#!/bin/sh\n" << body;
  out.close();
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
}

}  // namespace

TEST_CASE("LP: single lower bound") {
  MipProblem p;
  auto x = p.add_variable("x", VarKind::kContinuous);
  p.add_constraint({{1, x}}, Sense::kGreaterEqual, 3, "lo");
  p.set_objective({{1, x}});
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(3));
}

TEST_CASE("LP: maximise through a negated objective") {
  MipProblem p;
  auto x = p.add_variable("x", VarKind::kContinuous);
  p.add_constraint({{1, x}}, Sense::kLessEqual, 5, "hi");
  p.set_objective({{-1, x}});
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.values[0] == doctest::Approx(5));
}

TEST_CASE("LP: infeasible and unbounded") {
  MipProblem p;
  auto x = p.add_variable("x", VarKind::kContinuous);
  p.add_constraint({{1, x}}, Sense::kLessEqual, -1, "neg");
  CHECK(solve_lp(p).status == SolveStatus::kInfeasible);
  MipProblem q;
  auto y = q.add_variable("y", VarKind::kContinuous);
  q.set_objective({{-1, y}});
  CHECK(solve_lp(q).status == SolveStatus::kUnbounded);
}

TEST_CASE("LP: small textbook problem") {
  // max 3a + 5b st a <= 4, 2b <= 12, 3a + 2b <= 18 -> a=2, b=6, value 36
  MipProblem p;
  auto a = p.add_variable("a", VarKind::kContinuous);
  auto b = p.add_variable("b", VarKind::kContinuous);
  p.add_constraint({{1, a}}, Sense::kLessEqual, 4, "r1");
  p.add_constraint({{2, b}}, Sense::kLessEqual, 12, "r2");
  p.add_constraint({{3, a}, {2, b}}, Sense::kLessEqual, 18, "r3");
  p.set_objective({{-3, a}, {-5, b}});
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(-36));
  CHECK(s.values[0] == doctest::Approx(2));
  CHECK(s.values[1] == doctest::Approx(6));
}

TEST_CASE("MIP: rounding up a cover") {
  MipProblem p;
  auto x1 = p.add_binary("x1");
  auto x2 = p.add_binary("x2");
  p.add_constraint({{1, x1}, {1, x2}}, Sense::kGreaterEqual, 1.5, "cover");
  p.set_objective({{1, x1}, {1, x2}});
  CHECK(solve_lp(p).objective_value == doctest::Approx(1.5));
  auto s = solve_mip(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(2));
  CHECK(s.best_bound == doctest::Approx(2));
}

TEST_CASE("MIP: infeasible parity") {
  MipProblem p;
  auto x = p.add_binary("x");
  auto y = p.add_binary("y");
  p.add_constraint({{2, x}, {2, y}}, Sense::kEqual, 1, "odd");
  CHECK(solve_mip(p).status == SolveStatus::kInfeasible);
  MipProblem q;
  auto z = q.add_binary("z");
  q.add_constraint({{1, z}}, Sense::kEqual, 2, "two");
  CHECK(solve_mip(q).status == SolveStatus::kInfeasible);
}

TEST_CASE("MIP: empty problem is optimal at zero") {
  MipProblem p;
  auto s = solve_mip(p);
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == 0.0);
}

TEST_CASE("MIP: warm incumbent is kept when optimal and ignored when infeasible") {
  MipProblem p;
  auto x = p.add_binary("x");
  auto y = p.add_binary("y");
  p.add_constraint({{1, x}, {1, y}}, Sense::kGreaterEqual, 1, "cover");
  p.set_objective({{2, x}, {3, y}});
  std::vector<double> good{1, 0}, bad{0, 0};
  CHECK(solve_mip(p, {}, good).objective_value == doctest::Approx(2));
  CHECK(solve_mip(p, {}, bad).objective_value == doctest::Approx(2));
}

TEST_CASE("MIP: node limit reports limit_reached with a valid bound") {
  // knapsack-style instance that needs branching
  MipProblem p;
  std::vector<Term> weight, value;
  const int w[] = {5, 7, 9, 11, 13, 15, 17, 19, 21, 23};
  for (int j = 0; j < 10; ++j) {
    auto v = p.add_binary("k" + std::to_string(j));
    weight.push_back({static_cast<double>(w[j]), v});
    value.push_back({-static_cast<double>(w[j] + 1), v});
  }
  p.add_constraint(weight, Sense::kLessEqual, 50, "cap");
  p.set_objective(value);
  SolverOptions limited;
  limited.node_limit = 1;
  auto s = solve_mip(p, limited);
  auto full = solve_mip(p);
  REQUIRE(full.status == SolveStatus::kOptimal);
  CHECK(full.objective_value == doctest::Approx(enumerate(p).best));
  if (s.status == SolveStatus::kLimitReached) CHECK(s.best_bound <= full.objective_value + 1e-6);
}

TEST_CASE("MIP agrees with enumeration on random binary problems") {
  std::mt19937_64 rng(20240917);
  int feasible = 0;
  for (int trial = 0; trial < 250; ++trial) {
    CAPTURE(trial);
    auto p = random_problem(rng, false);
    auto truth = enumerate(p);
    auto s = solve_mip(p);
    if (!truth.feasible) {
      CHECK(s.status == SolveStatus::kInfeasible);
      continue;
    }
    ++feasible;
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(s.objective_value == doctest::Approx(truth.best).epsilon(1e-9));
    CHECK(check_solution(p, s.values, 1e-6, 1e-6).empty());
    auto lp = solve_lp(p);
    REQUIRE(lp.status == SolveStatus::kOptimal);
    CHECK(lp.objective_value <= truth.best + 1e-6);
  }
  CHECK(feasible >= 50);
}

TEST_CASE("MIP agrees with enumeration when general integers are present") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    auto p = random_problem(rng, true);
    auto truth = enumerate(p);
    auto s = solve_mip(p);
    if (!truth.feasible) {
      CHECK(s.status == SolveStatus::kInfeasible);
    } else {
      REQUIRE(s.status == SolveStatus::kOptimal);
      CHECK(s.objective_value == doctest::Approx(truth.best).epsilon(1e-9));
    }
  }
}

TEST_CASE("solution text parsing") {
  MipProblem p;
  auto x = p.add_variable("x", VarKind::kInteger, 0, 10);
  p.add_constraint({{1, x}}, Sense::kGreaterEqual, 3, "lo");
  p.set_objective({{1, x}});
  auto s = parse_solution_text(p, "# comment\nx 3\n");
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == 3.0);
  CHECK(code_of([&] { parse_solution_text(p, "x 1\n"); }) == ErrorCode::kSolutionParseError);
  CHECK(code_of([&] { parse_solution_text(p, "y 3\n"); }) == ErrorCode::kSolutionParseError);
  CHECK(code_of([&] { parse_solution_text(p, "x three\n"); }) == ErrorCode::kSolutionParseError);
  CHECK(code_of([&] { parse_solution_text(p, "x\n"); }) == ErrorCode::kSolutionParseError);
  CHECK(code_of([&] { parse_solution_text(p, "infeasible\n"); }) == ErrorCode::kInfeasibleReported);
}

TEST_CASE("external solver stubs") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "levelrepair-stub-test";
  fs::create_directories(dir);
  MipProblem p;
  auto x = p.add_variable("x", VarKind::kInteger, 0, 10);
  p.add_constraint({{1, x}}, Sense::kGreaterEqual, 3, "lo");
  p.set_objective({{1, x}});

  write_script(dir / "good.sh", "grep -q 'lo: x >= 3' \"$1\" || exit 4\necho 'x 3' > \"$2\"\n");
  auto s = solve_external(p, (dir / "good.sh").string() + " {lp} {sol}");
  CHECK(s.objective_value == 3.0);

  write_script(dir / "wrong.sh", "echo 'x 1' > \"$2\"\n");
  CHECK(code_of([&] { solve_external(p, (dir / "wrong.sh").string() + " {lp} {sol}"); }) ==
        ErrorCode::kSolutionParseError);

  write_script(dir / "fails.sh", "exit 3\n");
  CHECK(code_of([&] { solve_external(p, (dir / "fails.sh").string() + " {lp} {sol}"); }) == ErrorCode::kSolverFailed);

  write_script(dir / "silent.sh", "exit 0\n");
  CHECK(code_of([&] { solve_external(p, (dir / "silent.sh").string() + " {lp} {sol}"); }) ==
        ErrorCode::kSolutionParseError);

  CHECK(code_of([&] { solve_external(p, (dir / "missing-solver").string() + " {lp} {sol} 2>/dev/null"); }) ==
        ErrorCode::kExternalSolverUnavailable);
  fs::remove_all(dir);
}
