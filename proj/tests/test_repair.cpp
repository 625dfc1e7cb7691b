#include <chrono>

#include "doctest.h"
#include "flows.hpp"
#include "generators.hpp"
#include "helpers.hpp"
#include "metrics.hpp"
#include "oracles.hpp"
#include "repair.hpp"

using namespace levelrepair;
using testing::code_of;
using testing::pacman;
using testing::type_of;
using testing::zelda;

namespace {

const Level& lvl00() {
  static const Level level = load_level(testing::data_path("zelda/levels/lvl00.txt"), zelda());
  return level;
}

RepairOptions quick() {
  RepairOptions o;
  o.solver.time_limit_seconds = 120;
  return o;
}

}  // namespace

TEST_CASE("repair model size for a 9x13 dungeon") {
  const auto start = std::chrono::steady_clock::now();
  auto mip = compile_repair_mip(lvl00(), zelda());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(mip.problem.num_variables() == 6858);
  CHECK(mip.problem.num_constraints() == 2777);
  CHECK(seconds < 1.0);
  CHECK(mip.has_reachability);
  CHECK(mip.num_edges() == 424);
  CHECK(mip.problem.has_integral_objective());
}

TEST_CASE("repair model size for an 11x11 maze") {
  auto maze = load_level(testing::data_path("pacman/levels/maze00.txt"), pacman());
  auto mip = compile_repair_mip(maze, pacman());
  CHECK(mip.problem.num_variables() == 5808);
  CHECK(mip.problem.num_constraints() == 2549);
}

TEST_CASE("levels of the wrong shape are rejected") {
  Level small(5, 5, type_of(zelda(), "wall"));
  CHECK(code_of([&] { compile_repair_mip(small, zelda()); }) == ErrorCode::kConfigMismatch);
  Level alien(9, 13, 42);
  CHECK(code_of([&] { compile_repair_mip(alien, zelda()); }) == ErrorCode::kConfigMismatch);
}

TEST_CASE("a 1x1 level without targets repairs to itself") {
  auto config = parse_config("object = a a\nobject = b b\nfiller = a\n");
  Level one(1, 1, 1);
  auto mip = compile_repair_mip(one, config);
  CHECK_FALSE(mip.has_reachability);
  CHECK(mip.num_edges() == 0);
  auto r = repair(one, config);
  CHECK(r.level == one);
  CHECK(r.objective == 0.0);
}

TEST_CASE("canonical playable levels") {
  auto z = canonical_playable(zelda());
  CHECK(z.rows() == 9);
  CHECK(validate_playable(z, zelda()).ok());
  CHECK(oracle::playable(z, zelda()));
  auto p = canonical_playable(pacman());
  CHECK(validate_playable(p, pacman()).ok());
  CHECK(code_of([] { canonical_playable(zelda(), 3, 3); }) == ErrorCode::kGridTooSmall);
  auto no_filler = parse_config("object = a a\n");
  CHECK(code_of([&] { canonical_playable(no_filler, 2, 2); }) == ErrorCode::kConfigError);
}

TEST_CASE("the encoding of a playable level is feasible and costs nothing") {
  for (const auto& level : load_corpus(testing::data_path("zelda/levels"), zelda()).levels) {
    auto mip = compile_repair_mip(level, zelda());
    auto x = assignment_for(mip, level, zelda());
    CHECK(check_solution(mip.problem, x, 1e-9, 1e-9).empty());
    CHECK(mip.problem.objective_value(x) == 0.0);
    MipSolution s;
    s.values = x;
    s.status = SolveStatus::kOptimal;
    CHECK(decode(mip, s, zelda()).level == level);
  }
}

TEST_CASE("the encoding of another playable level prices its edit distance") {
  auto corpus = load_corpus(testing::data_path("zelda/levels"), zelda());
  const auto& in = corpus.levels[0];
  auto mip = compile_repair_mip(in, zelda());
  for (std::size_t i = 1; i < corpus.levels.size(); ++i) {
    auto x = assignment_for(mip, corpus.levels[i], zelda());
    CHECK(check_solution(mip.problem, x, 1e-9, 1e-9).empty());
    CHECK(mip.problem.objective_value(x) == doctest::Approx(edit_distance(in, corpus.levels[i], zelda()).total));
  }
}

TEST_CASE("the encoding of an unplayable level is infeasible") {
  Level sealed = lvl00();
  sealed.set(1, 2, type_of(zelda(), "wall"));
  sealed.set(2, 1, type_of(zelda(), "wall"));
  auto mip = compile_repair_mip(lvl00(), zelda());
  auto x = assignment_for(mip, sealed, zelda());
  CHECK_FALSE(check_solution(mip.problem, x, 1e-9, 1e-9).empty());
}

TEST_CASE("playable input is a fixpoint") {
  auto r = repair(lvl00(), zelda(), quick());
  CHECK(r.level == lvl00());
  CHECK(r.objective == 0.0);
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(r.report.empty());
}

TEST_CASE("a missing key costs one deletion") {
  Level no_key = lvl00();
  no_key.set(3, 10, type_of(zelda(), "empty"));
  auto r = repair(no_key, zelda(), quick());
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == 10.0);
  CHECK(validate_playable(r.level, zelda()).ok());
  CHECK(edit_distance(no_key, r.level, zelda()).total == 10);
}

TEST_CASE("an enemy in the border swaps with the wall beside it") {
  const auto& z = zelda();
  Level in = lvl00();
  in.set(0, 6, type_of(z, "enemy2"));
  in.set(1, 6, type_of(z, "wall"));
  auto r = repair(in, z, quick());
  CHECK(r.objective == 2.0);
  CHECK(r.level.at(0, 6) == type_of(z, "wall"));
  CHECK(r.level.at(1, 6) == type_of(z, "enemy2"));
  CHECK(r.level.count(type_of(z, "enemy2")) == in.count(type_of(z, "enemy2")));
}

TEST_CASE("repairs of corrupted levels are playable, optimal and idempotent") {
  auto corpus = load_corpus(testing::data_path("zelda/levels"), zelda());
  auto freqs = object_frequencies(corpus.levels, zelda());
  for (int i = 0; i < 6; ++i) {
    auto in = corrupt(corpus.levels[static_cast<std::size_t>(i)], 2 + 2 * i, freqs, derive_seed(11, i));
    auto r = repair(in, zelda(), quick());
    CAPTURE(i);
    REQUIRE(r.status == SolveStatus::kOptimal);
    CHECK(validate_playable(r.level, zelda()).ok());
    CHECK(oracle::playable(r.level, zelda()));
    CHECK(r.objective == doctest::Approx(edit_distance(in, r.level, zelda()).total));
    CHECK(r.best_bound == doctest::Approx(r.objective));
    // repairing cannot cost more than going back to the original
    CHECK(r.objective <= edit_distance(in, corpus.levels[static_cast<std::size_t>(i)], zelda()).total);
    auto again = repair(r.level, zelda(), quick());
    CHECK(again.level == r.level);
    CHECK(again.objective == 0.0);
  }
}

TEST_CASE("repairs without a warm start agree") {
  auto corpus = load_corpus(testing::data_path("zelda/levels"), zelda());
  auto freqs = object_frequencies(corpus.levels, zelda());
  auto in = corrupt(corpus.levels[3], 6, freqs, 404);
  auto warm = repair(in, zelda(), quick());
  auto cold_opts = quick();
  cold_opts.warm_start = false;
  auto cold = repair(in, zelda(), cold_opts);
  CHECK(cold.status == SolveStatus::kOptimal);
  CHECK(cold.objective == warm.objective);
}

TEST_CASE("dead ends are opened up") {
  auto config = parse_config(
      "object = wall w\nobject = empty -\nobject = pellet .\nobject = player A\n"
      "sources = player\ntargets = pellet\nblocking = wall\nsolid = wall\n"
      "no_dead_ends = true\ncount = player 1\nfiller = empty\n");
  // a corridor with a dead end at the pellet
  auto in = parse_level("wwwww\nwA--w\nwww.w\nwwwww\n", config);
  CHECK_FALSE(validate_playable(in, config).ok());
  auto r = repair(in, config, quick());
  CHECK(validate_playable(r.level, config).ok());
  CHECK(oracle::playable(r.level, config));
  CHECK(r.objective == doctest::Approx(edit_distance(in, r.level, config).total));
}

TEST_CASE("maze repairs keep tunnels and leave no dead ends") {
  auto maze = load_level(testing::data_path("pacman/levels/maze01.txt"), pacman());
  auto freqs = object_frequencies(std::vector<Level>{maze}, pacman());
  auto in = corrupt(maze, 3, freqs, 5);
  auto r = repair(in, pacman(), quick());
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(oracle::playable(r.level, pacman()));
  CHECK(r.objective == doctest::Approx(edit_distance(in, r.level, pacman()).total));
}
