#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "doctest.h"
#include "errors.hpp"
#include "generators.hpp"
#include "helpers.hpp"
#include "level.hpp"

using namespace levelrepair;
using testing::code_of;
using testing::data_path;
using testing::type_of;
using testing::zelda;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// directed edge count: every adjacent pair twice, plus wrap pairs on dims >= 3
long long expected_edges(int rows, int cols, bool wrap) {
  long long undirected = static_cast<long long>(rows) * (cols - 1) + static_cast<long long>(cols) * (rows - 1);
  if (wrap) {
    if (cols >= 3) undirected += rows;
    if (rows >= 3) undirected += cols;
  }
  return 2 * undirected;
}

}  // namespace

TEST_CASE("bundled configs parse") {
  const auto& z = zelda();
  CHECK(z.name == "zelda");
  CHECK(z.num_types() == 8);
  CHECK(z.rows == 9);
  CHECK(z.cols == 13);
  CHECK(z.delete_cost == 10);
  CHECK(z.move_cost == 1);
  REQUIRE(z.density_constraints.size() == 1);
  CHECK(z.density_constraints[0].max_fraction.num == 3);
  CHECK(z.density_constraints[0].max_fraction.den == 5);
  CHECK(z.is_blocking(type_of(z, "door")));
  CHECK_FALSE(z.is_blocking(type_of(z, "key")));
  const auto& p = testing::pacman();
  CHECK(p.wraparound);
  CHECK(p.no_dead_ends);
  CHECK_FALSE(p.border_object.has_value());
}

TEST_CASE("config errors") {
  CHECK(code_of([] { parse_config("object = wall w\nobject = floor w\n"); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config("object = wall w\nsources = ghost\n"); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config("object = wall w\ndelete_cost = x\n"); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config("object = a x\nobject = b y\ntargets = a\n"); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config("object = a x\ndensity = 3/2 a\n"); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { load_config("/nonexistent/x.cfg"); }) == ErrorCode::kIoError);
}

TEST_CASE("density accepts decimals as exact fractions") {
  auto c = parse_config("object = a x\nobject = b y\ndensity = 0.25 b\n");
  REQUIRE(c.density_constraints.size() == 1);
  CHECK(c.density_constraints[0].max_fraction.num == 1);
  CHECK(c.density_constraints[0].max_fraction.den == 4);
}

TEST_CASE("parse and render round-trip on bundled levels") {
  for (const char* rel : {"zelda/levels/lvl00.txt", "zelda/levels/lvl05.txt", "zelda/levels/lvl11.txt"}) {
    auto text = slurp(data_path(rel));
    auto level = parse_level(text, zelda());
    CHECK(level.rows() == 9);
    CHECK(level.cols() == 13);
    CHECK(render_level(level, zelda()) == text);
    CHECK(parse_level(render_level(level, zelda()), zelda()) == level);
  }
  auto maze = load_level(data_path("pacman/levels/maze00.txt"), testing::pacman());
  CHECK(render_level(maze, testing::pacman()) == slurp(data_path("pacman/levels/maze00.txt")));
}

TEST_CASE("parse tolerates CRLF and trailing blank lines") {
  auto a = parse_level("www\nwAw\nwww\n", zelda());
  auto b = parse_level("www\r\nwAw\r\nwww\r\n\r\n", zelda());
  CHECK(a == b);
}

TEST_CASE("level parse errors") {
  CHECK(code_of([] { parse_level("www\nwxw\nwww\n", zelda()); }) == ErrorCode::kUnknownGlyph);
  CHECK(code_of([] { parse_level("www\nww\nwww\n", zelda()); }) == ErrorCode::kRaggedRows);
  CHECK(code_of([] { parse_level("", zelda()); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([] { parse_level("\n\n", zelda()); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([] { load_level("/nonexistent/level.txt", zelda()); }) == ErrorCode::kIoError);
  try {
    parse_level("www\nw?w\n", zelda());
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("perimeter and counts") {
  Level l(3, 4, 1);
  l.set(1, 1, 0);
  CHECK(l.count(1) == 11);
  CHECK(l.count(0) == 1);
  CHECK(l.on_perimeter(0));
  CHECK(l.on_perimeter(7));
  CHECK_FALSE(l.on_perimeter(5));
  CHECK_FALSE(l.on_perimeter(6));
  CHECK(code_of([] { Level(0, 3, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Level(2, 2, std::vector<int>{1, 2, 3}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("space graph edge counts") {
  CHECK(SpaceGraph(9, 13, false).edges().size() == 424);
  CHECK(SpaceGraph(9, 13, true).edges().size() == 468);
  CHECK(SpaceGraph(1, 1, false).edges().empty());
  CHECK(SpaceGraph(1, 1, true).edges().empty());
  for (int r = 1; r <= 50; r += 7) {
    for (int c = 1; c <= 50; c += 3) {
      for (bool wrap : {false, true}) {
        CAPTURE(r);
        CAPTURE(c);
        CAPTURE(wrap);
        CHECK(static_cast<long long>(SpaceGraph(r, c, wrap).edges().size()) == expected_edges(r, c, wrap));
      }
    }
  }
  for (int r = 1; r <= 4; ++r) {
    for (int c = 1; c <= 4; ++c) {
      CHECK(static_cast<long long>(SpaceGraph(r, c, true).edges().size()) == expected_edges(r, c, true));
    }
  }
}

TEST_CASE("space graph is symmetric and adjacency lists agree") {
  for (bool wrap : {false, true}) {
    SpaceGraph g(5, 7, wrap);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : g.edges()) {
      CHECK(e.from != e.to);
      CHECK(seen.insert({e.from, e.to}).second);
    }
    for (const auto& e : g.edges()) CHECK(seen.count({e.to, e.from}) == 1);
    for (int v = 0; v < g.node_count(); ++v) {
      CHECK(g.out_edges(v).size() == g.in_edges(v).size());
      for (int e : g.out_edges(v)) CHECK(g.edges()[static_cast<std::size_t>(e)].from == v);
      for (int e : g.in_edges(v)) CHECK(g.edges()[static_cast<std::size_t>(e)].to == v);
      CHECK(g.neighbors(v).size() == g.out_edges(v).size());
    }
  }
}

TEST_CASE("distance follows wraparound") {
  SpaceGraph flat(5, 7, false);
  SpaceGraph torus(5, 7, true);
  CHECK(flat.distance(0, 6) == 6);
  CHECK(torus.distance(0, 6) == 1);
  CHECK(flat.distance(0, 34) == 10);
  CHECK(torus.distance(0, 34) == 2);
  CHECK(torus.distance(8, 8) == 0);
}

TEST_CASE("object frequencies") {
  Level a(2, 2, std::vector<int>{0, 0, 1, 2});
  Level b(2, 2, std::vector<int>{1, 1, 1, 1});
  std::vector<Level> corpus{a, b};
  auto f = object_frequencies(corpus, zelda());
  REQUIRE(f.size() == 8);
  CHECK(f[0] == doctest::Approx(0.25));
  CHECK(f[1] == doctest::Approx(0.625));
  CHECK(f[2] == doctest::Approx(0.125));
  CHECK(f[3] == 0.0);
  std::vector<Level> none;
  CHECK(code_of([&] { object_frequencies(none, zelda()); }) == ErrorCode::kEmptyCorpus);
}
