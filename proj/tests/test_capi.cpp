#include <cstdlib>
#include <cstring>
#include <string>

#include "doctest.h"
#include "levelrepair/levelrepair.h"

namespace {

std::string data(const char* rel) { return std::string(LEVELREPAIR_DATA_DIR) + "/" + rel; }

struct Fixture {
  lr_config* config = nullptr;
  lr_level* level = nullptr;
  Fixture() {
    REQUIRE(lr_config_load(data("zelda/zelda.cfg").c_str(), &config) == LR_OK);
    REQUIRE(lr_level_load(config, data("zelda/levels/lvl00.txt").c_str(), &level) == LR_OK);
  }
  ~Fixture() {
    lr_level_free(level);
    lr_config_free(config);
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  lr_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(lr_status_name(LR_OK)) == "Ok");
  CHECK(std::string(lr_status_name(LR_UNKNOWN_GLYPH)) == "UnknownGlyph");
  lr_config* cfg = nullptr;
  CHECK(lr_config_load("/nonexistent.cfg", &cfg) == LR_IO_ERROR);
  CHECK(cfg == nullptr);
  CHECK(std::string(lr_last_error()).find("IoError") == 0);
  CHECK(lr_config_load(nullptr, &cfg) == LR_INVALID_ARGUMENT);
}

TEST_CASE_FIXTURE(Fixture, "levels") {
  CHECK(std::string(lr_config_name(config)) == "zelda");
  CHECK(lr_level_rows(level) == 9);
  CHECK(lr_level_cols(level) == 13);
  char* text = nullptr;
  REQUIRE(lr_level_render(config, level, &text) == LR_OK);
  std::string rendered = take(text);
  CHECK(rendered.rfind("wwwwwwwwwwwww\nwA", 0) == 0);
  lr_level* copy = lr_level_clone(level);
  CHECK(lr_level_equal(copy, level) == 1);
  lr_level_free(copy);
  lr_level* bad = nullptr;
  CHECK(lr_level_parse(config, "www\nw?w\n", &bad) == LR_UNKNOWN_GLYPH);
  CHECK(std::string(lr_last_error()).find("UnknownGlyph") == 0);
  CHECK(lr_level_parse(config, "ww\nw\n", &bad) == LR_RAGGED_ROWS);
  CHECK(lr_level_parse(config, "", &bad) == LR_EMPTY_INPUT);
}

TEST_CASE_FIXTURE(Fixture, "validation and distances") {
  int playable = -1;
  REQUIRE(lr_validate(config, level, &playable, nullptr) == LR_OK);
  CHECK(playable == 1);
  lr_level* broken = nullptr;
  std::string text = "wwwwwwwwwwwww\nwA.......w..w\nw..w........w\nw...w...w..ww\nwww.w2..wwwww\n"
                     "w.......w.g.w\nw.2.........w\nw.....2.....w\nwwwwwwwwwwwww\n";
  REQUIRE(lr_level_parse(config, text.c_str(), &broken) == LR_OK);
  char* violations = nullptr;
  REQUIRE(lr_validate(config, broken, &playable, &violations) == LR_OK);
  CHECK(playable == 0);
  CHECK(take(violations).find("CountMismatch(key, 0, 1)") != std::string::npos);
  long long h = -1, e = -1;
  CHECK(lr_hamming(level, broken, &h) == LR_OK);
  CHECK(h == 1);
  CHECK(lr_edit_distance(config, level, broken, &e) == LR_OK);
  CHECK(e == 10);
  size_t vars = 0, cons = 0;
  CHECK(lr_compile_stats(config, level, &vars, &cons) == LR_OK);
  CHECK(vars == 6858);
  CHECK(cons == 2777);

  lr_repair_options opts;
  lr_repair_options_init(&opts);
  opts.time_limit_seconds = 60;
  lr_repair_result* result = nullptr;
  REQUIRE(lr_repair(config, broken, &opts, &result) == LR_OK);
  CHECK(std::string(lr_repair_result_status(result)) == "optimal");
  CHECK(lr_repair_result_objective(result) == 10.0);
  CHECK(lr_repair_result_bound(result) == 10.0);
  CHECK(lr_repair_result_nodes(result) >= 0);
  CHECK(lr_repair_result_seconds(result) >= 0.0);
  CHECK(std::string(lr_repair_result_report(result)).find("total 10") != std::string::npos);
  REQUIRE(lr_validate(config, lr_repair_result_level(result), &playable, nullptr) == LR_OK);
  CHECK(playable == 1);
  lr_repair_result_free(result);
  lr_level_free(broken);

  lr_level* small = nullptr;
  REQUIRE(lr_level_parse(config, "www\nwAw\nwww\n", &small) == LR_OK);
  CHECK(lr_hamming(level, small, &h) == LR_DIMENSION_MISMATCH);
  CHECK(lr_repair(config, small, &opts, &result) == LR_CONFIG_MISMATCH);
  lr_level_free(small);
}

TEST_CASE_FIXTURE(Fixture, "corpora, generation and metrics") {
  lr_corpus* human = nullptr;
  REQUIRE(lr_corpus_load(config, data("zelda/levels").c_str(), &human) == LR_OK);
  CHECK(lr_corpus_size(human) >= 5);
  CHECK(std::string(lr_corpus_name(human, 0)) == "lvl00.txt");
  CHECK(lr_level_equal(lr_corpus_level(human, 0), level) == 1);
  CHECK(lr_corpus_level(human, 1000) == nullptr);

  lr_generate_options g;
  lr_generate_options_init(&g);
  g.mode = LR_MODE_CORRUPT;
  g.count = 5;
  g.corrupt_k = 3;
  g.seed = 11;
  lr_corpus* corrupted = nullptr;
  REQUIRE(lr_generate(config, human, &g, &corrupted) == LR_OK);
  CHECK(lr_corpus_size(corrupted) == 5);
  CHECK(std::string(lr_corpus_name(corrupted, 2)) == "level0002.txt");

  double bad_freq[2] = {0.5, 0.2};
  g.frequencies = bad_freq;
  g.num_frequencies = 2;
  lr_corpus* nothing = nullptr;
  CHECK(lr_generate(config, human, &g, &nothing) == LR_BAD_FREQUENCIES);

  lr_metrics_options m;
  lr_metrics_options_init(&m);
  double kl = -1;
  REQUIRE(lr_tile_pattern_kl(human, human, &m, &kl) == LR_OK);
  CHECK(kl == doctest::Approx(0.0));
  REQUIRE(lr_tile_pattern_kl(corrupted, human, &m, &kl) == LR_OK);
  CHECK(kl > 0.0);
  char* table = nullptr;
  char* jsonl = nullptr;
  REQUIRE(lr_metrics(config, corrupted, human, &m, &table, &jsonl) == LR_OK);
  CHECK(take(table).find("playable") != std::string::npos);
  CHECK(take(jsonl).find("\"kl_to_reference\"") != std::string::npos);

  lr_corpus* mine = lr_corpus_new();
  CHECK(lr_corpus_add(mine, "x.txt", level) == LR_OK);
  CHECK(lr_corpus_add(mine, "y.txt", nullptr) == LR_INVALID_ARGUMENT);
  CHECK(lr_corpus_size(mine) == 1);
  lr_corpus* empty = lr_corpus_new();
  CHECK(lr_tile_pattern_kl(empty, human, &m, &kl) == LR_EMPTY_CORPUS);
  lr_corpus_free(empty);
  lr_corpus_free(mine);
  lr_corpus_free(corrupted);
  lr_corpus_free(human);
}

TEST_CASE_FIXTURE(Fixture, "experiment report") {
  lr_experiment_options x;
  lr_experiment_options_init(&x);
  std::string dir = data("zelda/levels");
  x.corpus_dir = dir.c_str();
  x.seed = 3;
  x.count = 2;
  x.corrupt_k = 2;
  x.node_limit = 200;
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(lr_experiment(config, &x, &a) == LR_OK);
  REQUIRE(lr_experiment(config, &x, &b) == LR_OK);
  std::string ra = take(a), rb = take(b);
  CHECK(ra == rb);
  CHECK(ra.find("experiment game=zelda seed=3") == 0);
  x.count = 0;
  CHECK(lr_experiment(config, &x, &a) == LR_INVALID_ARGUMENT);
}
