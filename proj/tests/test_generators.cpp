#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "flows.hpp"
#include "generators.hpp"
#include "helpers.hpp"
#include "metrics.hpp"

using namespace levelrepair;
using testing::code_of;
using testing::type_of;
using testing::zelda;

namespace {

std::vector<double> one_hot(int type, int n = 8) {
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  f[static_cast<std::size_t>(type)] = 1.0;
  return f;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path / name) << text; }
};

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(9, 4) == derive_seed(9, 4));
}

TEST_CASE("uniform helpers stay in range") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(uniform_below(rng, 7) < 7);
  }
  std::vector<double> w{0.0, 1.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(sample_index(rng, w) == 1);
  CHECK(code_of([&] { uniform_below(rng, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("random levels are deterministic per seed") {
  auto freqs = std::vector<double>{0.3, 0.5, 0.05, 0.05, 0.05, 0.05, 0.0, 0.0};
  auto a = generate_random(9, 13, freqs, 42);
  auto b = generate_random(9, 13, freqs, 42);
  auto c = generate_random(9, 13, freqs, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.count(6) == 0);
  CHECK(a.count(7) == 0);
}

TEST_CASE("one-hot frequencies give uniform levels") {
  auto l = generate_random(9, 13, one_hot(type_of(zelda(), "wall")), 1);
  CHECK(l.count(type_of(zelda(), "wall")) == 117);
}

TEST_CASE("sampled frequencies converge") {
  std::vector<double> freqs{0.5, 0.3, 0.2, 0, 0, 0, 0, 0};
  std::vector<Level> levels;
  for (int i = 0; i < 1000; ++i) levels.push_back(generate_random(9, 13, freqs, derive_seed(7, static_cast<std::uint64_t>(i))));
  auto got = object_frequencies(levels, zelda());
  for (std::size_t t = 0; t < freqs.size(); ++t) CHECK(std::abs(got[t] - freqs[t]) < 0.02);
}

TEST_CASE("bad frequencies") {
  CHECK(code_of([] { generate_random(2, 2, std::vector<double>{0.5, 0.4}, 1); }) == ErrorCode::kBadFrequencies);
  CHECK(code_of([] { generate_random(2, 2, std::vector<double>{1.5, -0.5}, 1); }) == ErrorCode::kBadFrequencies);
  CHECK(code_of([] { generate_random(2, 2, std::vector<double>{}, 1); }) == ErrorCode::kBadFrequencies);
  CHECK(code_of([] { generate_random(0, 2, std::vector<double>{1.0}, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("corruption") {
  auto base = load_level(testing::data_path("zelda/levels/lvl00.txt"), zelda());
  auto freqs = object_frequencies(std::vector<Level>{base}, zelda());
  CHECK(corrupt(base, 0, freqs, 3) == base);
  for (int k = 1; k <= 30; ++k) {
    auto c = corrupt(base, k, freqs, derive_seed(3, static_cast<std::uint64_t>(k)));
    CHECK(hamming(c, base) <= k);
    CHECK(c == corrupt(base, k, freqs, derive_seed(3, static_cast<std::uint64_t>(k))));
  }
  // resampling to a type that never occurs in the base changes exactly k cells
  auto to_key = one_hot(type_of(zelda(), "enemy3"));
  CHECK(hamming(corrupt(base, 17, to_key, 1), base) == 17);
  auto all = corrupt(base, base.size(), one_hot(type_of(zelda(), "empty")), 2);
  CHECK(all.count(type_of(zelda(), "empty")) == 117);
  CHECK(code_of([&] { corrupt(base, 118, freqs, 1); }) == ErrorCode::kKTooLarge);
  CHECK(code_of([&] { corrupt(base, -1, freqs, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("edit distance to the original grows with k") {
  auto corpus = load_corpus(testing::data_path("zelda/levels"), zelda());
  auto freqs = object_frequencies(corpus.levels, zelda());
  double previous = -1;
  for (int k : {1, 5, 15, 40}) {
    double sum = 0;
    for (int i = 0; i < 40; ++i) {
      const auto& base = corpus.levels[static_cast<std::size_t>(i) % corpus.levels.size()];
      sum += static_cast<double>(edit_distance(base, corrupt(base, k, freqs, derive_seed(k, i)), zelda()).total);
    }
    CHECK(sum / 40 > previous);
    previous = sum / 40;
  }
}

TEST_CASE("corpus loading") {
  auto corpus = load_corpus(testing::data_path("zelda/levels"), zelda());
  CHECK(corpus.levels.size() >= 5);
  CHECK(std::is_sorted(corpus.names.begin(), corpus.names.end()));
  CHECK(corpus.names.front() == "lvl00.txt");

  TempDir empty("levelrepair-empty-corpus");
  CHECK(code_of([&] { load_corpus(empty.path.string(), zelda()); }) == ErrorCode::kEmptyCorpus);

  TempDir mixed("levelrepair-mixed-corpus");
  mixed.write("a.txt", "www\nwAw\nwww\n");
  mixed.write("b.txt", "www\nw?w\nwww\n");
  mixed.write(".hidden", "garbage");
  try {
    load_corpus(mixed.path.string(), zelda());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCorpusParseError);
    CHECK(std::string(e.what()).find("b.txt") != std::string::npos);
    CHECK(std::string(e.what()).find("a.txt") == std::string::npos);
  }
  CHECK(code_of([] { load_corpus("/nonexistent/corpus", zelda()); }) == ErrorCode::kIoError);
}

TEST_CASE("batches") {
  auto corpus = load_corpus(testing::data_path("zelda/levels"), zelda());
  auto freqs = object_frequencies(corpus.levels, zelda());
  GeneratorSpec spec{GeneratorMode::kCorrupt, 9, 4};
  auto batch = generate_batch(spec, corpus.levels, freqs, 15, zelda());
  REQUIRE(batch.size() == 15);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(hamming(batch[i], corpus.levels[i % corpus.levels.size()]) <= 4);
    CHECK(batch[i] == corrupt(corpus.levels[i % corpus.levels.size()], 4, freqs, derive_seed(9, i)));
  }
  GeneratorSpec random{GeneratorMode::kRandomMultinomial, 9, 0};
  auto rnd = generate_batch(random, corpus.levels, freqs, 3, zelda());
  CHECK(rnd[0].rows() == 9);
  CHECK(rnd[0] == generate_random(9, 13, freqs, derive_seed(9, 0)));
}
