#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "level.hpp"

namespace levelrepair {

// All sampling goes through std::mt19937_64, whose output sequence is fixed by
// the standard. The std distributions are not, so the helpers below do their
// own conversion from raw 64-bit words.
using Rng = std::mt19937_64;

// splitmix64 finaliser of (seed, index); gives each level of a batch its own stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Uniform in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform in [0, bound) without modulo bias.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Index drawn with probability proportional to weights[i].
int sample_index(Rng& rng, std::span<const double> weights);

// Frequencies are indexed by type id and must sum to 1 within 1e-9.
Level generate_random(int rows, int cols, std::span<const double> frequencies, std::uint64_t seed);

// Resamples k distinct cells from the frequencies.
Level corrupt(const Level& level, int k, std::span<const double> frequencies, std::uint64_t seed);

struct Corpus {
  std::vector<std::string> names;  // file names, sorted
  std::vector<Level> levels;
};

// Every regular file in the directory, in file-name order. Parse failures are
// collected and reported together.
Corpus load_corpus(const std::string& directory, const GameConfig& config);

enum class GeneratorMode { kRandomMultinomial, kCorrupt };

struct GeneratorSpec {
  GeneratorMode mode = GeneratorMode::kRandomMultinomial;
  std::uint64_t seed = 0;
  int corruption_count = 0;
};

// Level i uses derive_seed(spec.seed, i). Random mode takes its size from
// `source` (first level) when the config leaves it open; corrupt mode
// corrupts source[i % size].
std::vector<Level> generate_batch(const GeneratorSpec& spec, std::span<const Level> source,
                                  std::span<const double> frequencies, int count, const GameConfig& config);

}  // namespace levelrepair
