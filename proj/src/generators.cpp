#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>

#include "errors.hpp"

namespace levelrepair {

namespace {

void check_frequencies(std::span<const double> frequencies) {
  if (frequencies.empty()) throw Error(ErrorCode::kBadFrequencies, "no frequencies given");
  double sum = 0.0;
  for (double f : frequencies) {
    if (!std::isfinite(f) || f < 0.0) throw Error(ErrorCode::kBadFrequencies, "frequencies must be finite and >= 0");
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kBadFrequencies, "frequencies sum to " + std::to_string(sum) + ", not 1");
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "empty range");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

int sample_index(Rng& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;  // rounding left u at the very top
}

Level generate_random(int rows, int cols, std::span<const double> frequencies, std::uint64_t seed) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::kInvalidArgument, "level dimensions must be positive");
  check_frequencies(frequencies);
  Rng rng(seed);
  Level level(rows, cols, 0);
  for (int v = 0; v < level.size(); ++v) level.set(v, sample_index(rng, frequencies));
  return level;
}

Level corrupt(const Level& level, int k, std::span<const double> frequencies, std::uint64_t seed) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "k must be non-negative");
  if (k > level.size()) {
    throw Error(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " but the level has " +
                                           std::to_string(level.size()) + " cells");
  }
  check_frequencies(frequencies);
  Rng rng(seed);
  std::vector<int> cells(static_cast<std::size_t>(level.size()));
  std::iota(cells.begin(), cells.end(), 0);
  Level out = level;
  // partial Fisher-Yates picks k distinct cells
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + uniform_below(rng, static_cast<std::uint64_t>(level.size() - i));
    std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
    out.set(cells[static_cast<std::size_t>(i)], sample_index(rng, frequencies));
  }
  return out;
}

Corpus load_corpus(const std::string& directory, const GameConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw Error(ErrorCode::kIoError, "not a directory: " + directory);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    if (entry.is_regular_file() && entry.path().filename().string().front() != '.') files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::kIoError, "cannot list " + directory + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) throw Error(ErrorCode::kEmptyCorpus, "no level files in " + directory);

  Corpus corpus;
  std::string failures;
  for (const auto& f : files) {
    try {
      corpus.levels.push_back(load_level(f.string(), config));
      corpus.names.push_back(f.filename().string());
    } catch (const Error& e) {
      failures += "\n  " + f.filename().string() + ": " + e.what();
    }
  }
  if (!failures.empty()) throw Error(ErrorCode::kCorpusParseError, "in " + directory + ":" + failures);
  return corpus;
}

std::vector<Level> generate_batch(const GeneratorSpec& spec, std::span<const Level> source,
                                  std::span<const double> frequencies, int count, const GameConfig& config) {
  if (count < 0) throw Error(ErrorCode::kInvalidArgument, "count must be non-negative");
  std::vector<Level> out;
  out.reserve(static_cast<std::size_t>(count));
  if (spec.mode == GeneratorMode::kCorrupt) {
    if (source.empty()) throw Error(ErrorCode::kEmptyCorpus, "corrupt mode needs source levels");
    for (int i = 0; i < count; ++i) {
      const auto& base = source[static_cast<std::size_t>(i) % source.size()];
      out.push_back(corrupt(base, spec.corruption_count, frequencies, derive_seed(spec.seed, static_cast<std::uint64_t>(i))));
    }
    return out;
  }
  int rows = config.rows, cols = config.cols;
  if ((rows == 0 || cols == 0) && !source.empty()) {
    rows = rows ? rows : source.front().rows();
    cols = cols ? cols : source.front().cols();
  }
  if (rows == 0 || cols == 0) throw Error(ErrorCode::kInvalidArgument, "level size unknown: set rows/cols in the config");
  for (int i = 0; i < count; ++i) {
    out.push_back(generate_random(rows, cols, frequencies, derive_seed(spec.seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

}  // namespace levelrepair
