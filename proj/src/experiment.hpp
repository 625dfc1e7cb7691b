#pragma once

#include <cstdint>
#include <string>

#include "level.hpp"
#include "metrics.hpp"

namespace levelrepair {

struct ExperimentOptions {
  std::string corpus_dir;  // human-authored levels
  std::uint64_t seed = 0;
  int count = 10;  // levels per generated corpus
  int corrupt_k = 10;
  int jobs = 1;
  // Repairs stop on nodes, never on wall-clock time, so reports do not
  // depend on machine speed.
  long long node_limit = 5000;
  MetricsOptions metrics;
};

// Corrupts the human corpus and samples the multinomial baseline, repairs
// both, and returns a text report with a table, per-level edit lines and
// JSON records. Contains no timings.
std::string run_experiment(const GameConfig& config, const ExperimentOptions& options);

}  // namespace levelrepair
