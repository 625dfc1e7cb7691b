#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "level.hpp"

namespace levelrepair {

// Number of cells whose object types differ.
long long hamming(const Level& a, const Level& b);

enum class KlDirection { kGeneratedToReference, kReferenceToGenerated };

// KL divergence between the 2x2 tile-pattern distributions of two corpora.
// Windows slide with stride 1 and no wraparound. Both distributions get
// `epsilon` added on every pattern of the union support, then are renormalised.
double tile_pattern_kl(std::span<const Level> generated, std::span<const Level> reference, double epsilon = 1e-5,
                       KlDirection direction = KlDirection::kGeneratedToReference);

struct MetricsOptions {
  double epsilon = 1e-5;
  KlDirection direction = KlDirection::kGeneratedToReference;
  int jobs = 1;
};

struct CorpusReport {
  std::size_t size = 0;
  double playable_fraction = 0.0;
  double duplicate_fraction = 0.0;
  double playable_and_unique_fraction = 0.0;

  // Unordered pairs inside the corpus; zero when it has fewer than two levels.
  double mean_pairwise_hamming = 0.0;
  double mean_pairwise_edit = 0.0;
  // Every (level, reference level) pair.
  double mean_hamming_to_reference = 0.0;
  double mean_edit_to_reference = 0.0;

  std::vector<double> tile_frequency;  // by type id
  double kl_to_reference = 0.0;

  // Shortest path between the configured endpoints; only levels where both
  // are unique and connected contribute.
  std::map<int, int> path_histogram;
  std::size_t path_count = 0;
  double mean_path = 0.0;
};

CorpusReport corpus_report(std::span<const Level> levels, std::span<const Level> reference, const GameConfig& config,
                           const MetricsOptions& options = {});

// Human-readable table for one or more labelled reports.
std::string report_table(const std::vector<std::pair<std::string, CorpusReport>>& rows, const GameConfig& config);

// One JSON object per line, each tagged with its label.
std::string report_jsonl(const std::vector<std::pair<std::string, CorpusReport>>& rows, const GameConfig& config);

}  // namespace levelrepair
