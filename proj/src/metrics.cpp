#include "metrics.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

#include "json.hpp"

#include "errors.hpp"
#include "flows.hpp"
#include "parallel.hpp"

namespace levelrepair {

namespace {

void require_same_shape(const Level& a, const Level& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                                                   std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

using PatternCounts = std::map<std::uint64_t, long long>;

PatternCounts count_patterns(std::span<const Level> corpus, long long& total) {
  PatternCounts counts;
  total = 0;
  for (const auto& level : corpus) {
    if (level.rows() < 2 || level.cols() < 2) {
      throw Error(ErrorCode::kGridTooSmall, "tile patterns need at least 2x2 levels");
    }
    for (int r = 0; r + 1 < level.rows(); ++r) {
      for (int c = 0; c + 1 < level.cols(); ++c) {
        // 16 bits per tile is plenty for any alphabet
        const auto key = (static_cast<std::uint64_t>(level.at(r, c)) << 48) |
                         (static_cast<std::uint64_t>(level.at(r, c + 1)) << 32) |
                         (static_cast<std::uint64_t>(level.at(r + 1, c)) << 16) |
                         static_cast<std::uint64_t>(level.at(r + 1, c + 1));
        ++counts[key];
        ++total;
      }
    }
  }
  return counts;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

long long hamming(const Level& a, const Level& b) {
  require_same_shape(a, b);
  long long diff = 0;
  for (int v = 0; v < a.size(); ++v) diff += a[v] != b[v] ? 1 : 0;
  return diff;
}

double tile_pattern_kl(std::span<const Level> generated, std::span<const Level> reference, double epsilon,
                       KlDirection direction) {
  if (generated.empty() || reference.empty()) throw Error(ErrorCode::kEmptyCorpus, "KL needs two non-empty corpora");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  long long total_p = 0, total_q = 0;
  const auto p_counts = count_patterns(generated, total_p);
  const auto q_counts = count_patterns(reference, total_q);
  std::set<std::uint64_t> support;
  for (const auto& [k, n] : p_counts) support.insert(k);
  for (const auto& [k, n] : q_counts) support.insert(k);

  const double size = static_cast<double>(support.size());
  const double norm_p = 1.0 + epsilon * size;
  const double norm_q = 1.0 + epsilon * size;
  auto prob = [&](const PatternCounts& counts, long long total, std::uint64_t key, double norm) {
    const auto it = counts.find(key);
    const double raw = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    return (raw + epsilon) / norm;
  };
  double kl = 0.0;
  for (std::uint64_t key : support) {
    double p = prob(p_counts, total_p, key, norm_p);
    double q = prob(q_counts, total_q, key, norm_q);
    if (direction == KlDirection::kReferenceToGenerated) std::swap(p, q);
    kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

CorpusReport corpus_report(std::span<const Level> levels, std::span<const Level> reference, const GameConfig& config,
                           const MetricsOptions& options) {
  if (levels.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no levels");
  if (reference.empty()) throw Error(ErrorCode::kEmptyCorpus, "reference corpus has no levels");
  for (const auto& l : levels) require_same_shape(levels[0], l);
  for (const auto& l : reference) require_same_shape(levels[0], l);

  CorpusReport report;
  const std::size_t n = levels.size();
  report.size = n;

  std::vector<char> playable(n, 0);
  parallel_for(n, options.jobs, [&](std::size_t i) { playable[i] = validate_playable(levels[i], config).ok() ? 1 : 0; });

  std::size_t playable_count = 0, duplicates = 0, playable_unique = 0;
  for (std::size_t i = 0; i < n; ++i) {
    playable_count += playable[i];
    bool seen_before = false;
    for (std::size_t j = 0; j < i && !seen_before; ++j) seen_before = levels[j] == levels[i];
    if (seen_before) {
      ++duplicates;
    } else if (playable[i]) {
      ++playable_unique;
    }
  }
  report.playable_fraction = static_cast<double>(playable_count) / static_cast<double>(n);
  report.duplicate_fraction = static_cast<double>(duplicates) / static_cast<double>(n);
  report.playable_and_unique_fraction = static_cast<double>(playable_unique) / static_cast<double>(n);

  // Integer sums keep the means independent of the thread count.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<long long> pair_ham(pairs.size()), pair_edit(pairs.size());
  parallel_for(pairs.size(), options.jobs, [&](std::size_t k) {
    const auto& a = levels[pairs[k].first];
    const auto& b = levels[pairs[k].second];
    pair_ham[k] = hamming(a, b);
    pair_edit[k] = edit_distance(a, b, config).total;
  });
  long long sum_ham = 0, sum_edit = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    sum_ham += pair_ham[k];
    sum_edit += pair_edit[k];
  }
  if (!pairs.empty()) {
    report.mean_pairwise_hamming = static_cast<double>(sum_ham) / static_cast<double>(pairs.size());
    report.mean_pairwise_edit = static_cast<double>(sum_edit) / static_cast<double>(pairs.size());
  }

  const std::size_t cross = n * reference.size();
  std::vector<long long> cross_ham(cross), cross_edit(cross);
  parallel_for(cross, options.jobs, [&](std::size_t k) {
    const auto& a = levels[k / reference.size()];
    const auto& b = reference[k % reference.size()];
    cross_ham[k] = hamming(a, b);
    cross_edit[k] = edit_distance(a, b, config).total;
  });
  sum_ham = sum_edit = 0;
  for (std::size_t k = 0; k < cross; ++k) {
    sum_ham += cross_ham[k];
    sum_edit += cross_edit[k];
  }
  report.mean_hamming_to_reference = static_cast<double>(sum_ham) / static_cast<double>(cross);
  report.mean_edit_to_reference = static_cast<double>(sum_edit) / static_cast<double>(cross);

  report.tile_frequency = object_frequencies(levels, config);
  report.kl_to_reference = tile_pattern_kl(levels, reference, options.epsilon, options.direction);

  if (config.path_from && config.path_to) {
    long long path_sum = 0;
    for (const auto& level : levels) {
      if (level.count(*config.path_from) != 1 || level.count(*config.path_to) != 1) continue;
      const auto len = min_path_length(level, *config.path_from, *config.path_to, config);
      if (!len) continue;
      ++report.path_histogram[*len];
      ++report.path_count;
      path_sum += *len;
    }
    if (report.path_count > 0) report.mean_path = static_cast<double>(path_sum) / static_cast<double>(report.path_count);
  }
  return report;
}

std::string report_table(const std::vector<std::pair<std::string, CorpusReport>>& rows, const GameConfig& config) {
  std::size_t label_width = 6;
  for (const auto& [label, r] : rows) label_width = std::max(label_width, label.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  auto left = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };

  std::string out = left("corpus", label_width) + pad("n", 5) + pad("playable", 10) + pad("dup", 8) +
                    pad("play+uniq", 11) + pad("ham", 9) + pad("edit", 9) + pad("ham_ref", 9) + pad("edit_ref", 10) +
                    pad("kl", 9) + pad("path", 8) + "\n";
  for (const auto& [label, r] : rows) {
    out += left(label, label_width) + pad(std::to_string(r.size), 5) + pad(fixed(r.playable_fraction * 100, 1) + "%", 10) +
           pad(fixed(r.duplicate_fraction * 100, 1) + "%", 8) +
           pad(fixed(r.playable_and_unique_fraction * 100, 1) + "%", 11) + pad(fixed(r.mean_pairwise_hamming, 2), 9) +
           pad(fixed(r.mean_pairwise_edit, 2), 9) + pad(fixed(r.mean_hamming_to_reference, 2), 9) +
           pad(fixed(r.mean_edit_to_reference, 2), 10) + pad(fixed(r.kl_to_reference, 4), 9) +
           pad(r.path_count ? fixed(r.mean_path, 2) : std::string("-"), 8) + "\n";
  }

  out += "\ntile frequencies\n" + left("corpus", label_width);
  for (int t = 0; t < config.num_types(); ++t) out += pad(config.type_name(t), 13);
  out += "\n";
  for (const auto& [label, r] : rows) {
    out += left(label, label_width);
    for (double f : r.tile_frequency) out += pad(fixed(f, 4), 13);
    out += "\n";
  }

  if (config.path_from && config.path_to) {
    out += "\npath lengths (" + config.type_name(*config.path_from) + " to " + config.type_name(*config.path_to) + ")\n";
    for (const auto& [label, r] : rows) {
      out += left(label, label_width) + " ";
      if (r.path_histogram.empty()) out += " -";
      for (const auto& [len, count] : r.path_histogram) out += " " + std::to_string(len) + ":" + std::to_string(count);
      out += "\n";
    }
  }
  return out;
}

std::string report_jsonl(const std::vector<std::pair<std::string, CorpusReport>>& rows, const GameConfig& config) {
  std::string out;
  for (const auto& [label, r] : rows) {
    nlohmann::ordered_json j;
    j["corpus"] = label;
    j["size"] = r.size;
    j["playable_fraction"] = r.playable_fraction;
    j["duplicate_fraction"] = r.duplicate_fraction;
    j["playable_and_unique_fraction"] = r.playable_and_unique_fraction;
    j["mean_pairwise_hamming"] = r.mean_pairwise_hamming;
    j["mean_pairwise_edit"] = r.mean_pairwise_edit;
    j["mean_hamming_to_reference"] = r.mean_hamming_to_reference;
    j["mean_edit_to_reference"] = r.mean_edit_to_reference;
    j["kl_to_reference"] = r.kl_to_reference;
    auto& freq = j["tile_frequency"] = nlohmann::ordered_json::object();
    for (int t = 0; t < config.num_types() && static_cast<std::size_t>(t) < r.tile_frequency.size(); ++t) {
      freq[config.type_name(t)] = r.tile_frequency[static_cast<std::size_t>(t)];
    }
    auto& hist = j["path_histogram"] = nlohmann::ordered_json::object();
    for (const auto& [len, count] : r.path_histogram) hist[std::to_string(len)] = count;
    j["path_count"] = r.path_count;
    j["mean_path"] = r.mean_path;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace levelrepair
