#include "experiment.hpp"

#include <cstdio>
#include <limits>

#include "errors.hpp"
#include "flows.hpp"
#include "generators.hpp"
#include "parallel.hpp"
#include "repair.hpp"

namespace levelrepair {

namespace {

struct Repaired {
  std::vector<Level> levels;
  std::vector<RepairResult> results;
};

Repaired repair_all(const std::vector<Level>& inputs, const GameConfig& config, const ExperimentOptions& options) {
  Repaired out;
  out.results.resize(inputs.size());
  parallel_for(inputs.size(), options.jobs, [&](std::size_t i) {
    RepairOptions ro;
    ro.solver.node_limit = options.node_limit;
    ro.solver.time_limit_seconds = std::numeric_limits<double>::infinity();
    out.results[i] = repair(inputs[i], config, ro);
  });
  for (const auto& r : out.results) out.levels.push_back(r.level);
  return out;
}

std::string edit_lines(const std::string& label, const std::vector<Level>& inputs, const Repaired& repaired,
                       const GameConfig& config) {
  std::string out;
  long long optimal = 0, playable = 0, hsum = 0, esum = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& r = repaired.results[i];
    const long long h = hamming(inputs[i], r.level);
    const long long e = edit_distance(inputs[i], r.level, config).total;
    const bool ok = validate_playable(r.level, config).ok();
    optimal += r.status == SolveStatus::kOptimal ? 1 : 0;
    playable += ok ? 1 : 0;
    hsum += h;
    esum += e;
    char line[160];
    std::snprintf(line, sizeof line, "  %s[%zu] hamming %lld edit %lld bound %.0f %s %s\n", label.c_str(), i, h, e,
                  r.best_bound, solve_status_name(r.status), ok ? "playable" : "UNPLAYABLE");
    out += line;
  }
  const double n = inputs.empty() ? 1.0 : static_cast<double>(inputs.size());
  char summary[200];
  std::snprintf(summary, sizeof summary, "%s: %lld/%zu playable, %lld/%zu proven optimal, mean hamming %.2f, mean edit %.2f\n",
                label.c_str(), playable, inputs.size(), optimal, inputs.size(), static_cast<double>(hsum) / n,
                static_cast<double>(esum) / n);
  return summary + out;
}

}  // namespace

std::string run_experiment(const GameConfig& config, const ExperimentOptions& options) {
  if (options.count <= 0) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
  const auto human = load_corpus(options.corpus_dir, config);
  const auto frequencies = object_frequencies(human.levels, config);

  GeneratorSpec corrupt_spec{GeneratorMode::kCorrupt, options.seed, options.corrupt_k};
  // the random corpus gets its own stream so it does not mirror the corruptions
  GeneratorSpec random_spec{GeneratorMode::kRandomMultinomial, derive_seed(options.seed, 0x72616e646f6dULL), 0};
  const auto corrupted = generate_batch(corrupt_spec, human.levels, frequencies, options.count, config);
  const auto random = generate_batch(random_spec, human.levels, frequencies, options.count, config);

  const auto repaired = repair_all(corrupted, config, options);
  const auto mip_random = repair_all(random, config, options);

  std::vector<std::pair<std::string, CorpusReport>> rows;
  rows.emplace_back("human", corpus_report(human.levels, human.levels, config, options.metrics));
  rows.emplace_back("corrupted", corpus_report(corrupted, human.levels, config, options.metrics));
  rows.emplace_back("repaired", corpus_report(repaired.levels, human.levels, config, options.metrics));
  rows.emplace_back("random", corpus_report(random, human.levels, config, options.metrics));
  rows.emplace_back("mip_random", corpus_report(mip_random.levels, human.levels, config, options.metrics));

  std::string out;
  char header[256];
  std::snprintf(header, sizeof header,
                "experiment game=%s seed=%llu count=%d corrupt_k=%d node_limit=%lld human_levels=%zu\n"
                "kl direction=%s epsilon=%g\n\n",
                config.name.c_str(), static_cast<unsigned long long>(options.seed), options.count, options.corrupt_k,
                options.node_limit, human.levels.size(),
                options.metrics.direction == KlDirection::kGeneratedToReference ? "generated||reference"
                                                                                : "reference||generated",
                options.metrics.epsilon);
  out += header;
  out += report_table(rows, config);
  out += "\nrepairs (input to output)\n";
  out += edit_lines("repaired", corrupted, repaired, config);
  out += edit_lines("mip_random", random, mip_random, config);
  out += "\nrecords\n";
  out += report_jsonl(rows, config);
  return out;
}

}  // namespace levelrepair
