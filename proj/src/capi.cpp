#include "levelrepair/levelrepair.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "errors.hpp"
#include "experiment.hpp"
#include "flows.hpp"
#include "generators.hpp"
#include "level.hpp"
#include "metrics.hpp"
#include "repair.hpp"

using namespace levelrepair;

struct lr_config {
  GameConfig config;
};

struct lr_level {
  Level level;
};

struct lr_corpus {
  std::vector<std::string> names;
  std::vector<lr_level> items;

  std::vector<Level> levels() const {
    std::vector<Level> out;
    out.reserve(items.size());
    for (const auto& i : items) out.push_back(i.level);
    return out;
  }
};

struct lr_repair_result {
  lr_level level;
  std::string report;
  RepairResult result;
};

namespace {

thread_local std::string last_error;

lr_status fail(lr_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body, turning exceptions into status codes and the thread's last error.
template <typename F>
lr_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LR_OK;
  } catch (const Error& e) {
    return fail(static_cast<lr_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LR_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(LR_INTERNAL_ERROR, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

MetricsOptions to_metrics(const lr_metrics_options* o) {
  MetricsOptions m;
  if (!o) return m;
  m.epsilon = o->epsilon;
  m.direction = o->direction == LR_KL_REFERENCE_TO_GENERATED ? KlDirection::kReferenceToGenerated
                                                              : KlDirection::kGeneratedToReference;
  m.jobs = o->jobs;
  return m;
}

}  // namespace

extern "C" {

const char* lr_last_error(void) { return last_error.c_str(); }

const char* lr_status_name(lr_status status) {
  if (status == LR_OK) return "Ok";
  if (status == LR_INTERNAL_ERROR) return "InternalError";
  return error_code_name(static_cast<ErrorCode>(status));
}

void lr_string_free(char* text) { std::free(text); }

lr_status lr_config_load(const char* path, lr_config** out) {
  return guarded([&] {
    require(path && out, "path and out");
    *out = new lr_config{load_config(path)};
  });
}

lr_status lr_config_parse(const char* text, lr_config** out) {
  return guarded([&] {
    require(text && out, "text and out");
    *out = new lr_config{parse_config(text)};
  });
}

void lr_config_free(lr_config* config) { delete config; }

const char* lr_config_name(const lr_config* config) { return config ? config->config.name.c_str() : ""; }

lr_status lr_level_load(const lr_config* config, const char* path, lr_level** out) {
  return guarded([&] {
    require(config && path && out, "config, path and out");
    *out = new lr_level{load_level(path, config->config)};
  });
}

lr_status lr_level_parse(const lr_config* config, const char* text, lr_level** out) {
  return guarded([&] {
    require(config && text && out, "config, text and out");
    *out = new lr_level{parse_level(text, config->config)};
  });
}

lr_level* lr_level_clone(const lr_level* level) { return level ? new (std::nothrow) lr_level{level->level} : nullptr; }

void lr_level_free(lr_level* level) { delete level; }

int lr_level_rows(const lr_level* level) { return level ? level->level.rows() : 0; }

int lr_level_cols(const lr_level* level) { return level ? level->level.cols() : 0; }

int lr_level_equal(const lr_level* a, const lr_level* b) { return a && b && a->level == b->level ? 1 : 0; }

lr_status lr_level_render(const lr_config* config, const lr_level* level, char** text) {
  return guarded([&] {
    require(config && level && text, "config, level and text");
    *text = copy_string(render_level(level->level, config->config));
  });
}

lr_status lr_validate(const lr_config* config, const lr_level* level, int* playable, char** violations) {
  return guarded([&] {
    require(config && level && playable, "config, level and playable");
    const auto verdict = validate_playable(level->level, config->config);
    std::string lines;
    for (const auto& v : verdict.violations) lines += v.describe(config->config, level->level.cols()) + "\n";
    if (violations) *violations = copy_string(lines);
    *playable = verdict.ok() ? 1 : 0;
  });
}

lr_status lr_hamming(const lr_level* a, const lr_level* b, long long* out) {
  return guarded([&] {
    require(a && b && out, "levels and out");
    *out = hamming(a->level, b->level);
  });
}

lr_status lr_edit_distance(const lr_config* config, const lr_level* a, const lr_level* b, long long* out) {
  return guarded([&] {
    require(config && a && b && out, "config, levels and out");
    *out = edit_distance(a->level, b->level, config->config).total;
  });
}

lr_status lr_compile_stats(const lr_config* config, const lr_level* level, size_t* variables, size_t* constraints) {
  return guarded([&] {
    require(config && level, "config and level");
    const auto mip = compile_repair_mip(level->level, config->config);
    if (variables) *variables = mip.problem.num_variables();
    if (constraints) *constraints = mip.problem.num_constraints();
  });
}

void lr_repair_options_init(lr_repair_options* options) {
  if (!options) return;
  options->backend = LR_BACKEND_EMBEDDED;
  options->external_command = nullptr;
  options->time_limit_seconds = SolverOptions{}.time_limit_seconds;
  options->node_limit = 0;
  options->warm_start = 1;
}

lr_status lr_repair(const lr_config* config, const lr_level* input, const lr_repair_options* options,
                    lr_repair_result** out) {
  return guarded([&] {
    require(config && input && out, "config, input and out");
    lr_repair_options o;
    lr_repair_options_init(&o);
    if (options) o = *options;
    RepairOptions ro;
    ro.backend = o.backend == LR_BACKEND_EXTERNAL ? SolverBackend::kExternal : SolverBackend::kEmbedded;
    if (o.external_command) ro.external_command = o.external_command;
    ro.solver.time_limit_seconds =
        o.time_limit_seconds > 0 ? o.time_limit_seconds : std::numeric_limits<double>::infinity();
    if (o.node_limit > 0) ro.solver.node_limit = o.node_limit;
    ro.warm_start = o.warm_start != 0;
    auto result = repair(input->level, config->config, ro);
    auto* r = new lr_repair_result{lr_level{result.level}, result.report.to_text(config->config, result.level.cols()),
                                   std::move(result)};
    *out = r;
  });
}

void lr_repair_result_free(lr_repair_result* result) { delete result; }

const lr_level* lr_repair_result_level(const lr_repair_result* result) { return result ? &result->level : nullptr; }

const char* lr_repair_result_report(const lr_repair_result* result) { return result ? result->report.c_str() : ""; }

const char* lr_repair_result_status(const lr_repair_result* result) {
  return result ? solve_status_name(result->result.status) : "";
}

double lr_repair_result_objective(const lr_repair_result* result) { return result ? result->result.objective : 0.0; }

double lr_repair_result_bound(const lr_repair_result* result) { return result ? result->result.best_bound : 0.0; }

double lr_repair_result_seconds(const lr_repair_result* result) { return result ? result->result.seconds : 0.0; }

long long lr_repair_result_nodes(const lr_repair_result* result) { return result ? result->result.nodes : 0; }

lr_status lr_corpus_load(const lr_config* config, const char* directory, lr_corpus** out) {
  return guarded([&] {
    require(config && directory && out, "config, directory and out");
    auto corpus = load_corpus(directory, config->config);
    auto* c = new lr_corpus{std::move(corpus.names), {}};
    for (auto& l : corpus.levels) c->items.push_back(lr_level{std::move(l)});
    *out = c;
  });
}

lr_corpus* lr_corpus_new(void) { return new (std::nothrow) lr_corpus{}; }

lr_status lr_corpus_add(lr_corpus* corpus, const char* name, const lr_level* level) {
  return guarded([&] {
    require(corpus && level, "corpus and level");
    corpus->names.emplace_back(name ? name : "");
    corpus->items.push_back(*level);
  });
}

void lr_corpus_free(lr_corpus* corpus) { delete corpus; }

size_t lr_corpus_size(const lr_corpus* corpus) { return corpus ? corpus->items.size() : 0; }

const char* lr_corpus_name(const lr_corpus* corpus, size_t index) {
  if (!corpus || index >= corpus->names.size()) return nullptr;
  return corpus->names[index].c_str();
}

const lr_level* lr_corpus_level(const lr_corpus* corpus, size_t index) {
  if (!corpus || index >= corpus->items.size()) return nullptr;
  return &corpus->items[index];
}

void lr_generate_options_init(lr_generate_options* options) {
  if (!options) return;
  options->mode = LR_MODE_RANDOM;
  options->seed = 0;
  options->count = 1;
  options->corrupt_k = 0;
  options->frequencies = nullptr;
  options->num_frequencies = 0;
}

lr_status lr_generate(const lr_config* config, const lr_corpus* source, const lr_generate_options* options,
                      lr_corpus** out) {
  return guarded([&] {
    require(config && options && out, "config, options and out");
    const auto levels = source ? source->levels() : std::vector<Level>{};
    std::vector<double> freq;
    if (options->frequencies) {
      freq.assign(options->frequencies, options->frequencies + options->num_frequencies);
    } else {
      if (levels.empty()) throw Error(ErrorCode::kEmptyCorpus, "frequencies need a source corpus");
      freq = object_frequencies(levels, config->config);
    }
    GeneratorSpec spec;
    spec.mode = options->mode == LR_MODE_CORRUPT ? GeneratorMode::kCorrupt : GeneratorMode::kRandomMultinomial;
    spec.seed = options->seed;
    spec.corruption_count = options->corrupt_k;
    auto generated = generate_batch(spec, levels, freq, options->count, config->config);
    auto* corpus = new lr_corpus{};
    for (std::size_t i = 0; i < generated.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "level%04zu.txt", i);
      corpus->names.emplace_back(name);
    }
    for (auto& l : generated) corpus->items.push_back(lr_level{std::move(l)});
    *out = corpus;
  });
}

void lr_metrics_options_init(lr_metrics_options* options) {
  if (!options) return;
  options->epsilon = 1e-5;
  options->direction = LR_KL_GENERATED_TO_REFERENCE;
  options->jobs = 1;
}

lr_status lr_tile_pattern_kl(const lr_corpus* generated, const lr_corpus* reference, const lr_metrics_options* options,
                             double* out) {
  return guarded([&] {
    require(generated && reference && out, "corpora and out");
    const auto m = to_metrics(options);
    *out = tile_pattern_kl(generated->levels(), reference->levels(), m.epsilon, m.direction);
  });
}

lr_status lr_metrics(const lr_config* config, const lr_corpus* corpus, const lr_corpus* reference,
                     const lr_metrics_options* options, char** table, char** jsonl) {
  return guarded([&] {
    require(config && corpus && reference, "config and corpora");
    std::vector<std::pair<std::string, CorpusReport>> rows;
    rows.emplace_back("corpus", corpus_report(corpus->levels(), reference->levels(), config->config, to_metrics(options)));
    if (table) *table = copy_string(report_table(rows, config->config));
    if (jsonl) *jsonl = copy_string(report_jsonl(rows, config->config));
  });
}

void lr_experiment_options_init(lr_experiment_options* options) {
  if (!options) return;
  const ExperimentOptions d;
  options->corpus_dir = nullptr;
  options->seed = d.seed;
  options->count = d.count;
  options->corrupt_k = d.corrupt_k;
  options->jobs = d.jobs;
  options->node_limit = d.node_limit;
  lr_metrics_options_init(&options->metrics);
}

lr_status lr_experiment(const lr_config* config, const lr_experiment_options* options, char** report) {
  return guarded([&] {
    require(config && options && options->corpus_dir && report, "config, options, corpus_dir and report");
    ExperimentOptions e;
    e.corpus_dir = options->corpus_dir;
    e.seed = options->seed;
    e.count = options->count;
    e.corrupt_k = options->corrupt_k;
    e.jobs = options->jobs;
    e.node_limit = options->node_limit > 0 ? options->node_limit : e.node_limit;
    e.metrics = to_metrics(&options->metrics);
    *report = copy_string(run_experiment(config->config, e));
  });
}

}  // extern "C"
