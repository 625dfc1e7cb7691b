// level-repair: command-line front end over the C API.
//
// Exit codes: 0 success, 1 some level unplayable, 2 usage / file / parse
// error, 3 solver or other runtime failure.

#include <levelrepair/levelrepair.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnplayable = 1;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

struct ConfigDel {
  void operator()(lr_config* p) const { lr_config_free(p); }
};
struct LevelDel {
  void operator()(lr_level* p) const { lr_level_free(p); }
};
struct CorpusDel {
  void operator()(lr_corpus* p) const { lr_corpus_free(p); }
};
struct ResultDel {
  void operator()(lr_repair_result* p) const { lr_repair_result_free(p); }
};
struct StringDel {
  void operator()(char* p) const { lr_string_free(p); }
};
using ConfigPtr = std::unique_ptr<lr_config, ConfigDel>;
using LevelPtr = std::unique_ptr<lr_level, LevelDel>;
using CorpusPtr = std::unique_ptr<lr_corpus, CorpusDel>;
using ResultPtr = std::unique_ptr<lr_repair_result, ResultDel>;
using StringPtr = std::unique_ptr<char, StringDel>;

// Parse-type failures map to exit code 2, everything else to 3.
int exit_code_for(lr_status st) {
  switch (st) {
    case LR_OK: return kExitOk;
    case LR_INVALID_ARGUMENT:
    case LR_IO_ERROR:
    case LR_CONFIG_ERROR:
    case LR_UNKNOWN_GLYPH:
    case LR_RAGGED_ROWS:
    case LR_EMPTY_INPUT:
    case LR_EMPTY_CORPUS:
    case LR_CORPUS_PARSE_ERROR:
    case LR_DIMENSION_MISMATCH:
    case LR_CONFIG_MISMATCH:
    case LR_GRID_TOO_SMALL:
    case LR_BAD_FREQUENCIES:
    case LR_K_TOO_LARGE: return kExitInput;
    default: return kExitRuntime;
  }
}

// lr_last_error already starts with the status name.
std::string error_text(lr_status st) {
  const std::string msg = lr_last_error();
  return msg.empty() ? lr_status_name(st) : msg;
}

// Thrown inside the commands; main turns it into a message and exit code.
struct Failure {
  int exit_code;
  std::string message;
};

ConfigPtr load_config_or_throw(const std::string& path) {
  lr_config* raw = nullptr;
  const lr_status st = lr_config_load(path.c_str(), &raw);
  if (st != LR_OK) throw Failure{exit_code_for(st), error_text(st)};
  return ConfigPtr(raw);
}

CorpusPtr load_corpus_or_throw(const lr_config* config, const std::string& dir) {
  lr_corpus* raw = nullptr;
  const lr_status st = lr_corpus_load(config, dir.c_str(), &raw);
  if (st != LR_OK) throw Failure{exit_code_for(st), error_text(st)};
  return CorpusPtr(raw);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

// Runs fn(i) for every index on up to `jobs` threads; callers keep per-index
// output so printing stays in input order.
template <typename F>
void run_jobs(std::size_t count, int jobs, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  if (!write_file(out_path, text)) throw Failure{kExitInput, "cannot write " + out_path};
}

int cmd_validate(const std::string& config_path, const std::vector<std::string>& files) {
  const auto config = load_config_or_throw(config_path);
  int code = kExitOk;
  for (const auto& f : files) {
    lr_level* raw = nullptr;
    lr_status st = lr_level_load(config.get(), f.c_str(), &raw);
    if (st != LR_OK) {
      std::cout << f << ": error " << error_text(st) << "\n";
      code = std::max(code, exit_code_for(st));
      continue;
    }
    LevelPtr level(raw);
    int playable = 0;
    char* violations = nullptr;
    st = lr_validate(config.get(), level.get(), &playable, &violations);
    StringPtr hold(violations);
    if (st != LR_OK) {
      std::cout << f << ": error " << error_text(st) << "\n";
      code = std::max(code, exit_code_for(st));
      continue;
    }
    std::cout << f << ": " << (playable ? "playable" : "unplayable") << "\n";
    std::istringstream lines(violations ? violations : "");
    for (std::string line; std::getline(lines, line);) std::cout << "  " << line << "\n";
    if (!playable) code = std::max(code, kExitUnplayable);
  }
  return code;
}

struct RepairArgs {
  std::string config;
  std::vector<std::string> files;
  std::string solver = "embedded";
  std::string solver_cmd;
  bool emit_report = false;
  double time_limit = 300.0;
  long long node_limit = 0;
  int jobs = 1;
  std::string suffix = ".repaired";
};

int cmd_repair(const RepairArgs& args) {
  const auto config = load_config_or_throw(args.config);
  lr_repair_options options;
  lr_repair_options_init(&options);
  options.backend = args.solver == "external" ? LR_BACKEND_EXTERNAL : LR_BACKEND_EMBEDDED;
  options.external_command = args.solver_cmd.empty() ? nullptr : args.solver_cmd.c_str();
  options.time_limit_seconds = args.time_limit;
  options.node_limit = args.node_limit;

  struct Outcome {
    std::string text;
    int code = kExitOk;
    bool repaired = false;
    bool playable = false;
  };
  std::vector<Outcome> outcomes(args.files.size());

  run_jobs(args.files.size(), args.jobs, [&](std::size_t i) {
    const std::string& f = args.files[i];
    auto& out = outcomes[i];
    lr_level* raw = nullptr;
    lr_status st = lr_level_load(config.get(), f.c_str(), &raw);
    if (st != LR_OK) {
      out.text = f + ": error " + error_text(st) + "\n";
      out.code = exit_code_for(st);
      return;
    }
    LevelPtr input(raw);
    lr_repair_result* rr = nullptr;
    st = lr_repair(config.get(), input.get(), &options, &rr);
    if (st != LR_OK) {
      out.text = f + ": solver error " + error_text(st) + "\n";
      out.code = exit_code_for(st);
      return;
    }
    ResultPtr result(rr);
    const lr_level* repaired = lr_repair_result_level(result.get());
    const std::string target = f + args.suffix;
    std::string bytes;
    if (lr_level_equal(input.get(), repaired)) {
      bytes = read_file(f);  // untouched levels are copied byte for byte
    } else {
      char* text = nullptr;
      lr_level_render(config.get(), repaired, &text);
      StringPtr hold(text);
      bytes = text ? text : "";
    }
    if (!write_file(target, bytes)) {
      out.text = f + ": error cannot write " + target + "\n";
      out.code = kExitInput;
      return;
    }
    int playable = 0;
    lr_validate(config.get(), repaired, &playable, nullptr);
    out.repaired = true;
    out.playable = playable != 0;
    if (!playable) out.code = kExitUnplayable;
    char line[256];
    std::snprintf(line, sizeof line, "%s: cost %.0f status %s nodes %lld time %.3fs -> %s%s\n", f.c_str(),
                  lr_repair_result_objective(result.get()), lr_repair_result_status(result.get()),
                  lr_repair_result_nodes(result.get()), lr_repair_result_seconds(result.get()), target.c_str(),
                  playable ? "" : " (UNPLAYABLE)");
    out.text = line;
    if (args.emit_report) {
      std::istringstream lines(lr_repair_result_report(result.get()));
      for (std::string l; std::getline(lines, l);) out.text += "  " + l + "\n";
    }
  });

  int code = kExitOk;
  std::size_t repaired = 0, playable = 0;
  for (const auto& o : outcomes) {
    std::cout << o.text;
    code = std::max(code, o.code);
    repaired += o.repaired ? 1 : 0;
    playable += o.playable ? 1 : 0;
  }
  const double pct = args.files.empty() ? 100.0 : 100.0 * static_cast<double>(playable) / static_cast<double>(args.files.size());
  char summary[160];
  std::snprintf(summary, sizeof summary, "summary: %zu/%zu repaired, %zu/%zu playable (%.1f%%)\n", repaired,
                args.files.size(), playable, args.files.size(), pct);
  std::cout << summary;
  return code;
}

struct GenerateArgs {
  std::string config;
  std::string mode = "random";
  int count = 10;
  unsigned long long seed = 0;
  int corrupt_k = 10;
  std::string corpus;
  std::string out = "generated";
};

std::string default_corpus(const std::string& config_path) {
  return (fs::path(config_path).parent_path() / "levels").string();
}

int cmd_generate(const GenerateArgs& args) {
  const auto config = load_config_or_throw(args.config);
  const auto source = load_corpus_or_throw(config.get(), args.corpus.empty() ? default_corpus(args.config) : args.corpus);
  lr_generate_options options;
  lr_generate_options_init(&options);
  options.mode = args.mode == "corrupt" ? LR_MODE_CORRUPT : LR_MODE_RANDOM;
  options.seed = args.seed;
  options.count = args.count;
  options.corrupt_k = args.corrupt_k;
  lr_corpus* raw = nullptr;
  const lr_status st = lr_generate(config.get(), source.get(), &options, &raw);
  if (st != LR_OK) throw Failure{exit_code_for(st), error_text(st)};
  CorpusPtr generated(raw);

  std::error_code ec;
  fs::create_directories(args.out, ec);
  if (ec) throw Failure{kExitInput, "cannot create " + args.out + ": " + ec.message()};
  for (std::size_t i = 0; i < lr_corpus_size(generated.get()); ++i) {
    char* text = nullptr;
    lr_level_render(config.get(), lr_corpus_level(generated.get(), i), &text);
    StringPtr hold(text);
    const auto path = (fs::path(args.out) / lr_corpus_name(generated.get(), i)).string();
    if (!write_file(path, text ? text : "")) throw Failure{kExitInput, "cannot write " + path};
    std::cout << path << "\n";
  }
  return kExitOk;
}

lr_kl_direction parse_direction(const std::string& s) {
  return s == "reference-generated" ? LR_KL_REFERENCE_TO_GENERATED : LR_KL_GENERATED_TO_REFERENCE;
}

struct MetricsArgs {
  std::string config;
  std::string corpus;
  std::string reference;
  double epsilon = 1e-5;
  std::string direction = "generated-reference";
  int jobs = 1;
  std::string out;
};

int cmd_metrics(const MetricsArgs& args) {
  const auto config = load_config_or_throw(args.config);
  const auto corpus = load_corpus_or_throw(config.get(), args.corpus);
  const auto reference = load_corpus_or_throw(config.get(), args.reference);
  lr_metrics_options options;
  lr_metrics_options_init(&options);
  options.epsilon = args.epsilon;
  options.direction = parse_direction(args.direction);
  options.jobs = args.jobs;
  char* table = nullptr;
  char* jsonl = nullptr;
  const lr_status st = lr_metrics(config.get(), corpus.get(), reference.get(), &options, &table, &jsonl);
  StringPtr hold_table(table), hold_json(jsonl);
  if (st != LR_OK) throw Failure{exit_code_for(st), error_text(st)};
  emit(std::string(table) + "\n" + jsonl, args.out);
  return kExitOk;
}

struct ExperimentArgs {
  std::string config;
  unsigned long long seed = 0;
  std::string corpus;
  int count = 10;
  int corrupt_k = 10;
  int jobs = 1;
  long long node_limit = 5000;
  double epsilon = 1e-5;
  std::string direction = "generated-reference";
  std::string out;
};

int cmd_experiment(const ExperimentArgs& args) {
  const auto config = load_config_or_throw(args.config);
  const std::string corpus = args.corpus.empty() ? default_corpus(args.config) : args.corpus;
  lr_experiment_options options;
  lr_experiment_options_init(&options);
  options.corpus_dir = corpus.c_str();
  options.seed = args.seed;
  options.count = args.count;
  options.corrupt_k = args.corrupt_k;
  options.jobs = args.jobs;
  options.node_limit = args.node_limit;
  options.metrics.epsilon = args.epsilon;
  options.metrics.direction = parse_direction(args.direction);
  options.metrics.jobs = args.jobs;
  char* report = nullptr;
  const lr_status st = lr_experiment(config.get(), &options, &report);
  StringPtr hold(report);
  if (st != LR_OK) throw Failure{exit_code_for(st), error_text(st)};
  emit(report, args.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repairs tile-grid game levels into the nearest playable level."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "level-repair 1.0");

  std::string config;
  const auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "game configuration file")->required()->check(CLI::ExistingFile);
  };

  std::vector<std::string> validate_files;
  auto* validate = app.add_subcommand("validate", "check levels for playability");
  validate->add_option("files", validate_files, "level files")->required();
  add_config(validate);

  RepairArgs rep;
  auto* repair = app.add_subcommand("repair", "write the minimum-edit playable version of each level");
  repair->add_option("files", rep.files, "level files")->required();
  add_config(repair);
  repair->add_option("--solver", rep.solver, "embedded or external")->check(CLI::IsMember({"embedded", "external"}));
  repair->add_option("--solver-cmd", rep.solver_cmd,
                     "external solver command with {lp} and {sol} placeholders (default: $LEVEL_REPAIR_SOLVER)");
  repair->add_flag("--emit-report", rep.emit_report, "print the edit report for each level");
  repair->add_option("--time-limit", rep.time_limit, "seconds per level, 0 for none");
  repair->add_option("--node-limit", rep.node_limit, "branch-and-bound nodes per level, 0 for none");
  repair->add_option("--jobs", rep.jobs, "levels repaired in parallel")->check(CLI::PositiveNumber);
  repair->add_option("--suffix", rep.suffix, "appended to the input path for the output file");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write random or corrupted levels");
  add_config(generate);
  generate->add_option("--mode", gen.mode, "random or corrupt")->check(CLI::IsMember({"random", "corrupt"}));
  generate->add_option("--count", gen.count, "number of levels")->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.seed, "random seed");
  generate->add_option("--corrupt-k", gen.corrupt_k, "cells resampled per level in corrupt mode");
  generate->add_option("--corpus", gen.corpus, "source levels and tile frequencies (default: <config dir>/levels)");
  generate->add_option("--out", gen.out, "output directory");

  MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "corpus statistics against a reference corpus");
  metrics->add_option("corpus", met.corpus, "directory of levels")->required();
  metrics->add_option("--reference", met.reference, "reference corpus directory")->required();
  add_config(metrics);
  metrics->add_option("--epsilon", met.epsilon, "KL smoothing constant");
  metrics->add_option("--kl-direction", met.direction, "generated-reference or reference-generated")
      ->check(CLI::IsMember({"generated-reference", "reference-generated"}));
  metrics->add_option("--jobs", met.jobs, "threads for pairwise distances")->check(CLI::PositiveNumber);
  metrics->add_option("--out", met.out, "write the report here instead of stdout");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "corrupt, sample, repair and report");
  add_config(experiment);
  experiment->add_option("--seed", exp.seed, "random seed");
  experiment->add_option("--corpus", exp.corpus, "human levels (default: <config dir>/levels)");
  experiment->add_option("--count", exp.count, "levels per generated corpus")->check(CLI::PositiveNumber);
  experiment->add_option("--corrupt-k", exp.corrupt_k, "cells resampled per corrupted level");
  experiment->add_option("--jobs", exp.jobs, "parallel repairs")->check(CLI::PositiveNumber);
  experiment->add_option("--node-limit", exp.node_limit, "branch-and-bound nodes per repair");
  experiment->add_option("--epsilon", exp.epsilon, "KL smoothing constant");
  experiment->add_option("--kl-direction", exp.direction, "generated-reference or reference-generated")
      ->check(CLI::IsMember({"generated-reference", "reference-generated"}));
  experiment->add_option("--out", exp.out, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(config, validate_files);
    if (repair->parsed()) {
      rep.config = config;
      return cmd_repair(rep);
    }
    if (generate->parsed()) {
      gen.config = config;
      return cmd_generate(gen);
    }
    if (metrics->parsed()) {
      met.config = config;
      return cmd_metrics(met);
    }
    if (experiment->parsed()) {
      exp.config = config;
      return cmd_experiment(exp);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  }
  return kExitInput;
}
