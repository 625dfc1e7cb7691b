#include "level.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "errors.hpp"

namespace levelrepair {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kUnknownGlyph: return "UnknownGlyph";
    case ErrorCode::kRaggedRows: return "RaggedRows";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kCorpusParseError: return "CorpusParseError";
    case ErrorCode::kUnknownVarId: return "UnknownVarId";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kExternalSolverUnavailable: return "ExternalSolverUnavailable";
    case ErrorCode::kSolutionParseError: return "SolutionParseError";
    case ErrorCode::kInfeasibleReported: return "InfeasibleReported";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kNonUniqueAssignment: return "NonUniqueAssignment";
    case ErrorCode::kGridTooSmall: return "GridTooSmall";
    case ErrorCode::kEndpointMissing: return "EndpointMissing";
    case ErrorCode::kEndpointNotUnique: return "EndpointNotUnique";
    case ErrorCode::kBadFrequencies: return "BadFrequencies";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kSolverFailed: return "SolverFailed";
  }
  return "Unknown";
}

namespace {

bool contains(const std::vector<int>& set, int type) {
  return std::find(set.begin(), set.end(), type) != set.end();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

[[noreturn]] void config_error(int line, const std::string& message) {
  throw Error(ErrorCode::kConfigError, "line " + std::to_string(line) + ": " + message);
}

long long parse_int(std::string_view s, int line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    config_error(line, "expected integer, got '" + std::string(s) + "'");
  }
  return value;
}

bool parse_bool(std::string_view s, int line) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  config_error(line, "expected boolean, got '" + std::string(s) + "'");
}

// Accepts "p/q" or a plain decimal such as "0.6".
Fraction parse_fraction(std::string_view s, int line) {
  Fraction f;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    f.num = parse_int(s.substr(0, slash), line);
    f.den = parse_int(s.substr(slash + 1), line);
  } else {
    auto dot = s.find('.');
    std::string digits(s.substr(0, dot));
    f.den = 1;
    if (dot != std::string_view::npos) {
      auto frac = s.substr(dot + 1);
      if (frac.size() > 12) config_error(line, "too many decimals in '" + std::string(s) + "'");
      digits += frac;
      for (std::size_t i = 0; i < frac.size(); ++i) f.den *= 10;
    }
    if (digits.empty()) config_error(line, "bad fraction '" + std::string(s) + "'");
    f.num = parse_int(digits, line);
  }
  if (f.den <= 0) config_error(line, "bad fraction '" + std::string(s) + "'");
  auto g = std::gcd(f.num, f.den);
  if (g > 1) {
    f.num /= g;
    f.den /= g;
  }
  return f;
}

}  // namespace

bool GameConfig::is_source(int type) const { return contains(source_set, type); }
bool GameConfig::is_target(int type) const { return contains(target_set, type); }
bool GameConfig::is_blocking(int type) const { return contains(blocking_set, type); }
bool GameConfig::is_solid(int type) const { return contains(solid_set, type); }

std::optional<int> GameConfig::type_by_glyph(char glyph) const {
  for (const auto& t : alphabet) {
    if (t.glyph == glyph) return t.id;
  }
  return std::nullopt;
}

std::optional<int> GameConfig::type_by_name(std::string_view name) const {
  for (const auto& t : alphabet) {
    if (t.name == name) return t.id;
  }
  return std::nullopt;
}

void GameConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfigError, m); };
  if (alphabet.empty()) fail("alphabet is empty");
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (alphabet[i].id != static_cast<int>(i)) fail("object ids must be dense");
    const auto& nm = alphabet[i].name;
    // Names end up in LP variable names, so keep them to identifier characters.
    if (nm.empty() || std::isdigit(static_cast<unsigned char>(nm[0])) ||
        !std::all_of(nm.begin(), nm.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; })) {
      fail("object name '" + nm + "' must consist of letters, digits and '_'");
    }
    if (std::isspace(static_cast<unsigned char>(alphabet[i].glyph))) {
      fail("glyph of '" + alphabet[i].name + "' is whitespace");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (alphabet[j].glyph == alphabet[i].glyph) {
        fail(std::string("duplicate glyph '") + alphabet[i].glyph + "'");
      }
      if (alphabet[j].name == alphabet[i].name) fail("duplicate object name '" + alphabet[i].name + "'");
    }
  }
  auto check_set = [&](const std::vector<int>& set, const char* what) {
    for (int t : set) {
      if (t < 0 || t >= num_types()) fail(std::string(what) + " set references unknown type");
    }
  };
  check_set(source_set, "source");
  check_set(target_set, "target");
  check_set(blocking_set, "blocking");
  check_set(solid_set, "solid");
  for (int s : source_set) {
    if (is_blocking(s)) fail("source type '" + type_name(s) + "' is also blocking");
  }
  if (!target_set.empty() && source_set.empty()) fail("targets require a non-empty source set");
  if (move_cost < 0 || delete_cost < 0) fail("costs must be non-negative");
  if (delete_cost < move_cost) fail("delete_cost must be at least move_cost");
  for (const auto& c : count_constraints) {
    if (c.type < 0 || c.type >= num_types()) fail("count constraint references unknown type");
    if (c.count < 0) fail("count must be non-negative");
  }
  for (const auto& d : density_constraints) {
    check_set(d.types, "density");
    if (d.types.empty()) fail("density constraint without types");
    if (d.max_fraction.num <= 0 || d.max_fraction.num > d.max_fraction.den) {
      fail("density fraction must lie in (0, 1]");
    }
  }
  if (border_object && (*border_object < 0 || *border_object >= num_types())) fail("bad border object");
  if (filler && (*filler < 0 || *filler >= num_types())) fail("bad filler object");
  if (rows < 0 || cols < 0) fail("negative dimensions");
}

GameConfig parse_config(std::string_view text) {
  GameConfig config;
  struct Pending {
    int line;
    std::string key;
    std::vector<std::string> words;
  };
  std::vector<Pending> deferred;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    auto words = split_words(value);

    if (key == "name") {
      config.name = std::string(value);
    } else if (key == "object") {
      if (words.size() != 2 || words[1].size() != 1) {
        config_error(line_no, "expected 'object = <name> <glyph>'");
      }
      int id = config.num_types();
      config.alphabet.push_back({id, words[0], words[1][0]});
    } else if (key == "rows") {
      config.rows = static_cast<int>(parse_int(value, line_no));
    } else if (key == "cols") {
      config.cols = static_cast<int>(parse_int(value, line_no));
    } else if (key == "delete_cost") {
      config.delete_cost = static_cast<int>(parse_int(value, line_no));
    } else if (key == "move_cost") {
      config.move_cost = static_cast<int>(parse_int(value, line_no));
    } else if (key == "wraparound") {
      config.wraparound = parse_bool(value, line_no);
    } else if (key == "no_dead_ends") {
      config.no_dead_ends = parse_bool(value, line_no);
    } else if (key == "sources" || key == "targets" || key == "blocking" || key == "solid" ||
               key == "count" || key == "density" || key == "border" || key == "filler" ||
               key == "path") {
      // Resolved after the whole alphabet is known.
      deferred.push_back({line_no, key, std::move(words)});
    } else {
      config_error(line_no, "unknown key '" + key + "'");
    }
  }

  auto resolve = [&](const std::string& name, int line) {
    auto t = config.type_by_name(name);
    if (!t) config_error(line, "unknown object type '" + name + "'");
    return *t;
  };
  auto resolve_all = [&](const std::vector<std::string>& names, int line) {
    std::vector<int> ids;
    for (const auto& n : names) ids.push_back(resolve(n, line));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };

  for (const auto& p : deferred) {
    if (p.key == "sources") {
      config.source_set = resolve_all(p.words, p.line);
    } else if (p.key == "targets") {
      config.target_set = resolve_all(p.words, p.line);
    } else if (p.key == "blocking") {
      config.blocking_set = resolve_all(p.words, p.line);
    } else if (p.key == "solid") {
      config.solid_set = resolve_all(p.words, p.line);
    } else if (p.key == "count") {
      if (p.words.size() != 2) config_error(p.line, "expected 'count = <type> <n>'");
      config.count_constraints.push_back(
          {resolve(p.words[0], p.line), static_cast<int>(parse_int(p.words[1], p.line))});
    } else if (p.key == "density") {
      if (p.words.size() < 2) config_error(p.line, "expected 'density = <fraction> <types...>'");
      DensityConstraint d;
      d.max_fraction = parse_fraction(p.words[0], p.line);
      d.types = resolve_all({p.words.begin() + 1, p.words.end()}, p.line);
      config.density_constraints.push_back(std::move(d));
    } else if (p.key == "border") {
      if (p.words.size() != 1) config_error(p.line, "expected 'border = <type>'");
      config.border_object = resolve(p.words[0], p.line);
    } else if (p.key == "filler") {
      if (p.words.size() != 1) config_error(p.line, "expected 'filler = <type>'");
      config.filler = resolve(p.words[0], p.line);
    } else if (p.key == "path") {
      if (p.words.size() != 2) config_error(p.line, "expected 'path = <from> <to>'");
      config.path_from = resolve(p.words[0], p.line);
      config.path_to = resolve(p.words[1], p.line);
    }
  }

  config.validate();
  return config;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

GameConfig load_config(const std::string& path) {
  try {
    return parse_config(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIoError) throw;
    throw Error(e.code(), path + ": " + e.detail());
  }
}

Level::Level(int rows, int cols, int fill)
    : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows * cols), fill) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::kInvalidArgument, "level dimensions must be positive");
}

Level::Level(int rows, int cols, std::vector<int> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::kInvalidArgument, "level dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorCode::kInvalidArgument, "cell count does not match dimensions");
  }
}

bool Level::on_perimeter(int cell) const {
  int r = row_of(cell);
  int c = col_of(cell);
  return r == 0 || c == 0 || r == rows_ - 1 || c == cols_ - 1;
}

int Level::count(int type) const {
  return static_cast<int>(std::count(cells_.begin(), cells_.end(), type));
}

Level parse_level(std::string_view text, const GameConfig& config) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::kEmptyInput, "level text has no rows");

  const int rows = static_cast<int>(lines.size());
  const int cols = static_cast<int>(lines[0].size());
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(rows * cols));
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(lines[r].size()) != cols) {
      throw Error(ErrorCode::kRaggedRows, "row " + std::to_string(r) + " has " +
                                              std::to_string(lines[r].size()) + " cells, expected " +
                                              std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) {
      char g = lines[r][static_cast<std::size_t>(c)];
      auto t = config.type_by_glyph(g);
      if (!t) {
        throw Error(ErrorCode::kUnknownGlyph, std::string("'") + g + "' at row " + std::to_string(r) +
                                                  ", col " + std::to_string(c));
      }
      cells.push_back(*t);
    }
  }
  return Level(rows, cols, std::move(cells));
}

Level load_level(const std::string& path, const GameConfig& config) {
  auto text = read_file(path);
  try {
    return parse_level(text, config);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

std::string render_level(const Level& level, const GameConfig& config) {
  std::string out;
  out.reserve(static_cast<std::size_t>(level.size() + level.rows()));
  for (int r = 0; r < level.rows(); ++r) {
    for (int c = 0; c < level.cols(); ++c) out.push_back(config.alphabet.at(level.at(r, c)).glyph);
    out.push_back('\n');
  }
  return out;
}

SpaceGraph::SpaceGraph(int rows, int cols, bool wraparound)
    : rows_(rows), cols_(cols), wraparound_(wraparound) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  const bool wrap_rows = wraparound && rows >= 3;
  const bool wrap_cols = wraparound && cols >= 3;
  const int n = rows * cols;

  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      auto& list = nbrs[static_cast<std::size_t>(v)];
      if (r > 0) list.push_back(v - cols);
      else if (wrap_rows) list.push_back((rows - 1) * cols + c);
      if (r + 1 < rows) list.push_back(v + cols);
      else if (wrap_rows) list.push_back(c);
      if (c > 0) list.push_back(v - 1);
      else if (wrap_cols) list.push_back(r * cols + cols - 1);
      if (c + 1 < cols) list.push_back(v + 1);
      else if (wrap_cols) list.push_back(r * cols);
    }
  }

  out_start_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int v = 0; v < n; ++v) {
    for (int u : nbrs[static_cast<std::size_t>(v)]) {
      out_list_.push_back(static_cast<int>(edges_.size()));
      nbr_list_.push_back(u);
      edges_.push_back({v, u});
    }
    out_start_[static_cast<std::size_t>(v) + 1] = static_cast<int>(edges_.size());
  }

  in_start_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : edges_) ++in_start_[static_cast<std::size_t>(e.to) + 1];
  for (int v = 0; v < n; ++v) in_start_[static_cast<std::size_t>(v) + 1] += in_start_[static_cast<std::size_t>(v)];
  in_list_.assign(edges_.size(), 0);
  std::vector<int> fill(in_start_.begin(), in_start_.end() - 1);
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    in_list_[static_cast<std::size_t>(fill[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].to)]++)] = e;
  }
}

std::span<const int> SpaceGraph::out_edges(int node) const {
  auto b = static_cast<std::size_t>(out_start_[static_cast<std::size_t>(node)]);
  auto e = static_cast<std::size_t>(out_start_[static_cast<std::size_t>(node) + 1]);
  return std::span<const int>(out_list_).subspan(b, e - b);
}

std::span<const int> SpaceGraph::in_edges(int node) const {
  auto b = static_cast<std::size_t>(in_start_[static_cast<std::size_t>(node)]);
  auto e = static_cast<std::size_t>(in_start_[static_cast<std::size_t>(node) + 1]);
  return std::span<const int>(in_list_).subspan(b, e - b);
}

std::span<const int> SpaceGraph::neighbors(int node) const {
  auto b = static_cast<std::size_t>(out_start_[static_cast<std::size_t>(node)]);
  auto e = static_cast<std::size_t>(out_start_[static_cast<std::size_t>(node) + 1]);
  return std::span<const int>(nbr_list_).subspan(b, e - b);
}

int SpaceGraph::distance(int a, int b) const {
  int dr = std::abs(a / cols_ - b / cols_);
  int dc = std::abs(a % cols_ - b % cols_);
  if (wraparound_ && rows_ >= 3) dr = std::min(dr, rows_ - dr);
  if (wraparound_ && cols_ >= 3) dc = std::min(dc, cols_ - dc);
  return dr + dc;
}

SpaceGraph build_space_graph(int rows, int cols, bool wraparound) {
  return SpaceGraph(rows, cols, wraparound);
}

std::vector<double> object_frequencies(std::span<const Level> corpus, const GameConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot compute frequencies of an empty corpus");
  std::vector<long long> counts(static_cast<std::size_t>(config.num_types()), 0);
  long long total = 0;
  for (const auto& level : corpus) {
    for (int t : level.cells()) {
      if (t < 0 || t >= config.num_types()) {
        throw Error(ErrorCode::kInvalidArgument, "level holds a type outside the config alphabet");
      }
      ++counts[static_cast<std::size_t>(t)];
    }
    total += level.size();
  }
  std::vector<double> freq(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return freq;
}

}  // namespace levelrepair
