#include "mshyper/run_config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {
namespace {

class Parser {
 public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  ConfigTable table() {
    ConfigTable out;
    std::string section;
    while (skip_blank_lines()) {
      if (peek() == '[') {
        ++pos_;
        section = bare_key();
        skip_space();
        expect(']');
        end_of_line();
        continue;
      }
      const int line = line_;
      std::string key = bare_key();
      skip_space();
      expect('=');
      skip_space();
      ConfigValue v = value();
      v.line = line;
      end_of_line();
      const std::string full = section.empty() ? key : section + "." + key;
      if (!out.emplace(full, std::move(v)).second) fail("duplicate key '" + full + "'");
    }
    return out;
  }

  ConfigValue single() {
    skip_space();
    ConfigValue v = value();
    skip_space();
    if (pos_ < text_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }
  }

  // Moves to the next meaningful character; false at end of input.
  bool skip_blank_lines() {
    while (true) {
      skip_space();
      skip_comment();
      if (pos_ >= text_.size()) return false;
      if (text_[pos_] != '\n') return true;
      ++pos_;
      ++line_;
    }
  }

  // Whitespace and newlines inside arrays.
  void skip_array_space() {
    while (true) {
      skip_space();
      skip_comment();
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }

  void end_of_line() {
    skip_space();
    skip_comment();
    if (pos_ < text_.size()) {
      if (text_[pos_] != '\n') fail("unexpected '" + std::string(1, text_[pos_]) + "'");
      ++pos_;
      ++line_;
    }
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) break;
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    return text_.substr(start, pos_ - start);
  }

  ConfigValue value() {
    ConfigValue v;
    v.line = line_;
    const char c = peek();
    if (c == '"' || c == '\'') {
      v.value = string(c);
    } else if (c == '[') {
      ++pos_;
      ConfigArray items;
      skip_array_space();
      while (peek() != ']') {
        items.push_back(value());
        skip_array_space();
        if (peek() == ',') {
          ++pos_;
          skip_array_space();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      ++pos_;
      v.value = std::move(items);
    } else {
      const std::size_t start = pos_;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (!(std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '-' || d == '+' || d == '.')) break;
        ++pos_;
      }
      std::string word = text_.substr(start, pos_ - start);
      if (word.empty()) fail("expected a value");
      if (word == "true" || word == "false") {
        v.value = word == "true";
      } else {
        v.value = number(word);
      }
    }
    return v;
  }

  std::string string(char quote) {
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
      char c = text_[pos_++];
      if (c == quote) return out;
      if (c == '\\' && quote == '"') {
        if (pos_ >= text_.size()) fail("unterminated string");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '\\': c = '\\'; break;
          case '"': c = '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
  }

  std::variant<std::int64_t, double, bool, std::string, ConfigArray> number(std::string word) {
    std::erase(word, '_');
    const char* b = word.data();
    const char* e = b + word.size();
    if (*b == '+') ++b;
    if (word.find_first_of(".eE") == std::string::npos || word == "inf" || word == "nan") {
      std::int64_t i = 0;
      auto [p, ec] = std::from_chars(b, e, i);
      if (ec == std::errc() && p == e) return i;
    } else {
      double d = 0.0;
      auto [p, ec] = std::from_chars(b, e, d);
      if (ec == std::errc() && p == e && std::isfinite(d)) return d;
    }
    fail("cannot parse value '" + word + "'");
  }

  const std::string& text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

// Typed reads from the flattened table. Every consumed key is recorded so
// leftovers can be reported as unknown.
class Reader {
 public:
  explicit Reader(const ConfigTable& t) : table_(t) {}

  bool has(const std::string& key) const { return table_.count(key) != 0; }

  const ConfigValue* find(const std::string& key) {
    used_.insert(key);
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  [[noreturn]] static void type_error(const std::string& key, const ConfigValue& v, const char* want) {
    throw ConfigError(key + ": expected " + want + " (line " + std::to_string(v.line) + ")");
  }

  static std::size_t as_count(const std::string& key, const ConfigValue& v) {
    const auto* i = std::get_if<std::int64_t>(&v.value);
    if (!i) type_error(key, v, "an integer");
    if (*i < 0) throw ConfigError(key + ": must be non-negative");
    return static_cast<std::size_t>(*i);
  }

  static double as_real(const std::string& key, const ConfigValue& v) {
    if (const auto* d = std::get_if<double>(&v.value)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v.value)) return static_cast<double>(*i);
    type_error(key, v, "a number");
  }

  void count(const std::string& key, std::size_t& out) {
    if (const auto* v = find(key)) out = as_count(key, *v);
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const auto* v = find(key)) out = as_count(key, *v);
  }

  void real(const std::string& key, double& out) {
    if (const auto* v = find(key)) out = as_real(key, *v);
  }

  void flag(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      const auto* b = std::get_if<bool>(&v->value);
      if (!b) type_error(key, *v, "true or false");
      out = *b;
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      const auto* s = std::get_if<std::string>(&v->value);
      if (!s) type_error(key, *v, "a string");
      out = *s;
    }
  }

  template <typename T, typename Convert>
  bool list(const std::string& key, std::vector<T>& out, Convert convert) {
    const auto* v = find(key);
    if (!v) return false;
    const auto* a = std::get_if<ConfigArray>(&v->value);
    if (!a) type_error(key, *v, "an array");
    out.clear();
    for (const auto& item : *a) out.push_back(convert(key, item));
    return true;
  }

  void reject_unknown() const {
    for (const auto& [key, v] : table_) {
      if (!used_.count(key)) {
        throw ConfigError("unknown key '" + key + "' (line " + std::to_string(v.line) + ")");
      }
    }
  }

 private:
  const ConfigTable& table_;
  std::set<std::string> used_;
};

// Accepts a single integer (repeated `n` times) or an explicit array.
bool per_scale(Reader& r, const std::string& key, std::vector<std::size_t>& out, std::size_t& uniform) {
  const ConfigValue* v = r.find(key);
  if (!v) return false;
  if (std::holds_alternative<ConfigArray>(v->value)) {
    out.clear();
    for (const auto& item : std::get<ConfigArray>(v->value)) out.push_back(Reader::as_count(key, item));
    uniform = 0;
    return true;
  }
  uniform = Reader::as_count(key, *v);
  return true;
}

void validate_run(const RunConfig& rc) {
  rc.model.validate();
  rc.split.validate();
  const TrainSettings& t = rc.train;
  if (t.batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (t.epochs == 0) throw ConfigError("train.epochs must be positive");
  if (!(std::isfinite(t.adam.learning_rate) && t.adam.learning_rate >= 0.0)) throw ConfigError("train.learning_rate must be >= 0");
  if (!(t.adam.beta1 >= 0.0 && t.adam.beta1 < 1.0)) throw ConfigError("train.beta1 must lie in [0, 1)");
  if (!(t.adam.beta2 >= 0.0 && t.adam.beta2 < 1.0)) throw ConfigError("train.beta2 must lie in [0, 1)");
  if (!(t.adam.eps > 0.0)) throw ConfigError("train.eps must be positive");
  if (rc.synthetic) {
    const SyntheticSpec& s = rc.synthetic_spec;
    if (s.steps == 0) throw ConfigError("synthetic.steps must be positive");
    if (s.variables == 0) throw ConfigError("synthetic.variables must be positive");
    if (s.periods.empty()) throw ConfigError("synthetic.periods must not be empty");
    for (double p : s.periods) {
      if (!(p > 0.0)) throw ConfigError("synthetic.periods entries must be positive");
    }
    if (!(s.noise >= 0.0)) throw ConfigError("synthetic.noise must be >= 0");
    if (!rc.variables_from_data && rc.model.variables != s.variables) {
      throw ConfigError("model.variables (" + std::to_string(rc.model.variables) + ") differs from synthetic.variables (" +
                        std::to_string(s.variables) + ")");
    }
  } else if (rc.data_path.empty()) {
    throw ConfigError("data.path: required key missing (or set data.synthetic = true)");
  }
}

std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

template <typename T, typename F>
std::string array_text(const std::vector<T>& v, F f) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out + "]";
}

}  // namespace

ConfigTable parse_config_table(const std::string& text, const std::string& source) {
  return Parser(text, source).table();
}

ConfigValue parse_config_value(const std::string& text, const std::string& source) {
  return Parser(text, source).single();
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& source) {
  ConfigTable table = parse_config_table(text, source);
  for (const std::string& o : overrides) {
    const std::size_t eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + o + "'");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    ConfigValue v;
    try {
      v = parse_config_value(raw, "--set " + key);
    } catch (const ConfigError&) {
      v.value = raw;  // bare words such as `avg` are taken as strings
    }
    v.line = 0;
    table[key] = std::move(v);
  }

  Reader r(table);
  RunConfig rc;
  ModelConfig& m = rc.model;

  r.count("model.input_len", m.input_len);
  r.count("model.horizon", m.horizon);
  if (r.has("model.variables")) {
    r.count("model.variables", m.variables);
    rc.variables_from_data = false;
  }
  std::size_t scales = 0;
  const bool scales_set = r.has("model.scales");
  r.count("model.scales", scales);
  std::size_t window_uniform = 4, size_uniform = 4;
  std::vector<std::size_t> windows, sizes;
  const bool windows_set = per_scale(r, "model.windows", windows, window_uniform);
  const bool sizes_set = per_scale(r, "model.hyperedge_sizes", sizes, size_uniform);
  const bool windows_array = windows_set && window_uniform == 0;
  const bool sizes_array = sizes_set && size_uniform == 0;
  if (!scales_set) {
    scales = windows_array ? windows.size() + 1 : sizes_array ? sizes.size() : 4;
  }
  if (scales < 2) throw ConfigError("model.scales must be at least 2");
  if (!windows_array) windows.assign(scales - 1, window_uniform);
  if (!sizes_array) sizes.assign(scales, size_uniform);
  if (windows.size() + 1 != scales) {
    throw ConfigError("model.windows has " + std::to_string(windows.size()) + " entries, expected scales - 1 = " +
                      std::to_string(scales - 1));
  }
  if (sizes.size() != scales) {
    throw ConfigError("model.hyperedge_sizes has " + std::to_string(sizes.size()) + " entries, expected scales = " +
                      std::to_string(scales));
  }
  m.windows = windows;
  m.hyperedge_sizes = sizes;
  r.count("model.hop", m.hop);
  r.count("model.d_model", m.d_model);
  r.count("model.heads", m.heads);
  r.count("model.embed_layers", m.embed_layers);
  r.count("model.blocks", m.blocks);
  r.real("model.mask_constant", m.mask_constant);
  std::string aggregation = to_string(m.aggregation);
  r.text("model.aggregation", aggregation);
  try {
    m.aggregation = parse_aggregation(aggregation);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("model.aggregation: ") + e.what());
  }
  r.flag("model.intra", m.kinds.intra);
  r.flag("model.inter", m.kinds.inter);
  r.flag("model.mixed", m.kinds.mixed);

  r.text("data.path", rc.data_path);
  r.flag("data.synthetic", rc.synthetic);
  std::vector<double> split;
  if (r.list("data.split", split, Reader::as_real)) {
    if (split.size() != 3) throw ConfigError("data.split: expected [train, val, test]");
    rc.split = {split[0], split[1], split[2]};
  }

  SyntheticSpec& s = rc.synthetic_spec;
  r.count("synthetic.steps", s.steps);
  r.count("synthetic.variables", s.variables);
  r.list("synthetic.periods", s.periods, Reader::as_real);
  r.real("synthetic.noise", s.noise);
  r.seed("synthetic.seed", s.seed);
  if (rc.synthetic && rc.variables_from_data) m.variables = s.variables;

  TrainSettings& t = rc.train;
  r.count("train.batch_size", t.batch_size);
  r.real("train.learning_rate", t.adam.learning_rate);
  r.real("train.beta1", t.adam.beta1);
  r.real("train.beta2", t.adam.beta2);
  r.real("train.eps", t.adam.eps);
  r.count("train.epochs", t.epochs);
  r.count("train.patience", t.patience);
  r.seed("train.seed", t.seed);

  r.text("run.out", rc.out_dir);

  r.reject_unknown();
  validate_run(rc);
  return rc;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides, path);
}

std::string RunConfig::canonical() const {
  auto count = [](std::size_t v) { return std::to_string(v); };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  std::ostringstream out;
  out << "[model]\n"
      << "input_len = " << model.input_len << "\n"
      << "horizon = " << model.horizon << "\n";
  if (!variables_from_data) out << "variables = " << model.variables << "\n";
  out << "scales = " << model.scales() << "\n"
      << "windows = " << array_text(model.windows, count) << "\n"
      << "hyperedge_sizes = " << array_text(model.hyperedge_sizes, count) << "\n"
      << "hop = " << model.hop << "\n"
      << "d_model = " << model.d_model << "\n"
      << "heads = " << model.heads << "\n"
      << "embed_layers = " << model.embed_layers << "\n"
      << "blocks = " << model.blocks << "\n"
      << "mask_constant = " << real_text(model.mask_constant) << "\n"
      << "aggregation = " << quoted(to_string(model.aggregation)) << "\n"
      << "intra = " << flag(model.kinds.intra) << "\n"
      << "inter = " << flag(model.kinds.inter) << "\n"
      << "mixed = " << flag(model.kinds.mixed) << "\n\n";
  out << "[data]\n";
  if (synthetic) {
    out << "synthetic = true\n";
  } else {
    out << "path = " << quoted(data_path) << "\n";
  }
  out << "split = " << array_text(std::vector<double>{split.train, split.val, split.test}, real_text) << "\n\n";
  if (synthetic) {
    out << "[synthetic]\n"
        << "steps = " << synthetic_spec.steps << "\n"
        << "variables = " << synthetic_spec.variables << "\n"
        << "periods = " << array_text(synthetic_spec.periods, real_text) << "\n"
        << "noise = " << real_text(synthetic_spec.noise) << "\n"
        << "seed = " << synthetic_spec.seed << "\n\n";
  }
  out << "[train]\n"
      << "batch_size = " << train.batch_size << "\n"
      << "learning_rate = " << real_text(train.adam.learning_rate) << "\n"
      << "beta1 = " << real_text(train.adam.beta1) << "\n"
      << "beta2 = " << real_text(train.adam.beta2) << "\n"
      << "eps = " << real_text(train.adam.eps) << "\n"
      << "epochs = " << train.epochs << "\n"
      << "patience = " << train.patience << "\n"
      << "seed = " << train.seed << "\n";
  return out.str();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mshyper
