#pragma once

// Key-value configuration tree and the builders that turn it into body,
// generator, engine and experiment specs. Grammar in docs/config.md.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "disclab/discrepancy.hpp"
#include "disclab/experiments.hpp"
#include "disclab/geometry.hpp"

namespace disclab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigNode;

/// A scalar keeps its source text; lists hold scalars; blocks nest.
struct ConfigScalar {
  std::string text;
  bool quoted = false;
};
using ConfigList = std::vector<ConfigScalar>;
using ConfigValue = std::variant<ConfigScalar, ConfigList, std::shared_ptr<ConfigNode>>;

/// Ordered entries; a key may repeat (e.g. several `generator { }` blocks).
/// Every lookup marks the key as used so unknown keys can be reported.
class ConfigNode {
 public:
  struct Entry {
    std::string key;
    ConfigValue value;
    int line = 0;
  };

  void add(std::string key, ConfigValue v, int line) { entries_.push_back({std::move(key), std::move(v), line}); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool has(const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.key == key) return true;
    }
    return false;
  }

  const Entry* find(const std::string& key) const {
    const Entry* hit = nullptr;
    for (const auto& e : entries_) {
      if (e.key != key) continue;
      if (hit) throw ConfigError(where(e) + "duplicate key '" + key + "'");
      hit = &e;
    }
    if (hit) used_.insert(key);
    return hit;
  }

  std::vector<const ConfigNode*> blocks(const std::string& key) const {
    std::vector<const ConfigNode*> out;
    for (const auto& e : entries_) {
      if (e.key != key) continue;
      const auto* b = std::get_if<std::shared_ptr<ConfigNode>>(&e.value);
      if (!b) throw ConfigError(where(e) + "'" + key + "' must be a block");
      out.push_back(b->get());
    }
    used_.insert(key);
    return out;
  }

  const ConfigNode* block(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return nullptr;
    const auto* b = std::get_if<std::shared_ptr<ConfigNode>>(&e->value);
    if (!b) throw ConfigError(where(*e) + "'" + key + "' must be a block");
    return b->get();
  }

  std::optional<std::string> string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const auto* s = std::get_if<ConfigScalar>(&e->value);
    if (!s) throw ConfigError(where(*e) + "'" + key + "' must be a scalar");
    return s->text;
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    return string(key).value_or(fallback);
  }

  std::optional<double> number(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const auto* s = std::get_if<ConfigScalar>(&e->value);
    if (!s) throw ConfigError(where(*e) + "'" + key + "' must be a number");
    return to_number(*s, *e);
  }

  double number_or(const std::string& key, double fallback) const {
    return number(key).value_or(fallback);
  }

  std::optional<std::uint64_t> integer(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const auto* s = std::get_if<ConfigScalar>(&e->value);
    if (!s) throw ConfigError(where(*e) + "'" + key + "' must be an integer");
    return to_integer(*s, *e);
  }

  std::optional<bool> boolean(const std::string& key) const {
    const auto s = string(key);
    if (!s) return std::nullopt;
    if (*s == "true") return true;
    if (*s == "false") return false;
    throw ConfigError("'" + key + "' must be true or false");
  }

  std::optional<std::vector<double>> numbers(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const auto* l = std::get_if<ConfigList>(&e->value);
    if (!l) throw ConfigError(where(*e) + "'" + key + "' must be a list");
    std::vector<double> out;
    for (const auto& s : *l) out.push_back(to_number(s, *e));
    return out;
  }

  std::optional<std::vector<std::uint64_t>> integers(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const auto* l = std::get_if<ConfigList>(&e->value);
    if (!l) throw ConfigError(where(*e) + "'" + key + "' must be a list");
    std::vector<std::uint64_t> out;
    for (const auto& s : *l) out.push_back(to_integer(s, *e));
    return out;
  }

  /// Throws on any key never looked up, here or in nested blocks.
  void require_all_used(const std::string& context = "") const {
    for (const auto& e : entries_) {
      if (!used_.contains(e.key)) {
        throw ConfigError(where(e) + "unknown key '" + e.key + "'" +
                          (context.empty() ? "" : " in " + context));
      }
      if (const auto* b = std::get_if<std::shared_ptr<ConfigNode>>(&e.value)) {
        (*b)->require_all_used(e.key);
      }
    }
  }

 private:
  static std::string where(const Entry& e) {
    return e.line > 0 ? "line " + std::to_string(e.line) + ": " : "";
  }
  static double to_number(const ConfigScalar& s, const Entry& e) {
    if (s.quoted) throw ConfigError(where(e) + "'" + e.key + "' must be an unquoted number");
    double v = 0.0;
    const char* end = s.text.data() + s.text.size();
    const auto [p, ec] = std::from_chars(s.text.data(), end, v);
    if (ec != std::errc() || p != end) {
      throw ConfigError(where(e) + "'" + e.key + "': not a number: " + s.text);
    }
    return v;
  }
  static std::uint64_t to_integer(const ConfigScalar& s, const Entry& e) {
    if (s.quoted) throw ConfigError(where(e) + "'" + e.key + "' must be an unquoted integer");
    std::uint64_t v = 0;
    const char* end = s.text.data() + s.text.size();
    const auto [p, ec] = std::from_chars(s.text.data(), end, v);
    if (ec != std::errc() || p != end) {
      throw ConfigError(where(e) + "'" + e.key + "': not a nonnegative integer: " + s.text);
    }
    return v;
  }

  std::vector<Entry> entries_;
  mutable std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Parser.

namespace detail {

class ConfigParser {
 public:
  explicit ConfigParser(std::string src) : src_(std::move(src)) {}

  std::shared_ptr<ConfigNode> parse() {
    auto root = parse_entries(false);
    skip_space();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + msg);
  }

  // Skips blanks, newlines, commas and `#` comments between entries.
  void skip_space(bool commas = true) {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || (commas && c == ',') || c == ';') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  static bool key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }
  static bool bare_char(char c) {
    return !(std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '{' || c == '}' ||
             c == '[' || c == ']' || c == '=' || c == '#' || c == '"' || c == ';');
  }

  std::shared_ptr<ConfigNode> parse_entries(bool nested) {
    auto node = std::make_shared<ConfigNode>();
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        if (nested) fail("missing '}'");
        return node;
      }
      if (src_[pos_] == '}') {
        if (!nested) fail("unmatched '}'");
        ++pos_;
        return node;
      }
      const std::size_t k0 = pos_;
      while (pos_ < src_.size() && key_char(src_[pos_])) ++pos_;
      if (pos_ == k0) fail("expected a key");
      std::string key = src_.substr(k0, pos_ - k0);
      const int line = line_;
      skip_space(false);
      if (pos_ < src_.size() && src_[pos_] == '{') {
        ++pos_;
        node->add(std::move(key), parse_entries(true), line);
        continue;
      }
      if (pos_ >= src_.size() || src_[pos_] != '=') fail("expected '=' or '{' after '" + key + "'");
      ++pos_;
      skip_space(false);
      if (pos_ < src_.size() && src_[pos_] == '[') {
        ++pos_;
        node->add(std::move(key), parse_list(), line);
      } else if (pos_ < src_.size() && src_[pos_] == '{') {
        ++pos_;
        node->add(std::move(key), parse_entries(true), line);
      } else {
        node->add(std::move(key), parse_scalar(), line);
      }
    }
  }

  ConfigList parse_list() {
    ConfigList out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) fail("missing ']'");
      if (src_[pos_] == ']') {
        ++pos_;
        return out;
      }
      out.push_back(parse_scalar());
    }
  }

  ConfigScalar parse_scalar() {
    if (pos_ >= src_.size()) fail("expected a value");
    if (src_[pos_] == '"') {
      ++pos_;
      std::string s;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\n') fail("newline in string");
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
        s += src_[pos_++];
      }
      if (pos_ >= src_.size()) fail("unterminated string");
      ++pos_;
      return {s, true};
    }
    const std::size_t v0 = pos_;
    while (pos_ < src_.size() && bare_char(src_[pos_])) ++pos_;
    if (pos_ == v0) fail("expected a value");
    return {src_.substr(v0, pos_ - v0), false};
  }

  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace detail

inline std::shared_ptr<ConfigNode> parse_config(const std::string& text) {
  return detail::ConfigParser(text).parse();
}

inline std::shared_ptr<ConfigNode> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Spec builders. Inline specs such as `kind=disk,r=0.25` parse with the same
// grammar as config blocks.

inline BodySpec body_spec_from(const ConfigNode& n) {
  const auto kind = n.string("kind");
  if (!kind) throw ConfigError("body: missing 'kind'");
  BodySpec s;
  s.kind = body_kind_from_string(*kind);
  switch (s.kind) {
    case BodyKind::disk: s.radius = n.number_or("r", s.radius); break;
    case BodyKind::axis_square: s.side = n.number_or("side", s.side); break;
    case BodyKind::regular_polygon:
      s.vertices = static_cast<int>(n.integer("k").value_or(static_cast<std::uint64_t>(s.vertices)));
      s.circumradius = n.number_or("R", s.circumradius);
      break;
    case BodyKind::c_sigma:
    case BodyKind::lens: s.sigma = n.number_or("sigma", s.sigma); break;
    case BodyKind::c_one: break;
    case BodyKind::custom_profile: {
      // support = "θ:h θ:h ..." with θ in radians.
      const auto sup = n.string("support");
      if (!sup) throw ConfigError("body: custom_profile needs 'support'");
      std::stringstream ss(*sup);
      std::string item;
      while (std::getline(ss, item, ' ')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("body: support item needs θ:h, got " + item);
        s.support.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
      }
      break;
    }
  }
  s.center = {n.number_or("cx", 0.0), n.number_or("cy", 0.0)};
  n.require_all_used("body");
  return s;
}

/// Parses `kind=...,key=value,...`.
inline BodySpec parse_body_spec(const std::string& inline_spec) {
  return body_spec_from(*parse_config(inline_spec));
}

inline GeneratorSpec generator_spec_from(const ConfigNode& n) {
  const auto kind = n.string("kind");
  if (!kind) throw ConfigError("generator: missing 'kind'");
  GeneratorSpec g;
  g.kind = generator_kind_from_string(*kind);
  g.sigma = n.number_or("sigma", g.sigma);
  if (const auto j = n.integer("j")) g.j = *j;
  if (const auto j = n.integer("N")) g.j = *j;
  if (const auto K = n.integer("K")) g.K = *K;
  if (const auto L = n.integer("L")) g.L = *L;
  if (const auto s = n.integer("seed")) g.seed = *s;
  g.point = {n.number_or("x", g.point.x), n.number_or("y", g.point.y)};
  n.require_all_used("generator");
  return g;
}

inline GeneratorSpec parse_generator_spec(const std::string& inline_spec) {
  return generator_spec_from(*parse_config(inline_spec));
}

/// Reads policy keys M0, growth, eps_rel, window, M_max, dense, dense_units into `p`.
inline void policy_from(const ConfigNode& n, TruncationPolicy& p) {
  p.M0 = n.number_or("M0", p.M0);
  p.growth = n.number_or("growth", p.growth);
  p.eps_rel = n.number_or("eps_rel", p.eps_rel);
  if (const auto w = n.integer("window")) p.window = static_cast<int>(*w);
  p.M_max = n.number_or("M_max", p.M_max);
  if (const auto d = n.boolean("dense")) p.force_dense = *d;
  if (const auto u = n.string("dense_units")) p.dense_units = dense_units_from_string(*u);
  p.validate();
}

inline TruncationPolicy parse_policy(const std::string& inline_spec) {
  TruncationPolicy p;
  const auto node = parse_config(inline_spec);
  policy_from(*node, p);
  node->require_all_used("policy");
  return p;
}

inline EngineSpec engine_spec_from(const ConfigNode& n) {
  EngineSpec e;
  e.kind = engine_kind_from_string(n.string_or("kind", "parseval"));
  if (const auto s = n.integer("samples")) e.samples = *s;
  policy_from(n, e.policy);
  n.require_all_used("engine");
  return e;
}

inline LambdaRange lambda_from(const ConfigNode& n, LambdaRange fallback) {
  const auto v = n.numbers("lambda");
  if (!v) return fallback;
  if (v->size() != 2) throw ConfigError("'lambda' must be [lo, hi]");
  return {(*v)[0], (*v)[1]};
}

inline std::vector<std::size_t> sizes_from(const ConfigNode& n) {
  const auto v = n.integers("sizes");
  if (!v) throw ConfigError("missing 'sizes'");
  return {v->begin(), v->end()};
}

inline ExperimentConfig experiment_config_from(const ConfigNode& n, std::uint64_t seed) {
  ExperimentConfig c;
  const ConfigNode* body = n.block("body");
  if (!body) throw ConfigError("experiment: missing 'body' block");
  c.body = body_spec_from(*body);
  const ConfigNode* gen = n.block("generator");
  if (!gen) throw ConfigError("experiment: missing 'generator' block");
  c.generator = generator_spec_from(*gen);
  c.sizes = sizes_from(n);
  c.range = lambda_from(n, c.range);
  if (const ConfigNode* e = n.block("engine")) c.engine = engine_spec_from(*e);
  c.seed = seed;
  const double sigma = c.body.kind == BodyKind::c_one ? 1.0 : c.generator.sigma;
  c.exponent = n.number_or("exponent", grid_exponent(sigma));
  c.tolerance = n.number_or("tolerance", c.tolerance);
  c.output = n.string_or("output", "");
  c.validate();
  return c;
}

inline EnvelopeConfig envelope_config_from(const ConfigNode& n, std::uint64_t seed) {
  EnvelopeConfig c;
  const ConfigNode* body = n.block("body");
  if (!body) throw ConfigError("envelope: missing 'body' block");
  c.body = body_spec_from(*body);
  for (const ConfigNode* g : n.blocks("generator")) c.generators.push_back(generator_spec_from(*g));
  c.sizes = sizes_from(n);
  c.range = lambda_from(n, c.range);
  if (const ConfigNode* e = n.block("engine")) c.engine = engine_spec_from(*e);
  c.seed = seed;
  const auto ex = n.number("exponent");
  if (!ex) throw ConfigError("envelope: missing 'exponent'");
  c.exponent = *ex;
  c.trend_floor = n.number_or("trend_floor", c.trend_floor);
  c.validate();
  return c;
}

}  // namespace disclab
