#include "cosserat/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

namespace cosserat {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  fail(ErrorKind::Parse, "config line " + std::to_string(line) + ": " + msg);
}

struct ValueParser {
  const std::string& s;
  std::size_t pos = 0;
  std::size_t line;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  TomlValue parse() {
    skip_ws();
    if (pos >= s.size()) parse_fail(line, "missing value");
    const char c = s[pos];
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_keyword();
    return parse_number();
  }

  TomlValue parse_string() {
    ++pos;
    std::string out;
    while (pos < s.size() && s[pos] != '"') {
      if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
      out += s[pos++];
    }
    if (pos >= s.size()) parse_fail(line, "unterminated string");
    ++pos;
    return TomlValue{out};
  }

  TomlValue parse_array() {
    ++pos;
    std::vector<TomlValue> items;
    skip_ws();
    if (pos < s.size() && s[pos] == ']') {
      ++pos;
      return TomlValue{items};
    }
    for (;;) {
      items.push_back(parse());
      skip_ws();
      if (pos < s.size() && s[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < s.size() && s[pos] == ']') {
        ++pos;
        return TomlValue{items};
      }
      parse_fail(line, "expected ',' or ']' in array");
    }
  }

  TomlValue parse_keyword() {
    std::size_t end = pos;
    while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
    const std::string word = s.substr(pos, end - pos);
    pos = end;
    if (word == "true") return TomlValue{true};
    if (word == "false") return TomlValue{false};
    parse_fail(line, "unknown keyword '" + word + "'");
  }

  TomlValue parse_number() {
    std::size_t end = pos;
    while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
                              s[end] == '-' || s[end] == '+' || s[end] == 'e' || s[end] == 'E' ||
                              s[end] == '_'))
      ++end;
    std::string text = s.substr(pos, end - pos);
    std::erase(text, '_');
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
      pos = end;
      return TomlValue{v};
    } catch (...) {
      parse_fail(line, "bad number '" + text + "'");
    }
  }
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

} // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
  std::map<std::string, TomlValue> out;
  std::istringstream in(text);
  std::string raw;
  std::string table;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(line_no, "missing ']' in table header");
      table = trim(line.substr(1, line.size() - 2));
      if (table.empty()) parse_fail(line_no, "empty table name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) parse_fail(line_no, "empty key");
    ValueParser vp{line.substr(eq + 1), 0, line_no};
    TomlValue v = vp.parse();
    vp.skip_ws();
    if (vp.pos != vp.s.size()) parse_fail(line_no, "trailing input after value");
    const std::string path = table.empty() ? key : table + "." + key;
    if (out.count(path)) parse_fail(line_no, "duplicate key '" + path + "'");
    out.emplace(path, std::move(v));
  }
  return out;
}

namespace {

[[noreturn]] void semantic_fail(const std::string& path, const std::string& msg) {
  fail(ErrorKind::Semantic, "config key '" + path + "': " + msg);
}

double need_number(const TomlValue& v, const std::string& path) {
  if (!v.is_number()) semantic_fail(path, "expected a number");
  return v.num();
}

int need_int(const TomlValue& v, const std::string& path) {
  const double d = need_number(v, path);
  if (d != std::floor(d)) semantic_fail(path, "expected an integer");
  return int(d);
}

std::string need_string(const TomlValue& v, const std::string& path) {
  if (!v.is_string()) semantic_fail(path, "expected a string");
  return v.str();
}

std::vector<std::string> need_string_array(const TomlValue& v, const std::string& path) {
  if (!v.is_array()) semantic_fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v.array()) out.push_back(need_string(item, path));
  return out;
}

Vec need_point(const TomlValue& v, const std::string& path, int dim) {
  if (!v.is_array()) semantic_fail(path, "expected an array of numbers");
  Vec out;
  for (const auto& item : v.array()) out.push_back(need_number(item, path));
  if (int(out.size()) != dim)
    semantic_fail(path, "expected " + std::to_string(dim) + " coordinates");
  return out;
}

std::vector<Vec> need_points(const TomlValue& v, const std::string& path, int dim) {
  if (!v.is_array()) semantic_fail(path, "expected an array of points");
  std::vector<Vec> out;
  for (const auto& item : v.array()) out.push_back(need_point(item, path, dim));
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "chart.dim",        "chart.box",
      "medium.name",      "medium.plugin",       "medium.A",
      "tolerances.fd_step", "tolerances.abs_tol", "tolerances.rel_tol",
      "tolerances.max_iter", "tolerances.rng_seed",
      "sampler.num_deformations", "sampler.jet_scale", "sampler.seed",
      "sampler.exhaustive_stencil",
      "run.grid",         "run.z0",              "run.points",
      "run.symmetry_points",
      "candidate.kappa",  "candidate.frame",
      "prolong.P",        "prolong.Q",         "prolong.csv",
      "prolong.nodes",
  };
  return keys;
}

std::mutex plugin_mutex;
std::map<std::string, ResponseFunction>& plugin_registry() {
  static std::map<std::string, ResponseFunction> reg;
  return reg;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
  const auto kv = parse_toml(text);
  for (const auto& [path, value] : kv) {
    (void)value;
    if (!known_keys().count(path)) semantic_fail(path, "unknown key");
  }
  auto get = [&](const std::string& path) -> const TomlValue* {
    const auto it = kv.find(path);
    return it == kv.end() ? nullptr : &it->second;
  };

  RunConfig cfg;
  cfg.chart.dim = get("chart.dim") ? need_int(*get("chart.dim"), "chart.dim") : 3;
  if (cfg.chart.dim < 1 || cfg.chart.dim > 8)
    semantic_fail("chart.dim", "dimension must be between 1 and 8");
  if (const TomlValue* v = get("chart.box")) {
    if (!v->is_array()) semantic_fail("chart.box", "expected an array of [lo, hi] pairs");
    for (const auto& pair : v->array()) {
      const Vec p = need_point(pair, "chart.box", 2);
      cfg.chart.box.emplace_back(p[0], p[1]);
    }
  } else {
    cfg.chart.box.assign(cfg.chart.dim, {0.0, 1.0});
  }
  cfg.chart.validate();

  const bool has_name = get("medium.name") != nullptr;
  const bool has_plugin = get("medium.plugin") != nullptr;
  if (has_name == has_plugin)
    semantic_fail("medium", "exactly one of medium.name / medium.plugin is required");
  if (has_name) {
    cfg.medium.name = need_string(*get("medium.name"), "medium.name");
  } else {
    cfg.medium.name = need_string(*get("medium.plugin"), "medium.plugin");
    cfg.medium.is_plugin = true;
  }
  if (const TomlValue* v = get("medium.A"))
    cfg.medium.implant_entries = need_string_array(*v, "medium.A");

  if (const TomlValue* v = get("tolerances.fd_step"))
    cfg.tolerances.fd_step = need_number(*v, "tolerances.fd_step");
  if (const TomlValue* v = get("tolerances.abs_tol"))
    cfg.tolerances.abs_tol = need_number(*v, "tolerances.abs_tol");
  if (const TomlValue* v = get("tolerances.rel_tol"))
    cfg.tolerances.rel_tol = need_number(*v, "tolerances.rel_tol");
  if (const TomlValue* v = get("tolerances.max_iter"))
    cfg.tolerances.max_iter = need_int(*v, "tolerances.max_iter");
  if (const TomlValue* v = get("tolerances.rng_seed")) {
    const double d = need_number(*v, "tolerances.rng_seed");
    if (d < 0) semantic_fail("tolerances.rng_seed", "seed must be non-negative");
    cfg.tolerances.rng_seed = std::uint64_t(d);
  }
  cfg.tolerances.validate();

  if (const TomlValue* v = get("sampler.num_deformations"))
    cfg.sampler.num_deformations = need_int(*v, "sampler.num_deformations");
  if (const TomlValue* v = get("sampler.jet_scale"))
    cfg.sampler.jet_scale = need_number(*v, "sampler.jet_scale");
  if (const TomlValue* v = get("sampler.seed")) {
    const double d = need_number(*v, "sampler.seed");
    if (d < 0) semantic_fail("sampler.seed", "seed must be non-negative");
    cfg.sampler.seed = std::uint64_t(d);
  } else {
    cfg.sampler.seed = cfg.tolerances.rng_seed;
  }
  if (const TomlValue* v = get("sampler.exhaustive_stencil")) {
    if (!v->is_bool()) semantic_fail("sampler.exhaustive_stencil", "expected true/false");
    cfg.sampler.exhaustive_stencil = v->boolean();
  }
  cfg.sampler.validate();

  if (const TomlValue* v = get("run.grid")) {
    cfg.grid = need_int(*v, "run.grid");
    if (cfg.grid < 2 || cfg.grid > 64) semantic_fail("run.grid", "grid must be in [2, 64]");
  }
  if (const TomlValue* v = get("run.z0")) {
    cfg.z0 = need_point(*v, "run.z0", cfg.chart.dim);
    if (!cfg.chart.contains(*cfg.z0, 1e-12)) semantic_fail("run.z0", "point outside chart box");
  }
  if (const TomlValue* v = get("run.points")) {
    cfg.points = need_points(*v, "run.points", cfg.chart.dim);
    for (const Vec& p : cfg.points)
      if (!cfg.chart.contains(p, 1e-12)) semantic_fail("run.points", "point outside chart box");
  }
  if (const TomlValue* v = get("run.symmetry_points")) {
    cfg.symmetry_points = need_points(*v, "run.symmetry_points", cfg.chart.dim);
    for (const Vec& p : cfg.symmetry_points)
      if (!cfg.chart.contains(p, 1e-12))
        semantic_fail("run.symmetry_points", "point outside chart box");
  }

  if (const TomlValue* v = get("candidate.kappa"))
    cfg.candidate_kappa = need_string_array(*v, "candidate.kappa");
  if (const TomlValue* v = get("candidate.frame"))
    cfg.candidate_frame = need_string_array(*v, "candidate.frame");
  if (!cfg.candidate_kappa.empty() && int(cfg.candidate_kappa.size()) != cfg.chart.dim)
    semantic_fail("candidate.kappa", "needs dim entries");
  if (!cfg.candidate_frame.empty() &&
      int(cfg.candidate_frame.size()) != cfg.chart.dim * cfg.chart.dim)
    semantic_fail("candidate.frame", "needs dim^2 entries");

  if (const TomlValue* v = get("prolong.P")) cfg.prolong_p = need_string_array(*v, "prolong.P");
  if (const TomlValue* v = get("prolong.Q")) cfg.prolong_q = need_string_array(*v, "prolong.Q");
  if (const TomlValue* v = get("prolong.csv")) cfg.prolong_csv = need_string(*v, "prolong.csv");
  if (const TomlValue* v = get("prolong.nodes")) {
    if (!v->is_array()) semantic_fail("prolong.nodes", "expected an array of integers");
    for (const auto& item : v->array()) {
      const int k = need_int(item, "prolong.nodes");
      if (k < 2) semantic_fail("prolong.nodes", "needs at least 2 nodes per axis");
      cfg.prolong_nodes.push_back(k);
    }
    if (int(cfg.prolong_nodes.size()) != cfg.chart.dim)
      semantic_fail("prolong.nodes", "needs dim entries");
  }

  // expression syntax is validated at parse time
  const int n = cfg.chart.dim;
  if (!cfg.medium.implant_entries.empty()) MatrixExpr(cfg.medium.implant_entries, n);
  for (const auto& src : cfg.candidate_kappa) Expression::parse(src, n);
  if (!cfg.candidate_frame.empty()) MatrixExpr(cfg.candidate_frame, n);
  if (!cfg.prolong_p.empty()) MatrixExpr(cfg.prolong_p, n);
  if (!cfg.prolong_q.empty()) MatrixExpr(cfg.prolong_q, n);

  if (cfg.medium.name == "implant" && !cfg.medium.is_plugin && cfg.medium.implant_entries.empty())
    semantic_fail("medium.A", "implant medium needs its reference field A");

  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ResponseFunction medium_from_config(const RunConfig& cfg) {
  if (cfg.medium.is_plugin) {
    std::lock_guard<std::mutex> lock(plugin_mutex);
    const auto it = plugin_registry().find(cfg.medium.name);
    if (it == plugin_registry().end())
      fail(ErrorKind::Semantic, "plug-in medium '" + cfg.medium.name + "' is not registered");
    if (it->second.n != cfg.chart.dim)
      fail(ErrorKind::Semantic, "plug-in medium dimension disagrees with chart.dim");
    return it->second;
  }
  std::optional<MatrixField> a;
  if (!cfg.medium.implant_entries.empty()) {
    const MatrixExpr expr(cfg.medium.implant_entries, cfg.chart.dim);
    a = [expr](const Vec& x) { return expr.eval(x); };
  }
  return builtin_media(cfg.medium.name, cfg.chart.dim, a);
}

void register_plugin_response(const std::string& name, ResponseFunction w) {
  if (name.empty()) fail(ErrorKind::Semantic, "plug-in medium needs a name");
  if (w.n < 1 || w.d < 1 || !w.eval)
    fail(ErrorKind::Semantic, "plug-in medium needs positive dimensions and an evaluator");
  std::lock_guard<std::mutex> lock(plugin_mutex);
  plugin_registry()[name] = std::move(w);
}

void clear_plugin_responses() {
  std::lock_guard<std::mutex> lock(plugin_mutex);
  plugin_registry().clear();
}

} // namespace cosserat
