#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gradcert/cli.hpp"
#include "gradcert/errors.hpp"

namespace gradcert::cli {

namespace {

struct Value {
  enum class Kind { Scalar, String, Array };
  Kind kind = Kind::Scalar;
  std::string text;
  std::vector<Value> items;
  int line = 0;
};

struct Entry {
  Value value;
  int line = 0;
};

class Document {
 public:
  Document(std::string_view text, std::string source) : source_(std::move(source)) { parse(text); }

  const std::string& source() const { return source_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const Entry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

 private:
  static std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
  }

  static int depth_change(const std::string& s) {
    int d = 0;
    bool quoted = false;
    for (char ch : s) {
      if (ch == '"') quoted = !quoted;
      if (quoted) continue;
      if (ch == '[') ++d;
      if (ch == ']') --d;
    }
    return d;
  }

  static bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char ch : k)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')) return false;
    return k.front() != '.' && k.back() != '.';
  }

  void parse(std::string_view text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) lines.push_back(cur);

    std::string section;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const int line_no = static_cast<int>(i) + 1;
      const std::string line = trim(strip_comment(lines[i]));
      if (line.empty()) continue;
      if (line.front() == '[' && line.find('=') == std::string::npos) {
        if (line.back() != ']') fail(line_no, "malformed section header");
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        if (!valid_key(section)) fail(line_no, "invalid section name '" + section + "'");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      const std::string key = trim(std::string_view(line).substr(0, eq));
      if (!valid_key(key)) fail(line_no, "invalid key '" + key + "'");
      std::string value = trim(std::string_view(line).substr(eq + 1));
      int depth = depth_change(value);
      while (depth > 0) {
        if (++i >= lines.size()) fail(line_no, "unterminated array for key '" + key + "'");
        const std::string more = trim(strip_comment(lines[i]));
        value += " " + more;
        depth += depth_change(more);
      }
      if (depth < 0) fail(line_no, "unbalanced ']' in value of '" + key + "'");
      const std::string full = section.empty() ? key : section + "." + key;
      if (entries_.count(full)) fail(line_no, "duplicate key '" + full + "'");
      std::size_t pos = 0;
      Value v = parse_value(value, pos, line_no, full);
      skip_ws(value, pos);
      if (pos != value.size()) fail(line_no, "unexpected text after value of '" + full + "'");
      entries_[full] = Entry{std::move(v), line_no};
    }
  }

  static void skip_ws(const std::string& s, std::size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  Value parse_value(const std::string& s, std::size_t& pos, int line, const std::string& key) const {
    skip_ws(s, pos);
    Value v;
    v.line = line;
    if (pos >= s.size()) fail(line, "missing value for '" + key + "'");
    if (s[pos] == '"') {
      const auto end = s.find('"', pos + 1);
      if (end == std::string::npos) fail(line, "unterminated string in '" + key + "'");
      v.kind = Value::Kind::String;
      v.text = s.substr(pos + 1, end - pos - 1);
      pos = end + 1;
      return v;
    }
    if (s[pos] == '[') {
      v.kind = Value::Kind::Array;
      ++pos;
      skip_ws(s, pos);
      if (pos < s.size() && s[pos] == ']') {
        ++pos;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value(s, pos, line, key));
        skip_ws(s, pos);
        if (pos >= s.size()) fail(line, "unterminated array in '" + key + "'");
        if (s[pos] == ',') {
          ++pos;
          skip_ws(s, pos);
          if (pos < s.size() && s[pos] == ']') {
            ++pos;
            return v;
          }
          continue;
        }
        if (s[pos] == ']') {
          ++pos;
          return v;
        }
        fail(line, "expected ',' or ']' in '" + key + "'");
      }
    }
    const auto start = pos;
    while (pos < s.size() && s[pos] != ',' && s[pos] != '[' && s[pos] != ']' && s[pos] != '"') ++pos;
    v.kind = Value::Kind::Scalar;
    v.text = trim(std::string_view(s).substr(start, pos - start));
    if (v.text.empty()) fail(line, "empty value in '" + key + "'");
    return v;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "dim",           "vars",          "grid_n",        "domain.lo",      "domain.hi",
      "phi",           "X",             "g",             "omega",          "J",
      "phi_tilde",     "steps",         "radius",        "seed",           "tol.newton",
      "tol.step",      "tol.dedup",     "tol.match",     "tol.eig_zero",   "tol.third",
      "tol.residual",  "tol.delta_floor", "tol.symmetry", "tol.partition", "tol.decay_factor",
      "tol.decay_r0",  "tol.r_excl"};
  return keys;
}

class Builder {
 public:
  explicit Builder(const Document& doc) : doc_(doc) {}

  double number(const std::string& key, const Value& v) const {
    if (v.kind == Value::Kind::Array) doc_.fail(v.line, "key '" + key + "' expects a number");
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.text.c_str(), &end);
    if (v.text.empty() || end != v.text.c_str() + v.text.size() || errno == ERANGE || !std::isfinite(d))
      doc_.fail(v.line, "key '" + key + "' expects a number, got '" + v.text + "'");
    return d;
  }

  std::size_t integer(const std::string& key, const Value& v, std::size_t min) const {
    const double d = number(key, v);
    if (d != std::floor(d) || d < static_cast<double>(min) || d > 1e9)
      doc_.fail(v.line, "key '" + key + "' expects an integer >= " + std::to_string(min));
    return static_cast<std::size_t>(d);
  }

  std::vector<double> numbers(const std::string& key, const Value& v, std::size_t n) const {
    if (v.kind != Value::Kind::Array) return std::vector<double>(n, number(key, v));
    if (v.items.size() != n)
      doc_.fail(v.line, "key '" + key + "' expects " + std::to_string(n) + " entries, got " +
                            std::to_string(v.items.size()));
    std::vector<double> out;
    for (const auto& it : v.items) out.push_back(number(key, it));
    return out;
  }

  Expr expr(const std::string& key, const Value& v, const std::vector<std::string>& vars) const {
    if (v.kind == Value::Kind::Array) doc_.fail(v.line, "key '" + key + "' expects an expression");
    try {
      return parse(v.text, vars);
    } catch (const ParseError& e) {
      doc_.fail(v.line, "key '" + key + "': parse error at column " + std::to_string(e.position() + 1) + ": " +
                            e.message() + " (expected " + e.expected() + ")");
    }
  }

  std::vector<Expr> vector(const std::string& key, const Value& v, const std::vector<std::string>& vars) const {
    const std::size_t m = vars.size();
    if (v.kind != Value::Kind::Array) {
      if (m == 1) return {expr(key, v, vars)};
      doc_.fail(v.line, "key '" + key + "' expects an array of " + std::to_string(m) + " expressions");
    }
    if (v.items.size() != m)
      doc_.fail(v.line, "key '" + key + "' expects " + std::to_string(m) + " components, got " +
                            std::to_string(v.items.size()));
    std::vector<Expr> out;
    for (const auto& it : v.items) out.push_back(expr(key, it, vars));
    return out;
  }

  ExprMatrix matrix(const std::string& key, const Value& v, const std::vector<std::string>& vars) const {
    const std::size_t m = vars.size();
    auto shape_error = [&](const std::string& got) {
      doc_.fail(v.line, "key '" + key + "' must be a " + std::to_string(m) + "x" + std::to_string(m) +
                            " matrix, got " + got);
    };
    if (v.kind != Value::Kind::Array) shape_error("a scalar");
    for (const auto& row : v.items)
      if (row.kind != Value::Kind::Array) shape_error("a flat array");
    const std::size_t cols = v.items.empty() ? 0 : v.items.front().items.size();
    for (const auto& row : v.items)
      if (row.items.size() != cols) shape_error("ragged rows");
    if (v.items.size() != m || cols != m)
      shape_error(std::to_string(v.items.size()) + "x" + std::to_string(cols));
    ExprMatrix out(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out(i, j) = expr(key, v.items[i].items[j], vars);
    return out;
  }

 private:
  const Document& doc_;
};

std::vector<std::string> default_vars(std::size_t m) {
  if (m == 1) return {"x"};
  if (m == 2) return {"x", "y"};
  if (m == 3) return {"x", "y", "z"};
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= m; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

}  // namespace

void ProblemSpec::require(std::string_view key) const {
  bool present = false;
  if (key == "phi") present = phi.has_value();
  else if (key == "X") present = x.has_value();
  else if (key == "g") present = g.has_value();
  else if (key == "omega") present = omega.has_value();
  else if (key == "J") present = j.has_value();
  else if (key == "phi_tilde") present = phi_tilde.has_value();
  if (!present) throw ConfigError(source + ": missing required key '" + std::string(key) + "'");
}

ProblemSpec parse_problem(std::string_view text, const std::string& source) {
  const Document doc(text, source);
  const Builder b(doc);
  for (const auto& [key, entry] : doc.entries())
    if (!known_keys().count(key)) doc.fail(entry.line, "unknown key '" + key + "'");

  ProblemSpec spec;
  spec.source = source;
  const Entry* dim = doc.find("dim");
  if (!dim) throw ConfigError(source + ": missing required key 'dim'");
  spec.dim = b.integer("dim", dim->value, 1);

  if (const Entry* e = doc.find("vars")) {
    const Value& v = e->value;
    if (v.kind != Value::Kind::Array) doc.fail(v.line, "key 'vars' expects an array of names");
    for (const auto& it : v.items) {
      if (it.kind == Value::Kind::Array) doc.fail(v.line, "key 'vars' expects names");
      spec.vars.push_back(it.text);
    }
    if (spec.vars.size() != spec.dim)
      doc.fail(v.line, "key 'vars' lists " + std::to_string(spec.vars.size()) + " names for dim " +
                           std::to_string(spec.dim));
    try {
      parse("0", spec.vars);
    } catch (const std::invalid_argument& ex) {
      doc.fail(v.line, std::string("key 'vars': ") + ex.what());
    }
  } else {
    spec.vars = default_vars(spec.dim);
  }

  const std::size_t m = spec.dim;
  std::vector<double> lo(m, -1.0), hi(m, 1.0);
  if (const Entry* e = doc.find("domain.lo")) lo = b.numbers("domain.lo", e->value, m);
  if (const Entry* e = doc.find("domain.hi")) hi = b.numbers("domain.hi", e->value, m);
  std::size_t n = 33;
  if (const Entry* e = doc.find("grid_n")) n = b.integer("grid_n", e->value, 3);
  try {
    spec.chart = Chart(m, lo, hi, n);
  } catch (const std::exception& ex) {
    throw ConfigError(source + ": invalid domain: " + ex.what());
  }

  if (const Entry* e = doc.find("phi")) spec.phi = ScalarField(m, b.expr("phi", e->value, spec.vars));
  if (const Entry* e = doc.find("phi_tilde"))
    spec.phi_tilde = ScalarField(m, b.expr("phi_tilde", e->value, spec.vars));
  if (const Entry* e = doc.find("X")) spec.x = VectorField(m, b.vector("X", e->value, spec.vars));
  if (const Entry* e = doc.find("g")) spec.g = b.matrix("g", e->value, spec.vars);
  if (const Entry* e = doc.find("omega")) spec.omega = b.matrix("omega", e->value, spec.vars);
  if (const Entry* e = doc.find("J")) spec.j = b.matrix("J", e->value, spec.vars);
  if (const Entry* e = doc.find("steps")) spec.steps = b.integer("steps", e->value, 2);
  if (const Entry* e = doc.find("radius")) {
    spec.radius = b.number("radius", e->value);
    if (!(spec.radius > 0.0)) doc.fail(e->line, "key 'radius' must be positive");
  }
  spec.options.certify_radius = spec.radius;
  if (const Entry* e = doc.find("seed")) spec.options.seed = b.integer("seed", e->value, 0);

  auto& o = spec.options;
  const std::pair<const char*, double*> tols[] = {
      {"tol.newton", &o.critical.newton_tol},   {"tol.step", &o.critical.step_tol},
      {"tol.dedup", &o.critical.dedup_tol},     {"tol.match", &o.critical.match_tol},
      {"tol.eig_zero", &o.critical.eig_zero_rel}, {"tol.third", &o.critical.third_tol},
      {"tol.residual", &o.residual_tol},        {"tol.delta_floor", &o.delta_floor},
      {"tol.symmetry", &o.symmetry_tol},        {"tol.partition", &o.partition_tol},
      {"tol.decay_factor", &o.decay_factor},    {"tol.decay_r0", &o.decay_r0},
      {"tol.r_excl", &spec.chart.r_excl}};
  for (const auto& [key, target] : tols)
    if (const Entry* e = doc.find(key)) {
      *target = b.number(key, e->value);
      if (!(*target > 0.0)) doc.fail(e->line, "key '" + std::string(key) + "' must be positive");
    }
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open problem file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path);
}

void apply(const RunOptions& run, ProblemSpec& spec) {
  if (run.grid_n) {
    if (*run.grid_n < 3) throw ConfigError("--grid-n must be at least 3");
    spec.chart.n = *run.grid_n;
  }
  if (run.seed) spec.options.seed = *run.seed;
}

}  // namespace gradcert::cli
