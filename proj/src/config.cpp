#include "tsdelay/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tsdelay {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// A '#' outside double quotes starts a comment.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    else if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct Reader {
  std::string origin;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Config, origin + ":" + std::to_string(line) + ": " + msg);
  }

  std::string unquote(const std::string& v) const {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (!v.empty() && v.front() == '"') fail("unterminated string");
    return v;
  }

  expr::Expr expression(const std::string& key, const std::string& raw) const {
    try {
      return expr::parse(unquote(raw));
    } catch (const expr::SyntaxError& e) {
      fail(key + ": " + e.diagnostic());
    }
  }

  double number(const std::string& key, const std::string& raw) const {
    const std::string v = unquote(raw);
    if (v == "inf" || v == "+inf") return kInf;
    if (v == "-inf") return -kInf;
    expr::Expr e = expression(key, v);
    if (e.depends_on_t()) fail(key + ": expected a constant");
    try {
      return e(0.0);
    } catch (const expr::EvalError& err) {
      fail(key + ": " + err.what());
    }
  }

  std::vector<double> numbers(const std::string& key, const std::string& raw) const {
    std::vector<double> out;
    for (const auto& item : split(unquote(raw), ',')) out.push_back(number(key, item));
    return out;
  }

  bool flag(const std::string& key, const std::string& raw) const {
    const std::string v = unquote(raw);
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    fail(key + ": expected true or false");
  }

  // (x,y);(x,y);...
  std::vector<std::pair<double, double>> pairs(const std::string& key, const std::string& raw) const {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : split(unquote(raw), ';')) {
      if (item.empty()) continue;
      if (item.front() != '(' || item.back() != ')') fail(key + ": expected (x,y) pairs separated by ';'");
      const auto xy = split(item.substr(1, item.size() - 2), ',');
      if (xy.size() != 2) fail(key + ": expected (x,y) pairs separated by ';'");
      out.emplace_back(number(key, xy[0]), number(key, xy[1]));
    }
    if (out.empty()) fail(key + ": empty table");
    return out;
  }
};

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& origin) {
  RunConfig cfg;
  cfg.origin = origin;
  Reader rd{origin};
  std::string section;
  std::map<std::string, std::size_t> seen;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  while (std::getline(in, raw_line)) {
    ++rd.line;
    std::string line = trim(raw_line);
    if (!line.empty() && line[0] == ';') continue;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scale" && section != "shift" && section != "problem" && section != "certify" &&
          section != "output" && section != "axioms")
        rd.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail("expected key = value");
    if (section.empty()) rd.fail("key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    if (seen.count(full)) rd.fail("duplicate key " + key);
    seen[full] = rd.line;

    if (section == "scale") {
      if (key == "kind") cfg.scale.kind = rd.unquote(val);
      else if (key == "lo") cfg.scale.lo = rd.number(key, val);
      else if (key == "hi") cfg.scale.hi = rd.number(key, val);
      else if (key == "step") cfg.scale.step = rd.number(key, val);
      else if (key == "origin") cfg.scale.origin = rd.number(key, val);
      else if (key == "q") cfg.scale.q = rd.number(key, val);
      else if (key == "points") cfg.scale.points = rd.numbers(key, val);
      else if (key == "parts") {
        for (auto [lo, hi] : rd.pairs(key, val)) cfg.scale.parts.push_back({lo, hi});
      } else rd.fail("unknown key " + key + " in [scale]");
    } else if (section == "shift") {
      if (key == "system") cfg.shift.system = rd.unquote(val);
      else if (key == "t0") cfg.shift.t0 = rd.number(key, val);
      else if (key == "rebase") cfg.shift.rebase = rd.number(key, val);
      else if (key == "h") cfg.h = rd.number(key, val);
      else rd.fail("unknown key " + key + " in [shift]");
    } else if (section == "problem") {
      if (key == "a") cfg.a = rd.expression(key, val);
      else if (key == "b") cfg.b = rd.expression(key, val);
      else if (key == "psi") cfg.psi = rd.expression(key, val);
      else if (key == "psi.table") cfg.psi_table = rd.pairs(key, val);
      else if (key == "horizon") cfg.horizon = rd.number(key, val);
      else if (key == "real_step") cfg.real_step = rd.number(key, val);
      else rd.fail("unknown key " + key + " in [problem]");
    } else if (section == "certify") {
      if (key == "lambda") cfg.search.lambdas = rd.numbers(key, val);
      else if (key == "alpha") cfg.search.alphas = rd.numbers(key, val);
      else if (key == "D") cfg.search.Ds = rd.numbers(key, val);
      else if (key == "divergence_threshold") cfg.search.divergence_threshold = rd.number(key, val);
      else if (key == "strict") cfg.search.strict = rd.flag(key, val);
      else if (key == "N") cfg.compare_N = rd.number(key, val);
      else rd.fail("unknown key " + key + " in [certify]");
    } else if (section == "axioms") {
      if (key == "samples") {
        const double n = rd.number(key, val);
        if (!(n >= 1.0) || n != std::floor(n)) rd.fail("samples: expected a positive integer");
        cfg.axiom_samples = static_cast<std::size_t>(n);
      } else if (key == "seed") {
        const double n = rd.number(key, val);
        if (!(n >= 0.0) || n != std::floor(n)) rd.fail("seed: expected a nonnegative integer");
        cfg.seed = static_cast<std::uint64_t>(n);
      } else rd.fail("unknown key " + key + " in [axioms]");
    } else {  // output
      const std::string path = rd.unquote(val);
      if (key == "trajectory") cfg.output.trajectory = path;
      else if (key == "certificate") cfg.output.certificate = path;
      else if (key == "certificate_csv") cfg.output.certificate_csv = path;
      else if (key == "axioms") cfg.output.axioms = path;
      else if (key == "compare") cfg.output.compare = path;
      else rd.fail("unknown key " + key + " in [output]");
    }
  }
  if (cfg.psi && !cfg.psi_table.empty()) {
    rd.line = seen["problem.psi.table"];
    rd.fail("give either psi or psi.table, not both");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Config, path + ": cannot open");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

[[noreturn]] void config_fail(const RunConfig& cfg, const std::string& msg) {
  throw Error(ErrorCode::Config, cfg.origin + ": " + msg);
}

TimeScale build_scale(const RunConfig& cfg) {
  const ScaleSpec& s = cfg.scale;
  if (s.kind == "real") return TimeScale::real_interval(s.lo, s.hi);
  if (s.kind == "integers") return TimeScale::unit_lattice(s.origin);
  if (s.kind == "step") return TimeScale::step_lattice(s.step, s.origin);
  if (s.kind == "q") return TimeScale::q_lattice(s.q);
  if (s.kind == "sqrt") return TimeScale::sqrt_naturals();
  if (s.kind == "grid") return TimeScale::finite_grid(s.points);
  if (s.kind == "union") return TimeScale::union_of_intervals(s.parts);
  config_fail(cfg, "unknown scale kind '" + s.kind + "'");
}

void require_kind(const RunConfig& cfg, std::initializer_list<const char*> kinds) {
  if (cfg.scale.kind.empty()) return;
  for (const char* k : kinds)
    if (cfg.scale.kind == k) return;
  config_fail(cfg, "shift system '" + cfg.shift.system + "' does not live on scale kind '" + cfg.scale.kind + "'");
}

}  // namespace

ShiftSystem build_system(const RunConfig& cfg) {
  const std::string& name = cfg.shift.system;
  ShiftSystem sys;
  bool fixed_t0 = true;
  if (name == "additive") {
    if (cfg.scale.kind.empty()) config_fail(cfg, "the additive system needs a [scale] kind");
    require_kind(cfg, {"real", "integers", "step"});
    sys = additive_shifts(build_scale(cfg), cfg.shift.t0.value_or(0.0));
    fixed_t0 = false;
  } else if (name == "geometric") {
    require_kind(cfg, {"q"});
    sys = geometric_shifts(cfg.scale.q);
  } else if (name == "roots") {
    require_kind(cfg, {"sqrt"});
    sys = root_shifts();
  } else if (name == "multiplicative") {
    require_kind(cfg, {"real"});
    sys = multiplicative_real_shifts();
  } else if (name == "split") {
    require_kind(cfg, {"union"});
    sys = split_line_shifts();
  } else if (name == "broken-geometric") {
    require_kind(cfg, {"q"});
    sys = broken_geometric_shifts(cfg.scale.q);
  } else {
    config_fail(cfg, "unknown shift system '" + name + "'");
  }
  if (fixed_t0 && cfg.shift.t0 && !sys.scale.same_point(*cfg.shift.t0, sys.t0))
    config_fail(cfg, "shift system '" + name + "' has its initial point fixed at " + std::to_string(sys.t0));
  if (cfg.shift.rebase) sys = rebase_initial_point(sys, *cfg.shift.rebase);
  return sys;
}

DelayProblem build_problem(const RunConfig& cfg) {
  if (!cfg.h) config_fail(cfg, "missing [shift] h");
  if (!cfg.a) config_fail(cfg, "missing [problem] a");
  if (!cfg.b) config_fail(cfg, "missing [problem] b");
  if (!cfg.psi && cfg.psi_table.empty()) config_fail(cfg, "missing [problem] psi or psi.table");
  if (!(cfg.horizon > 0.0)) config_fail(cfg, "missing or non-positive [problem] horizon");
  DelayFunction df(build_system(cfg), *cfg.h);
  Fn history = cfg.psi ? cfg.psi->as_function() : table_history(cfg.psi_table);
  return DelayProblem{std::move(df), cfg.a->as_function(), cfg.b->as_function(), std::move(history), cfg.horizon,
                      cfg.real_step};
}

}  // namespace tsdelay
