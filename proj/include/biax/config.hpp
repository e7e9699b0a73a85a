#pragma once

// Run configuration: a small TOML-style reader (sections, key = value,
// numbers, strings, booleans, one-line numeric arrays, # comments),
// validation, and serialization back to the same syntax.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biax/elasticity.hpp"
#include "biax/errors.hpp"
#include "biax/hydro.hpp"
#include "biax/initial.hpp"
#include "biax/integrator.hpp"

namespace biax {

struct GridConfig {
  int nx = 128;
  int ny = 128;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;
  double dealias_fraction = 2.0 / 3.0;
};

struct OutputConfig {
  std::string dir = "out";
  std::string series = "series.csv";
  int snapshot_interval = 0;
  std::string snapshot_dir = "snapshots";
};

struct DiagnosticsConfig {
  double R = 0.5;
  /// Hotspot threshold; defaults to 0.1 E(0) when unset.
  std::optional<double> eps0;
  bool stop_on_concentration = false;
  /// Stop when the energy-law residual exceeds this; 0 disables.
  double residual_threshold = 0.0;
};

struct RunConfig {
  GridConfig grid;
  std::array<double, 12> K{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  HydroCoefficients hydro;
  IntegratorConfig integrator;
  long steps = 100;
  bool adaptive = true;
  InitialSpec initial;
  OutputConfig output;
  DiagnosticsConfig diagnostics;
  double stress_fault = 0.0;
  std::uint64_t seed = 42;

  ElasticCoefficients elastic;  // derived at load

  Model model() const { return Model{elastic, hydro, stress_fault}; }
  GridPtr make_grid() const { return biax::make_grid(grid.nx, grid.ny, grid.lx, grid.ly, grid.dealias_fraction); }
};

namespace config_detail {

struct Value {
  enum class Kind { Number, String, Bool, Array } kind = Kind::Number;
  double number = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<double> array;
  int line = 0;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_number(const std::string& tok) {
  std::string t = trim(tok);
  if (t.empty()) return std::nullopt;
  double factor = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    t = trim(t.substr(0, t.size() - 2));
    if (!t.empty() && t.back() == '*') t = trim(t.substr(0, t.size() - 1));
    if (t.empty()) return factor;
  }
  if (!t.empty() && t.front() == '+') t = t.substr(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v * factor;
}

inline Value parse_value(const std::string& raw, int line) {
  Value v;
  v.line = line;
  const std::string s = trim(raw);
  if (s.empty()) throw ParseError("line " + std::to_string(line) + ": missing value", line);
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw ParseError("line " + std::to_string(line) + ": unterminated string", line);
    v.kind = Value::Kind::String;
    v.str = s.substr(1, s.size() - 2);
  } else if (s == "true" || s == "false") {
    v.kind = Value::Kind::Bool;
    v.boolean = s == "true";
  } else if (s.front() == '[') {
    if (s.back() != ']') throw ParseError("line " + std::to_string(line) + ": unterminated array", line);
    v.kind = Value::Kind::Array;
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      const auto x = parse_number(item);
      if (!x) throw ParseError("line " + std::to_string(line) + ": bad array element '" + trim(item) + "'", line);
      v.array.push_back(*x);
    }
  } else {
    const auto x = parse_number(s);
    if (!x) throw ParseError("line " + std::to_string(line) + ": cannot parse value '" + s + "'", line);
    v.number = *x;
  }
  return v;
}

using Table = std::map<std::string, Value>;

inline Table parse_text(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // strip comments outside strings
    bool quoted = false;
    std::string s;
    for (char ch : raw) {
      if (ch == '"') quoted = !quoted;
      if (ch == '#' && !quoted) break;
      s += ch;
    }
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']' || s.size() < 3) throw ParseError("line " + std::to_string(line) + ": bad section header", line);
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError("line " + std::to_string(line) + ": empty key", line);
    const std::string full = section.empty() ? key : section + "." + key;
    if (t.count(full)) throw ParseError("line " + std::to_string(line) + ": duplicate key '" + full + "'", line);
    t[full] = parse_value(s.substr(eq + 1), line);
  }
  return t;
}

class Reader {
 public:
  explicit Reader(const Table& t) : t_(t) {}

  const Value* find(const std::string& key) {
    used_.insert(key);
    const auto it = t_.find(key);
    return it == t_.end() ? nullptr : &it->second;
  }
  int line_of(const std::string& key) const {
    const auto it = t_.find(key);
    return it == t_.end() ? 0 : it->second.line;
  }
  void number(const std::string& key, double& out) {
    if (const Value* v = find(key)) out = expect(*v, key, Value::Kind::Number).number;
  }
  void integer(const std::string& key, long& out) {
    if (const Value* v = find(key)) {
      const double x = expect(*v, key, Value::Kind::Number).number;
      if (x != std::floor(x)) fail(*v, key + " must be an integer");
      out = static_cast<long>(x);
    }
  }
  void integer(const std::string& key, int& out) {
    long l = out;
    integer(key, l);
    out = static_cast<int>(l);
  }
  void string(const std::string& key, std::string& out) {
    if (const Value* v = find(key)) out = expect(*v, key, Value::Kind::String).str;
  }
  void boolean(const std::string& key, bool& out) {
    if (const Value* v = find(key)) out = expect(*v, key, Value::Kind::Bool).boolean;
  }
  template <std::size_t N>
  void array(const std::string& key, std::array<double, N>& out) {
    if (const Value* v = find(key)) {
      const Value& a = expect(*v, key, Value::Kind::Array);
      if (a.array.size() != N) fail(a, key + " needs " + std::to_string(N) + " entries, got " + std::to_string(a.array.size()));
      for (std::size_t i = 0; i < N; ++i) out[i] = a.array[i];
    }
  }
  void reject_unknown() const {
    for (const auto& [k, v] : t_)
      if (!used_.count(k)) throw ParseError("line " + std::to_string(v.line) + ": unknown key '" + k + "'", v.line);
  }

 private:
  static const Value& expect(const Value& v, const std::string& key, Value::Kind kind) {
    if (v.kind != kind) {
      static const char* names[] = {"a number", "a string", "a boolean", "an array"};
      fail(v, key + " must be " + names[static_cast<int>(kind)]);
    }
    return v;
  }
  [[noreturn]] static void fail(const Value& v, const std::string& msg) {
    throw ParseError("line " + std::to_string(v.line) + ": " + msg, v.line);
  }

  const Table& t_;
  std::set<std::string> used_;
};

inline Scheme parse_scheme(const std::string& s, int line) {
  if (s == "rk2" || s == "explicit_rk2_lie") return Scheme::rk2;
  if (s == "rk4" || s == "explicit_rk4_lie") return Scheme::rk4;
  throw ParseError("line " + std::to_string(line) + ": unknown scheme '" + s + "'", line);
}

[[noreturn]] inline void invalid(int line, const std::string& msg) {
  throw ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
}

}  // namespace config_detail

/// Reads values without checking coefficient or grid invariants.
inline RunConfig parse_config_text(const std::string& text) {
  using namespace config_detail;
  const Table t = parse_text(text);
  Reader r(t);
  RunConfig c;
  long seed = static_cast<long>(c.seed);
  r.integer("seed", seed);
  c.seed = static_cast<std::uint64_t>(seed);
  c.initial.seed = c.seed;

  r.integer("grid.nx", c.grid.nx);
  r.integer("grid.ny", c.grid.ny);
  r.number("grid.lx", c.grid.lx);
  r.number("grid.ly", c.grid.ly);
  r.number("grid.dealias_fraction", c.grid.dealias_fraction);

  r.array("elastic.K", c.K);

  r.array("hydro.beta", c.hydro.beta);
  r.number("hydro.eta", c.hydro.eta);
  r.array("hydro.eta_rot", c.hydro.eta_rot);
  r.array("hydro.chi", c.hydro.chi);

  auto& ic = c.integrator;
  r.number("integrator.dt", ic.dt);
  if (const auto* v = r.find("integrator.scheme")) {
    if (v->kind != Value::Kind::String) throw ParseError("line " + std::to_string(v->line) + ": scheme must be a string", v->line);
    ic.scheme = parse_scheme(v->str, v->line);
  }
  r.integer("integrator.steps", c.steps);
  r.number("integrator.cfl_safety", ic.cfl_safety);
  r.integer("integrator.reprojection_interval", ic.reprojection_interval);
  r.boolean("integrator.adaptive", c.adaptive);
  r.boolean("integrator.freeze_velocity", ic.freeze_velocity);
  if (r.find("integrator.mollify_cutoff")) {
    double x = 0.0;
    r.number("integrator.mollify_cutoff", x);
    ic.mollify_cutoff = x;
  }

  auto& in = c.initial;
  r.string("initial.frame", in.frame);
  r.number("initial.frame_amplitude", in.frame_amplitude);
  r.integer("initial.frame_mode", in.frame_mode);
  r.number("initial.frame_width", in.frame_width);
  r.string("initial.velocity", in.velocity);
  r.number("initial.velocity_amplitude", in.velocity_amplitude);
  r.integer("initial.band", in.band);

  r.string("output.dir", c.output.dir);
  r.string("output.series", c.output.series);
  r.integer("output.snapshot_interval", c.output.snapshot_interval);
  r.string("output.snapshot_dir", c.output.snapshot_dir);

  r.number("diagnostics.R", c.diagnostics.R);
  if (r.find("diagnostics.eps0")) {
    double x = 0.0;
    r.number("diagnostics.eps0", x);
    c.diagnostics.eps0 = x;
  }
  r.boolean("diagnostics.stop_on_concentration", c.diagnostics.stop_on_concentration);
  r.number("diagnostics.residual_threshold", c.diagnostics.residual_threshold);

  r.number("verify.stress_fault", c.stress_fault);
  r.reject_unknown();

  // remember where things were written, for validation messages
  c.elastic = ElasticCoefficients{};
  c.elastic.K = c.K;
  return c;
}

namespace config_detail {
struct Lines {
  int K = 0, hydro = 0, grid = 0, integrator = 0, initial = 0, diagnostics = 0;
};
inline Lines key_lines(const std::string& text) {
  const Table t = parse_text(text);
  auto first = [&](const std::string& prefix) {
    int best = 0;
    for (const auto& [k, v] : t)
      if (k.rfind(prefix, 0) == 0 && (best == 0 || v.line < best)) best = v.line;
    return best;
  };
  Lines l;
  l.K = first("elastic.K");
  l.hydro = first("hydro.");
  l.grid = first("grid.");
  l.integrator = first("integrator.");
  l.initial = first("initial.");
  l.diagnostics = first("diagnostics.");
  return l;
}

inline int hydro_line(const Table& t, const std::string& inequality) {
  auto line = [&](const char* key) {
    const auto it = t.find(key);
    return it == t.end() ? 0 : it->second.line;
  };
  if (inequality.find("η₁") != std::string::npos || inequality.find("η₂") != std::string::npos ||
      inequality.find("η₃") != std::string::npos)
    return line("hydro.eta_rot") ? line("hydro.eta_rot") : line("hydro.beta");
  if (inequality.find("χ") != std::string::npos) return line("hydro.chi");
  if (inequality.rfind("η", 0) == 0) return line("hydro.eta");
  return line("hydro.beta");
}
}  // namespace config_detail

/// Checks every invariant and derives the elastic coefficients.
inline void validate_config(RunConfig& c, const std::string& text = "") {
  using namespace config_detail;
  const Table t = text.empty() ? Table{} : parse_text(text);
  auto line = [&](const std::string& key) {
    const auto it = t.find(key);
    return it == t.end() ? 0 : it->second.line;
  };
  const auto& g = c.grid;
  if (g.nx < 8 || g.ny < 8 || g.nx % 2 || g.ny % 2)
    invalid(line(g.nx < 8 || g.nx % 2 ? "grid.nx" : "grid.ny"), "grid sizes nx, ny must be even and ≥ 8");
  if (!(g.lx > 0.0)) invalid(line("grid.lx"), "lx > 0 violated");
  if (!(g.ly > 0.0)) invalid(line("grid.ly"), "ly > 0 violated");
  if (!(g.dealias_fraction > 0.0 && g.dealias_fraction <= 1.0))
    invalid(line("grid.dealias_fraction"), "dealias_fraction must lie in (0, 1]");

  try {
    c.elastic = derive_coefficients(c.K);
  } catch (const InvalidCoefficients& e) {
    invalid(line("elastic.K"), std::string("elastic coefficients: ") + e.what());
  }
  const AdmissibilityReport rep = validate_coefficients(c.hydro);
  if (const auto* f = rep.first_failure())
    invalid(hydro_line(t, f->inequality), "hydro coefficients violate " + f->inequality);

  const auto& ic = c.integrator;
  if (!(ic.dt > 0.0)) invalid(line("integrator.dt"), "dt > 0 violated");
  if (!(ic.cfl_safety > 0.0 && ic.cfl_safety <= 1.0)) invalid(line("integrator.cfl_safety"), "cfl_safety must lie in (0, 1]");
  if (ic.reprojection_interval < 0) invalid(line("integrator.reprojection_interval"), "reprojection_interval must be ≥ 0");
  if (ic.mollify_cutoff && !(*ic.mollify_cutoff > 0.0)) invalid(line("integrator.mollify_cutoff"), "mollify_cutoff > 0 violated");
  if (c.steps < 0) invalid(line("integrator.steps"), "steps must be ≥ 0");

  const auto& in = c.initial;
  static const std::set<std::string> frames{"uniform", "twist", "biaxial_bump", "random_smooth"};
  static const std::set<std::string> vels{"zero", "taylor_green", "random_smooth"};
  if (!frames.count(in.frame)) invalid(line("initial.frame"), "unknown frame preset '" + in.frame + "'");
  if (!vels.count(in.velocity)) invalid(line("initial.velocity"), "unknown velocity preset '" + in.velocity + "'");
  if (in.band < 1) invalid(line("initial.band"), "band must be ≥ 1");
  if (in.frame == "biaxial_bump" && !(in.frame_width > 0.0)) invalid(line("initial.frame_width"), "frame_width > 0 violated");

  if (!(c.diagnostics.R > 0.0)) invalid(line("diagnostics.R"), "R > 0 violated");
  if (c.diagnostics.R > 0.25 * std::min(g.lx, g.ly)) invalid(line("diagnostics.R"), "R ≤ min(lx, ly)/4 violated");
  if (c.diagnostics.eps0 && !(*c.diagnostics.eps0 >= 0.0)) invalid(line("diagnostics.eps0"), "eps0 ≥ 0 violated");
  if (c.output.snapshot_interval < 0) invalid(line("output.snapshot_interval"), "snapshot_interval must be ≥ 0");
}

inline RunConfig load_config_text(const std::string& text) {
  RunConfig c = parse_config_text(text);
  validate_config(c, text);
  return c;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path) { return load_config_text(read_text_file(path)); }

namespace config_detail {
inline std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
template <std::size_t N>
inline std::string arr(const std::array<double, N>& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < N; ++i) s += (i ? ", " : "") + num(a[i]);
  return s + "]";
}
inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }
}  // namespace config_detail

inline std::string serialize(const RunConfig& c) {
  using namespace config_detail;
  std::ostringstream o;
  o << "seed = " << c.seed << "\n\n";
  o << "[grid]\nnx = " << c.grid.nx << "\nny = " << c.grid.ny << "\nlx = " << num(c.grid.lx) << "\nly = " << num(c.grid.ly)
    << "\ndealias_fraction = " << num(c.grid.dealias_fraction) << "\n\n";
  o << "[elastic]\nK = " << arr(c.K) << "\n\n";
  o << "[hydro]\nbeta = " << arr(c.hydro.beta) << "\neta = " << num(c.hydro.eta) << "\neta_rot = " << arr(c.hydro.eta_rot)
    << "\nchi = " << arr(c.hydro.chi) << "\n\n";
  const auto& ic = c.integrator;
  o << "[integrator]\nscheme = " << quoted(scheme_name(ic.scheme)) << "\ndt = " << num(ic.dt) << "\nsteps = " << c.steps
    << "\ncfl_safety = " << num(ic.cfl_safety) << "\nreprojection_interval = " << ic.reprojection_interval
    << "\nadaptive = " << (c.adaptive ? "true" : "false") << "\nfreeze_velocity = " << (ic.freeze_velocity ? "true" : "false")
    << "\n";
  if (ic.mollify_cutoff) o << "mollify_cutoff = " << num(*ic.mollify_cutoff) << "\n";
  const auto& in = c.initial;
  o << "\n[initial]\nframe = " << quoted(in.frame) << "\nframe_amplitude = " << num(in.frame_amplitude)
    << "\nframe_mode = " << in.frame_mode << "\nframe_width = " << num(in.frame_width) << "\nvelocity = " << quoted(in.velocity)
    << "\nvelocity_amplitude = " << num(in.velocity_amplitude) << "\nband = " << in.band << "\n\n";
  o << "[output]\ndir = " << quoted(c.output.dir) << "\nseries = " << quoted(c.output.series)
    << "\nsnapshot_interval = " << c.output.snapshot_interval << "\nsnapshot_dir = " << quoted(c.output.snapshot_dir) << "\n\n";
  o << "[diagnostics]\nR = " << num(c.diagnostics.R) << "\n";
  if (c.diagnostics.eps0) o << "eps0 = " << num(*c.diagnostics.eps0) << "\n";
  o << "stop_on_concentration = " << (c.diagnostics.stop_on_concentration ? "true" : "false")
    << "\nresidual_threshold = " << num(c.diagnostics.residual_threshold) << "\n\n";
  o << "[verify]\nstress_fault = " << num(c.stress_fault) << "\n";
  return o.str();
}

}  // namespace biax
