#include "angio/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

namespace angio::io {

std::string_view to_string(FluxKind k) { return k == FluxKind::upwind ? "upwind" : "lax-friedrichs"; }
std::string_view to_string(weno::Mode m) { return m == weno::Mode::nonlinear ? "nonlinear" : "linear"; }
std::string_view to_string(SourceMode m) { return m == SourceMode::nodal ? "nodal" : "cell-average"; }

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view v) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(x))
    throw std::invalid_argument("not a finite number: '" + std::string(v) + "'");
  return x;
}

template <class Int>
Int parse_int(std::string_view v) {
  Int x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size())
    throw std::invalid_argument("not an integer: '" + std::string(v) + "'");
  return x;
}

bool parse_bool(std::string_view v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("expected on|off, got '" + std::string(v) + "'");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + fmt(xs[k]);
  return s;
}

template <class E>
E parse_enum(std::string_view v, std::initializer_list<E> all, std::string_view (*name)(E)) {
  for (E e : all)
    if (v == name(e)) return e;
  std::string msg = "unknown value '" + std::string(v) + "' (expected";
  for (E e : all) msg += " " + std::string(name(e));
  throw std::invalid_argument(msg + ")");
}

std::string_view scheme_name(ssp::Scheme s) { return ssp::to_string(s); }
std::string_view flux_name(FluxKind k) { return to_string(k); }
std::string_view mode_name(weno::Mode m) { return to_string(m); }
std::string_view source_name(SourceMode m) { return to_string(m); }

struct Key {
  std::string_view name;
  std::string_view help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define ANGIO_DOUBLE_KEY(name, member, help)                                          \
  Key {                                                                               \
    name, help, [](RunConfig& c, std::string_view v) { c.member = parse_double(v); }, \
        [](const RunConfig& c) { return fmt(c.member); }                             \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      ANGIO_DOUBLE_KEY("x_max", x_max, "right end of the x1 interval [0, x_max]"),
      ANGIO_DOUBLE_KEY("y_min", y_min, "lower end of the x2 interval"),
      ANGIO_DOUBLE_KEY("y_max", y_max, "upper end of the x2 interval"),
      {"Nx", "cells along x1", [](RunConfig& c, std::string_view v) { c.Nx = parse_int<int>(v); },
       [](const RunConfig& c) { return std::to_string(c.Nx); }},
      {"Ny", "cells along x2", [](RunConfig& c, std::string_view v) { c.Ny = parse_int<int>(v); },
       [](const RunConfig& c) { return std::to_string(c.Ny); }},
      ANGIO_DOUBLE_KEY("delta1", params.delta1, "chemotactic strength"),
      ANGIO_DOUBLE_KEY("beta", params.beta, "friction coefficient"),
      ANGIO_DOUBLE_KEY("A", params.A, "tip branching rate"),
      ANGIO_DOUBLE_KEY("Gamma", params.Gamma, "anastomosis rate"),
      ANGIO_DOUBLE_KEY("Gamma1", params.Gamma1, "chemotaxis saturation coefficient"),
      ANGIO_DOUBLE_KEY("q1", params.q1, "chemotaxis saturation exponent"),
      ANGIO_DOUBLE_KEY("kappa", params.kappa, "diffusivity of the angiogenic factor"),
      ANGIO_DOUBLE_KEY("chi", params.chi, "consumption prefactor"),
      ANGIO_DOUBLE_KEY("eta", params.eta, "Fermi factor threshold"),
      ANGIO_DOUBLE_KEY("epsilon_v", params.epsilon_v, "Fermi factor width (distinct from weno_eps)"),
      ANGIO_DOUBLE_KEY("sigma_v", params.sigma_v, "velocity noise strength"),
      ANGIO_DOUBLE_KEY("a", params.a, "inverse width of the boundary profile at x1 = x_max"),
      ANGIO_DOUBLE_KEY("cL", params.cL, "peak boundary concentration"),
      ANGIO_DOUBLE_KEY("cL_decay", params.cL_decay, "cL(t) = cL exp(-cL_decay t); 0 keeps it constant"),
      ANGIO_DOUBLE_KEY("v0_1", params.v0[0], "initial velocity, first component"),
      ANGIO_DOUBLE_KEY("v0_2", params.v0[1], "initial velocity, second component"),
      ANGIO_DOUBLE_KEY("v_box", params.v_box, "half width of the truncated velocity box"),
      {"integrator", "euler | rk2 | rk3 | msstep3",
       [](RunConfig& c, std::string_view v) {
         c.integrator = parse_enum(v, {ssp::Scheme::euler, ssp::Scheme::rk2, ssp::Scheme::rk3, ssp::Scheme::msstep3},
                                   scheme_name);
       },
       [](const RunConfig& c) { return std::string(ssp::to_string(c.integrator)); }},
      {"flux", "upwind | lax-friedrichs",
       [](RunConfig& c, std::string_view v) {
         c.flux = parse_enum(v, {FluxKind::upwind, FluxKind::lax_friedrichs}, flux_name);
       },
       [](const RunConfig& c) { return std::string(to_string(c.flux)); }},
      {"limiter", "on | off", [](RunConfig& c, std::string_view v) { c.limiter = parse_bool(v); },
       [](const RunConfig& c) { return std::string(c.limiter ? "on" : "off"); }},
      {"weno_mode", "nonlinear | linear",
       [](RunConfig& c, std::string_view v) {
         c.weno_mode = parse_enum(v, {weno::Mode::nonlinear, weno::Mode::linear}, mode_name);
       },
       [](const RunConfig& c) { return std::string(to_string(c.weno_mode)); }},
      ANGIO_DOUBLE_KEY("weno_eps", weno_eps, "regulariser in the nonlinear weights"),
      {"source_mode", "nodal | cell-average",
       [](RunConfig& c, std::string_view v) {
         c.source_mode = parse_enum(v, {SourceMode::nodal, SourceMode::cell_average}, source_name);
       },
       [](const RunConfig& c) { return std::string(to_string(c.source_mode)); }},
      {"dt", "auto, or a fixed step",
       [](RunConfig& c, std::string_view v) {
         if (v == "auto") c.dt.reset();
         else c.dt = parse_double(v);
       },
       [](const RunConfig& c) { return c.dt ? fmt(*c.dt) : std::string("auto"); }},
      ANGIO_DOUBLE_KEY("cfl_safety", cfl_safety, "multiplier on the automatic step"),
      ANGIO_DOUBLE_KEY("T_final", T_final, "end time"),
      {"snapshot_interval", "snapshots at k * interval, k >= 1 (clears snapshot_times)",
       [](RunConfig& c, std::string_view v) {
         c.snapshot_interval = parse_double(v);
         c.snapshot_times.clear();
       },
       [](const RunConfig& c) { return c.snapshot_interval ? fmt(*c.snapshot_interval) : std::string("none"); }},
      {"snapshot_times", "comma-separated output times, or none (clears snapshot_interval)",
       [](RunConfig& c, std::string_view v) {
         c.snapshot_times.clear();
         c.snapshot_interval.reset();
         if (v == "none") return;
         while (!v.empty()) {
           const auto comma = v.find(',');
           c.snapshot_times.push_back(parse_double(trim(v.substr(0, comma))));
           if (comma == std::string_view::npos) break;
           v.remove_prefix(comma + 1);
         }
       },
       [](const RunConfig& c) { return c.snapshot_times.empty() ? std::string("none") : fmt_list(c.snapshot_times); }},
      {"out_dir", "output directory", [](RunConfig& c, std::string_view v) { c.out_dir = std::string(v); },
       [](const RunConfig& c) { return c.out_dir; }},
      {"strict_positivity", "abort on the first negative cell average",
       [](RunConfig& c, std::string_view v) { c.strict_positivity = parse_bool(v); },
       [](const RunConfig& c) { return std::string(c.strict_positivity ? "on" : "off"); }},
      {"seed", "reserved, unused", [](RunConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>(v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

#undef ANGIO_DOUBLE_KEY

const Key* find_key(std::string_view name) {
  for (const Key& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

void assign(RunConfig& cfg, std::string_view line, int lineno) {
  const auto where = [&] { return lineno > 0 ? "line " + std::to_string(lineno) + ": " : std::string(); };
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError(where() + "expected key=value, got '" + std::string(line) + "'", lineno);
  const std::string_view key = trim(line.substr(0, eq));
  const std::string_view value = trim(line.substr(eq + 1));
  const Key* k = find_key(key);
  if (!k) throw ConfigError(where() + "unknown key '" + std::string(key) + "'", lineno);
  if (value.empty()) throw ConfigError(where() + "empty value for '" + std::string(key) + "'", lineno);
  try {
    k->set(cfg, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where() + std::string(key) + ": " + e.what(), lineno);
  }
}

}  // namespace

GridSpec RunConfig::grid() const { return build_grid(x_max, y_min, y_max, Nx, Ny); }

model::SchemeOptions RunConfig::scheme_options() const {
  model::SchemeOptions o;
  o.flux = flux;
  o.limiter = limiter;
  o.weno.mode = weno_mode;
  o.weno.eps = weno_eps;
  o.source_mode = source_mode;
  return o;
}

std::vector<double> RunConfig::output_times() const {
  std::vector<double> t;
  if (snapshot_interval) {
    const double h = *snapshot_interval;
    // tolerate T_final being a multiple of the interval up to rounding
    for (int k = 1;; ++k) {
      const double tk = k * h;
      if (tk > T_final * (1.0 + 1e-12)) break;
      t.push_back(std::min(tk, T_final));
    }
  } else {
    t = snapshot_times;
    std::sort(t.begin(), t.end());
  }
  return t;
}

void validate(const RunConfig& c) {
  const auto fail = [](const std::string& m) { throw ConfigError("invalid configuration: " + m, 0); };
  if (!(c.x_max > 0.0)) fail("x_max must be positive");
  if (!(c.y_max > c.y_min)) fail("y_max must exceed y_min");
  if (c.Nx < 5 || c.Ny < 5) fail("Nx and Ny must be at least 5");
  if (!(c.T_final > 0.0)) fail("T_final must be positive");
  if (c.dt && !(*c.dt > 0.0)) fail("dt must be positive");
  if (!(c.cfl_safety > 0.0)) fail("cfl_safety must be positive");
  if (!(c.weno_eps > 0.0)) fail("weno_eps must be positive");
  if (c.snapshot_interval) {
    if (!(*c.snapshot_interval > 0.0)) fail("snapshot_interval must be positive");
  } else {
    for (double t : c.snapshot_times)
      if (t < 0.0 || t > c.T_final) fail("snapshot time " + fmt(t) + " outside [0, T_final]");
  }
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  int lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    assign(cfg, line, lineno);
    const std::string key(trim(line.substr(0, line.find('='))));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'", lineno);
  }
  validate(cfg);
  return cfg;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  RunConfig next = cfg;
  try {
    assign(next, trim(assignment), 0);
    validate(next);
  } catch (const ConfigError& e) {
    throw ConfigError("override '" + std::string(assignment) + "': " + e.what(), 0);
  }
  cfg = std::move(next);
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream os;
  for (const Key& k : keys()) {
    // an unset alternative is omitted so the round trip restores it as unset
    if (k.name == "snapshot_interval" && !cfg.snapshot_interval) continue;
    if (k.name == "snapshot_times" && cfg.snapshot_interval) continue;
    os << k.name << "=" << k.get(cfg) << "\n";
  }
  return os.str();
}

const std::vector<KeyDoc>& config_keys() {
  static const std::vector<KeyDoc> docs = [] {
    std::vector<KeyDoc> d;
    for (const Key& k : keys()) d.push_back({k.name, k.help});
    return d;
  }();
  return docs;
}

}  // namespace angio::io
