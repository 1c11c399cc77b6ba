#include "angio/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "angio/model.hpp"

#ifdef ANGIO_HAVE_OPENMP
#include <omp.h>
#endif

namespace angio::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string snapshot_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", index);
  return buf;
}

namespace {

int max_threads() {
#ifdef ANGIO_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// config echo for snapshot headers; out_dir is left out so that the same
// run written to two places produces identical files
std::string one_line(const RunConfig& cfg) {
  std::istringstream is(serialize(cfg));
  std::string s;
  for (std::string line; std::getline(is, line);) {
    if (line.rfind("out_dir=", 0) == 0) continue;
    s += (s.empty() ? "" : ";") + line;
  }
  return s;
}

void write_snapshot(const fs::path& path, const RunConfig& cfg, const GridSpec& g, const ssp::Snapshot& snap) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  const std::size_t n = g.cells();
  std::fprintf(f, "# angio snapshot\n# version=%s\n# t=%.17g\n# step=%zu\n", ANGIO_VERSION, snap.t, snap.step);
  std::fprintf(f, "# grid Nx=%d Ny=%d x_max=%.17g y_min=%.17g y_max=%.17g\n", g.Nx, g.Ny, cfg.x_max, cfg.y_min,
               cfg.y_max);
  std::fprintf(f, "# config %s\n%s\n", one_line(cfg).c_str(), kSnapshotColumns);
  for (int j = 0; j < g.Ny; ++j)
    for (int i = 0; i < g.Nx; ++i) {
      const std::size_t k = g.index(i, j);
      std::fprintf(f, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, j, g.x_center(i), g.y_center(j), snap.state[k],
                   snap.state[n + k], snap.state[2 * n + k]);
    }
  const bool bad = std::ferror(f) != 0;
  if (std::fclose(f) != 0 || bad) throw IoError("failed writing " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

json config_json(const RunConfig& cfg) {
  json j = json::object();
  std::istringstream is(serialize(cfg));
  for (std::string line; std::getline(is, line);) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

json fit_json(const std::optional<diagnostics::SolitonFit>& f) {
  if (!f) return nullptr;
  json j = {{"amplitude", f->amplitude},
            {"width_param", f->width_param},
            {"X", f->X},
            {"r_squared", f->r_squared},
            {"iterations", f->iterations}};
  j["speed_c"] = f->speed_c ? json(*f->speed_c) : json(nullptr);
  return j;
}

SnapshotSummary summarize(const ssp::Snapshot& snap, const GridSpec& g) {
  const std::size_t n = g.cells();
  const std::span<const double> u(snap.state);
  SnapshotSummary s;
  s.t = snap.t;
  s.step = snap.step;
  const auto rho = diagnostics::min_and_mass(u.subspan(0, n), g);
  const auto C = diagnostics::min_and_mass(u.subspan(n, n), g);
  const auto I = diagnostics::min_and_mass(u.subspan(2 * n, n), g);
  s.min_rho = rho.min;
  s.mass_rho = rho.mass;
  s.min_C = C.min;
  s.mass_C = C.mass;
  s.max_C = diagnostics::max_value(u.subspan(n, n));
  s.mass_I = I.mass;
  const std::vector<double> profile = diagnostics::marginal_profile(u.subspan(0, n), g);
  std::vector<double> x(static_cast<std::size_t>(g.Nx));
  for (int i = 0; i < g.Nx; ++i) x[static_cast<std::size_t>(i)] = g.x_center(i);
  try {
    s.fit = diagnostics::fit_soliton(x, profile);
  } catch (const diagnostics::FitError& e) {
    s.fit_error = e.what();
  }
  return s;
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg, const fs::path& out_dir, std::ostream* log) {
  validate(cfg);
  const auto wall0 = std::chrono::steady_clock::now();
  const GridSpec grid = cfg.grid();
  const std::size_t n = grid.cells();

  RunResult res;
  res.config = cfg;
  res.threads = max_threads();

  model::CoupledSystem sys(grid, cfg.params, cfg.scheme_options());
  res.chi1 = sys.chi1();
  const ssp::State u0 = sys.pack(model::initial_state(grid, cfg.params));
  const double factor = ssp::ssp_factor(cfg.integrator);

  const auto bound_at = [&](std::span<const double> u, double t) {
    const auto sp = sys.speeds(u, t);
    return cfl_max_dt(sp.max_a, sp.max_b, sp.max_d, grid, factor);
  };
  res.dt_bound = bound_at(u0, 0.0);
  double dt = 0.0;
  if (cfg.dt) {
    dt = *cfg.dt;
  } else {
    if (!res.dt_bound) throw ConfigError("dt=auto: no advection or diffusion to bound the step", 0);
    dt = *res.dt_bound * cfg.cfl_safety;
  }
  const auto [nsteps, dt_used] = ssp::uniform_steps(cfg.T_final, dt);
  res.dt_used = dt_used;
  sys.set_step(dt_used, dt_used / factor);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  fs::remove(out_dir / "ABORTED", ec);

  if (log)
    *log << "chi1 = " << std::setprecision(10) << res.chi1 << ", dt = " << dt_used << " (" << nsteps
         << " steps), threads = " << res.threads << "\n";

  StepAudit& audit = res.audit;
  audit.c_mass.reserve(nsteps + 1);
  const auto observe = [&](std::size_t step, std::span<const double> u) {
    const auto rho = diagnostics::min_and_mass(u.subspan(0, n), grid);
    const auto C = diagnostics::min_and_mass(u.subspan(n, n), grid);
    const double cmax = diagnostics::max_value(u.subspan(n, n));
    if (step == 0 || rho.min < audit.min_rho) {
      audit.min_rho = rho.min;
      audit.min_rho_step = step;
    }
    if (step == 0 || C.min < audit.min_C) {
      audit.min_C = C.min;
      audit.min_C_step = step;
    }
    if (step == 0 || cmax > audit.max_C) {
      audit.max_C = cmax;
      audit.max_C_step = step;
    }
    audit.c_mass.push_back(C.mass);
  };
  observe(0, u0);
  if (res.dt_bound) audit.max_dt_over_bound = dt_used / *res.dt_bound;

  const std::size_t report_every = std::max<std::size_t>(nsteps / 10, 1);
  const ssp::StepObserver observer = [&](std::size_t step, double t, std::span<const double> u) -> std::string {
    observe(step, u);
    // the bound moves with C; keep an eye on it without paying every step
    if (step % 50 == 0 || step == nsteps) {
      if (const auto b = bound_at(u, t)) audit.max_dt_over_bound = std::max(audit.max_dt_over_bound, dt_used / *b);
    }
    if (log && step % report_every == 0) *log << "  step " << step << "/" << nsteps << "  t = " << t << "\n";
    return {};
  };

  ssp::AdvanceConfig ac;
  ac.scheme = cfg.integrator;
  ac.dt = dt_used;
  ac.t_final = cfg.T_final;
  ac.snapshot_times = cfg.output_times();
  ac.strict_positivity = cfg.strict_positivity;
  const ssp::RhsFn rhs = [&](double t, std::span<const double> u, std::span<double> r) { sys.rhs(t, u, r); };

  ssp::Trajectory traj;
  try {
    traj = ssp::advance(u0, rhs, ac, observer);
  } catch (const ssp::SolverAbort& e) {
    res.aborted = true;
    res.abort_reason = e.what();
    traj = e.partial();
  }
  res.steps = traj.steps;
  res.t_reached = traj.t;

  // outputs
  json snaps = json::array();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& snap = traj.snapshots[k];
    SnapshotSummary s = summarize(snap, grid);
    s.file = snapshot_file_name(k + 1);
    write_snapshot(out_dir / s.file, cfg, grid, snap);
    res.snapshots.push_back(std::move(s));
  }

  std::vector<std::pair<double, double>> tx;
  for (const auto& s : res.snapshots)
    if (s.fit && s.fit->r_squared >= kPulseR2) {
      if (!audit.pulse_onset) audit.pulse_onset = s.t;
      tx.emplace_back(s.t, s.fit->X);
    }
  if (tx.size() >= 3) {
    res.speed = diagnostics::front_speed(tx);
    for (auto& s : res.snapshots)
      if (s.fit && s.fit->r_squared >= kPulseR2) s.fit->speed_c = res.speed->c;
  }
  if (audit.pulse_onset) {
    const auto first = static_cast<std::size_t>(std::llround(*audit.pulse_onset / dt_used));
    for (std::size_t k = first + 1; k < audit.c_mass.size(); ++k) {
      const double inc = audit.c_mass[k] - audit.c_mass[k - 1];
      if (inc > 0.0) {
        ++audit.c_mass_increases;
        audit.max_c_mass_increase = std::max(audit.max_c_mass_increase, inc);
      }
    }
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

  json manifest = {{"version", ANGIO_VERSION},
                   {"status", res.aborted ? "aborted" : "completed"},
                   {"config", config_json(cfg)},
                   {"chi1", res.chi1},
                   {"dt_used", res.dt_used},
                   {"dt_bound", res.dt_bound ? json(*res.dt_bound) : json(nullptr)},
                   {"steps", res.steps},
                   {"steps_planned", nsteps},
                   {"t_reached", res.t_reached},
                   {"wall_time_s", res.wall_seconds},
                   {"threads", res.threads}};
  if (res.aborted) manifest["abort_reason"] = res.abort_reason;
  json files = json::array();
  for (const auto& s : res.snapshots) files.push_back({{"file", s.file}, {"t", s.t}, {"step", s.step}});
  manifest["snapshots"] = files;

  json diag;
  for (const auto& s : res.snapshots) {
    json j = {{"t", s.t},           {"step", s.step},         {"min_rho", s.min_rho}, {"min_C", s.min_C},
              {"max_C", s.max_C},   {"mass_rho", s.mass_rho}, {"mass_C", s.mass_C},   {"mass_I", s.mass_I},
              {"fit", fit_json(s.fit)}};
    if (!s.fit_error.empty()) j["fit_error"] = s.fit_error;
    snaps.push_back(j);
  }
  diag["snapshots"] = snaps;
  diag["front_speed"] = res.speed ? json{{"c", res.speed->c},
                                         {"intercept", res.speed->intercept},
                                         {"residual", res.speed->residual},
                                         {"points", res.speed->points}}
                                  : json(nullptr);
  diag["step_audit"] = {{"min_rho", audit.min_rho},
                        {"min_rho_step", audit.min_rho_step},
                        {"min_C", audit.min_C},
                        {"min_C_step", audit.min_C_step},
                        {"max_C", audit.max_C},
                        {"max_C_step", audit.max_C_step},
                        {"pulse_onset", audit.pulse_onset ? json(*audit.pulse_onset) : json(nullptr)},
                        {"c_mass_increases", audit.c_mass_increases},
                        {"max_c_mass_increase", audit.max_c_mass_increase},
                        {"max_dt_over_bound", audit.max_dt_over_bound}};

  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(out_dir / "diagnostics.json", diag.dump(2) + "\n");
  if (res.aborted) write_text(out_dir / "ABORTED", res.abort_reason + "\n");
  return res;
}

int run_command(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log, std::ostream& err) {
  try {
    const RunResult r = run_simulation(cfg, out_dir, &log);
    if (r.aborted) {
      err << "solver abort: " << r.abort_reason << "\n"
          << "partial output kept in " << out_dir.string() << "\n";
      return kExitSolverAbort;
    }
    log << "done: " << r.steps << " steps in " << std::fixed << std::setprecision(1) << r.wall_seconds << " s, "
        << r.snapshots.size() << " snapshots in " << out_dir.string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  }
}

namespace {

json read_json(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw IoError("cannot read " + p.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw IoError("corrupt " + p.string() + ": " + e.what());
  }
}

std::string num(const json& v, int prec = 6) {
  if (!v.is_number()) return "-";
  std::ostringstream os;
  os << std::setprecision(prec) << v.get<double>();
  return os.str();
}

}  // namespace

int report_command(const fs::path& dir, std::ostream& out, std::ostream& err) {
  try {
    if (!fs::exists(dir / "manifest.json")) throw IoError("no manifest in " + dir.string());
    const json m = read_json(dir / "manifest.json");
    const json d = fs::exists(dir / "diagnostics.json") ? read_json(dir / "diagnostics.json") : json::object();
    if (!m.contains("status") || !m.contains("steps")) throw IoError("corrupt manifest in " + dir.string());

    out << "run " << dir.string() << ": " << m["status"].get<std::string>() << ", " << m["steps"] << " steps, dt "
        << num(m.value("dt_used", json())) << ", chi1 " << num(m.value("chi1", json()), 10) << ", wall "
        << num(m.value("wall_time_s", json()), 4) << " s\n";
    if (m.value("status", "") == "aborted")
      out << "ABORTED: " << m.value("abort_reason", std::string("(no reason recorded)")) << "\n";

    out << std::left << std::setw(13) << "t" << std::setw(14) << "min_rho" << std::setw(14) << "min_C"
        << std::setw(14) << "mass_rho" << std::setw(14) << "mass_C" << std::setw(14) << "amplitude" << std::setw(14)
        << "width" << std::setw(14) << "X" << "r2\n";
    for (const json& s : d.value("snapshots", json::array())) {
      const json fit = s.value("fit", json());
      const auto f = [&](const char* k) { return fit.is_object() ? num(fit.value(k, json())) : std::string("-"); };
      out << std::setw(13) << num(s.value("t", json())) << std::setw(14) << num(s.value("min_rho", json()))
          << std::setw(14) << num(s.value("min_C", json())) << std::setw(14) << num(s.value("mass_rho", json()))
          << std::setw(14) << num(s.value("mass_C", json())) << std::setw(14) << f("amplitude") << std::setw(14)
          << f("width_param") << std::setw(14) << f("X") << f("r_squared") << "\n";
    }
    const json sp = d.value("front_speed", json());
    if (sp.is_object())
      out << "front speed c = " << num(sp["c"]) << " (rms residual " << num(sp["residual"]) << ", " << sp["points"]
          << " snapshots)\n";
    else
      out << "front speed: not enough snapshots with a fitted pulse\n";
    return kExitOk;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const json::exception& e) {
    err << "io error: corrupt run record: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace angio::io
