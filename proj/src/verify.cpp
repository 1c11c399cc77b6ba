#include "angio/verify.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "angio/diagnostics.hpp"
#include "angio/flux.hpp"
#include "angio/model.hpp"
#include "angio/ssp.hpp"
#include "angio/weno.hpp"
#include "json.hpp"

namespace angio::verify {

namespace {

using Clock = std::chrono::steady_clock;
using weno::EvalPoint;

std::string sci(double v, int prec = 3) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(prec) << v;
  return os.str();
}

template <class F>
CheckResult timed(int id, std::string name, F&& body) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

// E[s^r] for s with the triangular density 1 - |s| on [-1, 1]: the kernel of
// a double cell average in units of the cell width
double hat_moment(int r) { return r % 2 ? 0.0 : 2.0 / ((r + 1.0) * (r + 2.0)); }

// double average of (x - x0)^k over the cell centred at c (width 1)
double monomial_average(int k, double c) {
  double s = 0.0;
  double binom = 1.0;
  for (int r = 0; r <= k; ++r) {
    s += binom * std::pow(c, k - r) * hat_moment(r);
    binom = binom * (k - r) / (r + 1);
  }
  return s;
}

}  // namespace

CheckResult check_weno_exactness() {
  return timed(1, "WENO exactness (linear mode, degree <= 4)", [](CheckResult& r) {
    const weno::Options lin{weno::Mode::linear, weno::kDefaultEps};
    double worst = 0.0;
    // cell i sits at x0 + 0.37 so no stencil is symmetric about the origin
    const double shift = 0.37;
    for (int k = 0; k <= 4; ++k) {
      weno::Stencil5 s;
      for (int m = 0; m < 5; ++m) s[m] = monomial_average(k, shift + (m - 2));
      for (int p = 0; p < weno::kNumEvalPoints; ++p) {
        const auto ep = static_cast<EvalPoint>(p);
        const double exact = std::pow(shift + weno::offset(ep), k);
        worst = std::max(worst, std::abs(weno::reconstruct_point(s, ep, lin) - exact));
      }
    }
    r.passed = worst <= kExactnessTol;
    r.detail = "max error " + sci(worst) + " (tol " + sci(kExactnessTol, 0) + ")";
  });
}

CheckResult check_weight_table() {
  return timed(2, "linear weights match the exactness system", [](CheckResult& r) {
    double worst = 0.0;
    double worst_residual = 0.0;
    for (int p = 0; p < weno::kNumEvalPoints; ++p) {
      const double t = weno::offset(static_cast<EvalPoint>(p));
      // rows: monomial degree; columns: sub-stencil quadratic's value at t
      Eigen::Matrix<double, 5, 3> a;
      Eigen::Matrix<double, 5, 1> b;
      for (int k = 0; k <= 4; ++k) {
        for (int m = 0; m < 3; ++m) {
          // quadratic q(x) = c0 + c1 x + c2 x^2 with the double averages of
          // x^k on cells centred at m - 2, m - 1, m
          Eigen::Matrix3d mat;
          Eigen::Vector3d rhs;
          for (int l = 0; l < 3; ++l) {
            const double c = m - 2 + l;
            for (int e = 0; e < 3; ++e) mat(l, e) = monomial_average(e, c);
            rhs[l] = monomial_average(k, c);
          }
          const Eigen::Vector3d coef = mat.partialPivLu().solve(rhs);
          a(k, m) = coef[0] + coef[1] * t + coef[2] * t * t;
        }
        b[k] = std::pow(t, k);
      }
      const Eigen::Vector3d d = a.colPivHouseholderQr().solve(b);
      worst_residual = std::max(worst_residual, (a * d - b).cwiseAbs().maxCoeff());
      const weno::Triple stored = weno::linear_weights(p);
      for (int m = 0; m < 3; ++m) worst = std::max(worst, std::abs(stored[m] - d[m]));
    }
    r.passed = worst <= kWeightTableTol && worst_residual <= kWeightTableTol;
    r.detail = "max |stored - solved| " + sci(worst) + ", system residual " + sci(worst_residual) + " (tol " +
               sci(kWeightTableTol, 0) + ")";
  });
}

namespace {

double advection_error(int n, weno::Mode mode) {
  const GridSpec g = build_grid(1.0, 0.0, 1.0, n, 5);
  const double two_pi = 2.0 * std::numbers::pi;
  const double T = 1.0;
  const AdvectionField adv =
      sample_advection(g, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
  RhsOptions opt;
  opt.flux = FluxKind::upwind;
  opt.limiter = false;
  opt.weno.mode = mode;

  Field2D u(n, 5);
  RhsWorkspace ws;
  const ssp::RhsFn rhs = [&](double, std::span<const double> v, std::span<double> out) {
    u.set_interior(v);
    u.fill_periodic();
    spatial_rhs(u, adv, 0.0, SourceTerms{}, g, opt, ws, out);
  };
  const auto exact = [&](double t) {
    return average_field([&](double x, double) { return std::sin(two_pi * (x - t)); }, g).interior();
  };
  ssp::AdvanceConfig cfg;
  cfg.scheme = ssp::Scheme::rk3;
  cfg.dt = 0.5 * std::pow(g.dx, 5.0 / 3.0);
  cfg.t_final = T;
  const ssp::Trajectory tr = ssp::advance(exact(0.0), rhs, cfg);
  return diagnostics::l1_distance(tr.final_state, exact(T), g.dx * g.dy);
}

double ode_error(ssp::Scheme s, double dt) {
  const ssp::RhsFn rhs = [](double, std::span<const double> u, std::span<double> r) { r[0] = -u[0]; };
  ssp::AdvanceConfig cfg;
  cfg.scheme = s;
  cfg.dt = dt;
  cfg.t_final = 1.0;
  const ssp::Trajectory tr = ssp::advance({1.0}, rhs, cfg);
  return std::abs(tr.final_state[0] - std::exp(-1.0));
}

}  // namespace

CheckResult check_convergence(weno::Mode mode) {
  return timed(3, std::string("spatial order, periodic advection (") + std::string(io::to_string(mode)) + ")",
               [mode](CheckResult& r) {
                 const std::vector<int> ns = {25, 50, 100, 200};
                 std::vector<double> h;
                 std::vector<double> err;
                 for (int n : ns) {
                   h.push_back(1.0 / n);
                   err.push_back(advection_error(n, mode));
                 }
                 const double order = diagnostics::convergence_order(h, err);
                 r.passed = order >= kMinSpatialOrder;
                 std::ostringstream os;
                 os << "L1 errors";
                 for (double e : err) os << " " << sci(e, 2);
                 os << "; order " << std::fixed << std::setprecision(3) << order << " (min " << kMinSpatialOrder << ")";
                 r.detail = os.str();
               });
}

CheckResult check_integrator_orders() {
  return timed(4, "integrator orders on u' = -u", [](CheckResult& r) {
    const std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
    const auto order = [&](ssp::Scheme s) {
      std::vector<double> e;
      for (double dt : dts) e.push_back(ode_error(s, dt));
      return diagnostics::convergence_order(dts, e);
    };
    const double o2 = order(ssp::Scheme::rk2);
    const double o3 = order(ssp::Scheme::rk3);
    const double om = order(ssp::Scheme::msstep3);
    const ssp::RhsFn rhs = [](double, std::span<const double> u, std::span<double> d) { d[0] = -u[0]; };
    const double one = ssp::rk3_step({1.0}, 0.0, 0.1, rhs)[0];
    const double dev = std::abs(one - kRk3StepValue);
    r.passed = o2 >= kMinOrderRk2 && o3 >= kMinOrderRk3 && om >= kMinOrderMsstep3 && dev <= kRk3StepTol;
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << "rk2 " << o2 << ", rk3 " << o3 << ", msstep3 " << om
       << "; rk3 step(0.1) = " << std::setprecision(12) << one << " (dev " << sci(dev) << ")";
    r.detail = os.str();
  });
}

CheckResult check_conservation() {
  return timed(5, "mass conservation, periodic pure advection", [](CheckResult& r) {
    const double two_pi = 2.0 * std::numbers::pi;
    const GridSpec g = build_grid(1.0, 0.0, 1.0, 32, 32);
    const AdvectionField adv = sample_advection(
        g, [&](double, double y) { return 1.0 + 0.5 * std::sin(two_pi * y); },
        [&](double x, double) { return 0.5 * std::cos(two_pi * x); });
    RhsOptions opt;
    opt.flux = FluxKind::upwind;
    opt.limiter = true;
    const auto bound = cfl_max_dt(adv.max_abs_a(), adv.max_abs_b(), 0.0, g, 1.0);
    opt.dt = *bound;
    opt.euler_dt = *bound;

    Field2D u(g.Nx, g.Ny);
    RhsWorkspace ws;
    const ssp::RhsFn rhs = [&](double, std::span<const double> v, std::span<double> out) {
      u.set_interior(v);
      u.fill_periodic();
      spatial_rhs(u, adv, 0.0, SourceTerms{}, g, opt, ws, out);
    };
    const auto u0 = average_field(
        [&](double x, double y) {
          const double dx = x - 0.5, dy = y - 0.5;
          return std::exp(-40.0 * (dx * dx + dy * dy));
        },
        g).interior();
    ssp::AdvanceConfig cfg;
    cfg.scheme = ssp::Scheme::rk3;
    cfg.dt = *bound;
    cfg.t_final = 1000.0 * *bound;
    const ssp::Trajectory tr = ssp::advance(u0, rhs, cfg);
    const double m0 = diagnostics::min_and_mass(u0, g).mass;
    const double m1 = diagnostics::min_and_mass(tr.final_state, g).mass;
    const double drift = std::abs(m1 - m0);
    r.passed = tr.steps == 1000 && drift <= kMassTol;
    r.detail = std::to_string(tr.steps) + " steps, mass " + sci(m0, 12) + " -> drift " + sci(drift) + " (tol " +
               sci(kMassTol, 0) + ")";
  });
}

CheckResult check_chi1() {
  return timed(8, "chi_1 cross-validation", [](CheckResult& r) {
    const model::ModelParams p;
    const double a = model::chi1_adaptive(p);
    const double s = model::chi1_simpson(p);
    const double l = model::chi1_limit(p);
    const double rel_routes = std::abs(a - s) / std::abs(a);
    const double rel_limit = std::abs(a - l) / std::abs(l);
    r.passed = rel_routes <= kChi1RouteTol && rel_limit <= kChi1LimitTol;
    std::ostringstream os;
    os << std::setprecision(16) << "adaptive " << a << ", simpson " << s << " (rel " << sci(rel_routes)
       << "), limit " << l << " (rel " << sci(rel_limit) << ")";
    r.detail = os.str();
  });
}

CheckResult check_positivity(const io::RunResult& run) {
  return timed(6, "positivity and maximum principle, every step", [&](CheckResult& r) {
    const auto& a = run.audit;
    const double c_cap = run.config.params.cL + kMaxPrincipleSlack;
    r.passed = !run.aborted && a.min_rho >= 0.0 && a.min_C >= 0.0 && a.max_C <= c_cap;
    std::ostringstream os;
    os << run.steps << " steps to t = " << run.t_reached << ": min rho " << sci(a.min_rho) << " (step "
       << a.min_rho_step << "), min C " << sci(a.min_C) << ", max C " << std::setprecision(15) << a.max_C
       << " (cap " << c_cap << ")";
    if (run.aborted) os << "; aborted: " << run.abort_reason;
    r.detail = os.str();
  });
}

CheckResult check_pulse(const io::RunResult& run) {
  return timed(7, "pulse fit, forward motion, shrinking C", [&](CheckResult& r) {
    bool fits = true;
    bool forward = true;
    bool shrinking = true;
    std::optional<double> prev_X;
    std::optional<double> prev_C;
    double min_r2 = 1.0;
    std::ostringstream os;
    int counted = 0;
    for (const auto& s : run.snapshots) {
      if (s.t < kPulseFromTime - 1e-9) continue;
      ++counted;
      if (!s.fit) {
        fits = false;
        os << "t=" << s.t << " no fit (" << s.fit_error << "); ";
        continue;
      }
      min_r2 = std::min(min_r2, s.fit->r_squared);
      if (s.fit->r_squared <= io::kPulseR2) fits = false;
      if (prev_X && !(s.fit->X > *prev_X)) forward = false;
      if (prev_C && s.mass_C > *prev_C) shrinking = false;
      prev_X = s.fit->X;
      prev_C = s.mass_C;
      os << "t=" << std::setprecision(4) << s.t << " X=" << s.fit->X << " r2=" << std::setprecision(5)
         << s.fit->r_squared << " intC=" << std::setprecision(6) << s.mass_C << "; ";
    }
    r.passed = !run.aborted && counted >= 2 && fits && forward && shrinking;
    os << "(a) min r2 " << min_r2 << (fits ? " ok" : " FAIL") << ", (b) X increasing " << (forward ? "ok" : "FAIL")
       << ", (c) intC nonincreasing " << (shrinking ? "ok" : "FAIL");
    if (run.speed) os << ", speed c = " << run.speed->c;
    r.detail = os.str();
  });
}

bool same_snapshots(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why) {
  const auto list = [](const std::filesystem::path& dir) {
    std::ifstream is(dir / "manifest.json");
    if (!is) throw io::IoError("no manifest in " + dir.string());
    const auto m = nlohmann::json::parse(is);
    std::vector<std::string> files;
    for (const auto& s : m.at("snapshots")) files.push_back(s.at("file").get<std::string>());
    return files;
  };
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw io::IoError("cannot read " + p.string());
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  const auto fa = list(a);
  const auto fb = list(b);
  if (fa != fb) {
    why = "snapshot lists differ";
    return false;
  }
  if (fa.empty()) {
    why = "no snapshots";
    return false;
  }
  for (const auto& f : fa)
    if (slurp(a / f) != slurp(b / f)) {
      why = f + " differs";
      return false;
    }
  why = std::to_string(fa.size()) + " snapshot files identical";
  return true;
}

std::string format(const CheckResult& r) {
  std::ostringstream os;
  os << "[" << (r.passed ? "PASS" : "FAIL") << "] " << r.id << " " << r.name << ": " << r.detail << " ("
     << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

int verify_command(const std::filesystem::path& out_dir, bool full, std::ostream& out) {
  std::vector<CheckResult> results;
  const auto add = [&](CheckResult r) {
    out << format(r) << std::endl;
    results.push_back(std::move(r));
  };
  add(check_weno_exactness());
  add(check_weight_table());
  add(check_convergence());
  add(check_integrator_orders());
  add(check_conservation());
  add(check_chi1());

  io::RunConfig cfg;
  if (!full) {
    // short horizon of the reference setup; the full run takes minutes
    cfg.T_final = 0.0229;
    cfg.snapshot_interval = 0.00229;
  }
  try {
    const io::RunResult run = io::run_simulation(cfg, out_dir / (full ? "reference_run" : "short_run"));
    add(check_positivity(run));
    if (full) add(check_pulse(run));
  } catch (const std::exception& e) {
    CheckResult r;
    r.id = 6;
    r.name = "positivity run";
    r.detail = std::string("exception: ") + e.what();
    add(r);
  }
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  out << (failed ? std::to_string(failed) + " check(s) failed" : std::string("all checks passed")) << std::endl;
  return failed ? 1 : 0;
}

}  // namespace angio::verify
