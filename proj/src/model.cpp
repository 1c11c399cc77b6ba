#include "angio/model.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace angio::model {

using std::numbers::pi;

std::array<double, 2> ModelParams::default_v0() { return {std::cos(pi / 10.0), std::sin(pi / 10.0)}; }

void ModelParams::validate() const {
  const std::pair<const char*, double> positive[] = {
      {"delta1", delta1}, {"beta", beta},   {"A", A},       {"Gamma", Gamma},         {"Gamma1", Gamma1},
      {"q1", q1},         {"kappa", kappa}, {"chi", chi},   {"eta", eta},             {"epsilon_v", epsilon_v},
      {"sigma_v", sigma_v}, {"a", a},       {"cL", cL},     {"v_box", v_box}};
  for (const auto& [name, v] : positive)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  if (!(cL_decay >= 0.0)) throw std::invalid_argument("cL_decay must be nonnegative");
  if (!std::isfinite(v0[0]) || !std::isfinite(v0[1])) throw std::invalid_argument("v0 must be finite");
}

double ModelParams::cL_at(double t) const { return cL_decay == 0.0 ? cL : cL * std::exp(-cL_decay * t); }

double alpha_of(double C, const ModelParams& p) {
  if (C < 0.0) throw std::domain_error("alpha_of: negative concentration");
  return p.A * C / (1.0 + C);
}

BirthRate::BirthRate(const ModelParams& p)
    : A(p.A),
      inv_pi(1.0 / pi),
      k(std::log1p(1.0 / (p.sigma_v * p.sigma_v)) / (2.0 * pi * p.beta * (1.0 + p.sigma_v * p.sigma_v))) {}

double mu_of(double C, const ModelParams& p) {
  if (C < 0.0) throw std::domain_error("mu_of: negative concentration");
  return BirthRate(p)(C);
}

// ---- chi_1 ------------------------------------------------------------------

double chi1_v_cutoff() { return std::sqrt(16.0 * std::log(10.0)); }

namespace {

double fermi(double V, const ModelParams& p) {
  const double z = (V * V - p.eta) / p.epsilon_v;
  if (z > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(z));
}

// int_{-pi}^{pi} sqrt(1 + V^2 + 2 V cos phi) dphi
double angular(double V) {
  const double k = 2.0 * std::sqrt(V) / (1.0 + V);
  return 4.0 * (1.0 + V) * boost::math::ellint_2(std::min(k, 1.0));
}

double chi1_gk(const ModelParams& p, bool with_fermi, double* error_estimate) {
  using boost::math::quadrature::gauss_kronrod;
  const double vmax = chi1_v_cutoff();
  auto f = [&](double V) {
    const double w = with_fermi ? fermi(V, p) : 1.0;
    return angular(V) * w * std::exp(-V * V) * V;
  };
  // break points: the kink of the angular integral at V = 1 and the Fermi edge
  std::vector<double> cuts = {0.0, 1.0};
  const double edge = std::sqrt(p.eta);
  if (with_fermi && edge > 1.0 && edge < vmax) {
    const double w = 40.0 * p.epsilon_v / (2.0 * edge);
    if (edge - w > 1.0) cuts.push_back(edge - w);
    cuts.push_back(edge);
    if (edge + w < vmax) cuts.push_back(edge + w);
  }
  cuts.push_back(vmax);
  double total = 0.0;
  double err_total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(f, cuts[k], cuts[k + 1], 15, 1e-14, &err);
    err_total += err;
  }
  if (err_total > 1e-10 * std::abs(total))
    throw std::runtime_error("chi1: quadrature did not converge (achieved error estimate " +
                             std::to_string(err_total / std::abs(total)) + " relative)");
  if (error_estimate) *error_estimate = p.chi / pi * err_total;
  return p.chi / pi * total;
}

double simpson_panel_sum(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace

double chi1_adaptive(const ModelParams& p, double* error_estimate) { return chi1_gk(p, true, error_estimate); }

double chi1_limit(const ModelParams& p) { return chi1_gk(p, false, nullptr); }

double chi1_simpson(const ModelParams& p, int v_panels, int phi_panels) {
  if (v_panels < 2 || phi_panels < 2) throw std::invalid_argument("chi1_simpson: too few panels");
  std::vector<double> cosphi(phi_panels + 1);
  for (int k = 0; k <= phi_panels; ++k) cosphi[k] = std::cos(pi * k / phi_panels);
  // phi over [0, pi], doubled by symmetry
  auto inner = [&](double V) {
    const double h = pi / phi_panels;
    double s = 0.0;
    for (int k = 0; k <= phi_panels; ++k) {
      const double w = (k == 0 || k == phi_panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      s += w * std::sqrt(std::max(0.0, 1.0 + V * V + 2.0 * V * cosphi[k]));
    }
    return 2.0 * s * h / 3.0;
  };
  auto f = [&](double V) { return inner(V) * fermi(V, p) * std::exp(-V * V) * V; };
  const double vmax = chi1_v_cutoff();
  const double edge = std::sqrt(p.eta);
  double total = 0.0;
  if (edge > 1.0 && edge < vmax) {
    const double w = 40.0 * p.epsilon_v / (2.0 * edge);
    total += simpson_panel_sum(f, 0.0, 1.0, v_panels);
    total += simpson_panel_sum(f, 1.0, edge - w, v_panels);
    total += simpson_panel_sum(f, edge - w, edge + w, 200);
    total += simpson_panel_sum(f, edge + w, vmax, v_panels);
  } else {
    total += simpson_panel_sum(f, 0.0, 1.0, v_panels);
    total += simpson_panel_sum(f, 1.0, vmax, v_panels);
  }
  return p.chi / pi * total;
}

double chi1_of(const ModelParams& p) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double>, double> cache;
  const auto key = std::make_tuple(p.chi, p.eta, p.epsilon_v);
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const double v = p.chi == 0.0 ? 0.0 : chi1_adaptive(p);
  cache.emplace(key, v);
  return v;
}

// ---- initial and boundary data ----------------------------------------------

double velocity_mass(const ModelParams& p) {
  double m = 1.0;
  for (double c : p.v0) m *= std::sqrt(pi) / 2.0 * (std::erf(p.v_box - c) - std::erf(-p.v_box - c));
  return m;
}

double initial_rho_point(double x1, double x2, const ModelParams& p) {
  double tips = 0.0;
  for (int j = 1; j <= 20; ++j) {
    const double xj = -0.3 + (j - 1) * 0.6 / 19.0;
    const double z = (x2 - xj) / 0.08;
    tips += std::exp(-z * z);
  }
  const double z1 = x1 / 0.06;
  return 2.0 / (pi * pi) / 0.0048 * std::exp(-z1 * z1) * tips * velocity_mass(p);
}

double initial_c_point(double x1, double x2) {
  const double a = (x1 - 1.0) / 1.5;
  const double b = x2 / 0.3;
  return 1.1 * std::exp(-(a * a + b * b));
}

double boundary_c(double t, double x2, const ModelParams& p) { return p.cL_at(t) * std::exp(-p.a * p.a * x2 * x2); }

SystemState initial_state(const GridSpec& grid, const ModelParams& p, const QuadratureTables& q) {
  SystemState s;
  s.rho = average_field([&](double x, double y) { return initial_rho_point(x, y, p); }, grid, q);
  s.C = average_field(initial_c_point, grid, q);
  s.I = Field2D(grid.Nx, grid.Ny);
  s.t = 0.0;
  fill_ghosts(s, grid, p, q);
  return s;
}

void fill_c_ghosts(Field2D& C, double t, const GridSpec& grid, const ModelParams& p, const QuadratureTables& q) {
  const int nx = grid.Nx;
  const int ny = grid.Ny;
  C.fill_ghosts_constant(0.0);
  for (int j = 0; j < ny; ++j) {
    double g = 0.0;
    for (int a = 0; a < 5; ++a) g += q.t5_weights[a] * boundary_c(t, grid.y_center(j) + q.t5_nodes[a] * grid.dy, p);
    for (int i = nx; i < nx + kGhost; ++i) C(i, j) = g;
  }
}

void fill_ghosts(SystemState& s, const GridSpec& grid, const ModelParams& p, const QuadratureTables& q) {
  fill_c_ghosts(s.C, s.t, grid, p, q);
  s.rho.fill_ghosts_constant(0.0);
  s.I.fill_ghosts_mirror();
}

// ---- force --------------------------------------------------------------------

namespace {

struct Taps {
  // Average of the two central polynomials sharing a face (cells f - 1 and
  // f), as six taps on the window f - 3 .. f + 2, for each face Gauss point:
  // value and d/dt.
  double val[3][6];
  double der[3][6];
  // linear-mode values at the five double-average nodes
  double node[5][5];
};

Taps make_taps(const QuadratureTables& q) {
  Taps t{};
  for (int m = 0; m < 5; ++m) {
    weno::Stencil5 e{};
    e[m] = 1.0;
    const weno::Coeffs5 c = weno::central_poly_coeffs(e);
    for (int b = 0; b < 3; ++b) {
      t.val[b][m] += 0.5 * weno::eval_poly(c, 0.5 + q.gl3_nodes[b]);
      t.der[b][m] += 0.5 * weno::eval_poly_derivative(c, 0.5 + q.gl3_nodes[b]);
      t.val[b][m + 1] += 0.5 * weno::eval_poly(c, -0.5 + q.gl3_nodes[b]);
      t.der[b][m + 1] += 0.5 * weno::eval_poly_derivative(c, -0.5 + q.gl3_nodes[b]);
    }
    for (int a = 0; a < 5; ++a) t.node[a][m] = weno::eval_poly(c, q.t5_nodes[a]);
  }
  return t;
}

double prefactor(double C, const ModelParams& p) {
  const double base = 1.0 + p.Gamma1 * std::max(C, 0.0);
  return p.delta1 / (p.q1 == 1.0 ? base : std::pow(base, p.q1));
}

double dot5(const double* taps, const double* v) {
  return taps[0] * v[0] + taps[1] * v[1] + taps[2] * v[2] + taps[3] * v[3] + taps[4] * v[4];
}

double dot6(const double* taps, const double* v) { return dot5(taps, v) + taps[5] * v[5]; }

}  // namespace

AdvectionField force_field(const Field2D& C, const GridSpec& grid, const ModelParams& p, const QuadratureTables& q) {
  static const Taps taps = make_taps(q);
  const int nx = grid.Nx;
  const int ny = grid.Ny;
  AdvectionField adv(nx, ny);
  const int span_x = nx + 2 * kGhost;
  const int span_y = ny + 2 * kGhost;

  // x faces: transverse (y) collapse to the nodes, then value/derivative in x
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const double inv_h = 1.0 / grid.dx;
    std::vector<double> line(static_cast<std::size_t>(span_x));
    for (int a = 0; a < 5; ++a) {
      for (int k = -kGhost; k < nx + kGhost; ++k) {
        const double col[5] = {C(k, j - 2), C(k, j - 1), C(k, j), C(k, j + 1), C(k, j + 2)};
        line[k + kGhost] = dot5(taps.node[a], col);
      }
      for (int f = 0; f <= nx; ++f) {
        const double* w = &line[f - 3 + kGhost];  // cells f - 3 .. f + 2
        double* out = adv.a_face(f, j) + a * 3;
        for (int b = 0; b < 3; ++b) out[b] = prefactor(dot6(taps.val[b], w), p) * dot6(taps.der[b], w) * inv_h;
      }
    }
  }

  // y faces
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nx; ++i) {
    const double inv_h = 1.0 / grid.dy;
    std::vector<double> line(static_cast<std::size_t>(span_y));
    for (int a = 0; a < 5; ++a) {
      for (int k = -kGhost; k < ny + kGhost; ++k) {
        const double row[5] = {C(i - 2, k), C(i - 1, k), C(i, k), C(i + 1, k), C(i + 2, k)};
        line[k + kGhost] = dot5(taps.node[a], row);
      }
      for (int f = 0; f <= ny; ++f) {
        const double* w = &line[f - 3 + kGhost];  // cells f - 3 .. f + 2
        double* out = adv.b_face(i, f) + a * 3;
        for (int b = 0; b < 3; ++b) out[b] = prefactor(dot6(taps.val[b], w), p) * dot6(taps.der[b], w) * inv_h;
      }
    }
  }
  adv.zero = adv.max_abs_a() == 0.0 && adv.max_abs_b() == 0.0;
  return adv;
}

double lift_to_phase_space(double rho, std::array<double, 2> v, const ModelParams& p) {
  const double d1 = v[0] - p.v0[0];
  const double d2 = v[1] - p.v0[1];
  return std::exp(-(d1 * d1 + d2 * d2)) * rho / pi;
}

// ---- coupled system -------------------------------------------------------------

CoupledSystem::CoupledSystem(GridSpec grid, ModelParams params, SchemeOptions opt)
    : grid_(grid), params_(params), opt_(opt), chi1_(0.0), mu_(params) {
  params_.validate();
  chi1_ = chi1_of(params_);
  work_.rho = Field2D(grid_.Nx, grid_.Ny);
  work_.C = Field2D(grid_.Nx, grid_.Ny);
  work_.I = Field2D(grid_.Nx, grid_.Ny);
  zero_adv_ = zero_advection(grid_);
  const std::size_t per = opt_.source_mode == SourceMode::nodal ? 25 : 1;
  rho_rate_.assign(per * grid_.cells(), 0.0);
  c_rate_.assign(per * grid_.cells(), 0.0);
}

void CoupledSystem::set_step(double dt, double euler_dt) {
  dt_ = dt;
  euler_dt_ = euler_dt;
}

std::vector<double> CoupledSystem::pack(const SystemState& s) const {
  const std::size_t n = grid_.cells();
  std::vector<double> u(3 * n);
  s.rho.get_interior(std::span<double>(u.data(), n));
  s.C.get_interior(std::span<double>(u.data() + n, n));
  s.I.get_interior(std::span<double>(u.data() + 2 * n, n));
  return u;
}

SystemState CoupledSystem::unpack(std::span<const double> u, double t) const {
  if (u.size() != size()) throw std::invalid_argument("CoupledSystem::unpack: size mismatch");
  const std::size_t n = grid_.cells();
  SystemState s;
  s.rho = Field2D(grid_.Nx, grid_.Ny);
  s.C = Field2D(grid_.Nx, grid_.Ny);
  s.I = Field2D(grid_.Nx, grid_.Ny);
  s.rho.set_interior(u.subspan(0, n));
  s.C.set_interior(u.subspan(n, n));
  s.I.set_interior(u.subspan(2 * n, n));
  s.t = t;
  fill_ghosts(s, grid_, params_);
  return s;
}

void CoupledSystem::load(std::span<const double> u, double t) {
  if (u.size() != size()) throw std::invalid_argument("CoupledSystem: state size mismatch");
  const std::size_t n = grid_.cells();
  work_.rho.set_interior(u.subspan(0, n));
  work_.C.set_interior(u.subspan(n, n));
  work_.I.set_interior(u.subspan(2 * n, n));
  work_.t = t;
  fill_ghosts(work_, grid_, params_);
}

CoupledSystem::Speeds CoupledSystem::speeds(std::span<const double> u, double t) {
  load(u, t);
  const AdvectionField F = force_field(work_.C, grid_, params_);
  const int nx = grid_.Nx;
  const int ny = grid_.Ny;
  Speeds s;
  s.max_d = std::max(1.0 / (2.0 * params_.beta), params_.kappa);
  for (int j = 0; j < ny; ++j)
    for (int f = 0; f <= nx; ++f)
      for (int k = 0; k < 15; ++k) {
        const double a = F.a_face(f, j)[k];
        const double v = f == 0 ? std::max(-a, 0.0) : f == nx ? std::max(a, 0.0) : std::abs(a);
        s.max_a = std::max(s.max_a, v);
      }
  for (int f = 0; f <= ny; ++f)
    for (int i = 0; i < nx; ++i)
      for (int k = 0; k < 15; ++k) {
        const double b = F.b_face(i, f)[k];
        const double v = f == 0 ? std::max(-b, 0.0) : f == ny ? std::max(b, 0.0) : std::abs(b);
        s.max_b = std::max(s.max_b, v);
      }
  return s;
}

void CoupledSystem::rhs(double t, std::span<const double> u, std::span<double> out) {
  if (out.size() != size()) throw std::invalid_argument("CoupledSystem::rhs: output size mismatch");
  load(u, t);
  const int nx = grid_.Nx;
  const int ny = grid_.Ny;
  const std::size_t n = grid_.cells();
  const AdvectionField F = force_field(work_.C, grid_, params_);

  RhsOptions ro;
  ro.flux = opt_.flux;
  ro.limiter = opt_.limiter;
  ro.weno = opt_.weno;
  ro.dt = dt_;
  ro.euler_dt = euler_dt_;

  const bool nodal = opt_.source_mode == SourceMode::nodal;
  const SourceTerms c_src{c_rate_, {}, opt_.source_mode};
  if (nodal) {
    // The C equation's own raw reconstruction also supplies C at the tensor
    // nodes for mu; it is limited later with the C outflow weights.
    reconstruct_for_rhs(work_.C, rhs_targets(zero_adv_, params_.kappa, c_src), ro, c_ws_);
    weno::reconstruct_lines(work_.I, weno::kTensor, opt_.weno, i_points_);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        weno::CellPoints cp;
        std::copy_n(&c_ws_.recon.at(i, j).tensor[0][0], 25, &cp.tensor[0][0]);
        weno::CellPoints& ip = i_points_.at(i, j);
        if (opt_.limiter) {
          limit_cell(cp, weno::kTensor, work_.C(i, j), nullptr, 0.0);
          limit_cell(ip, weno::kTensor, work_.I(i, j), nullptr, 0.0);
        }
        double* rate = rho_rate_.data() + 25 * grid_.index(i, j);
        for (int k = 0; k < 25; ++k)
          rate[k] = mu_(std::max(cp.tensor[k / 5][k % 5], 0.0)) - params_.Gamma * ip.tensor[k / 5][k % 5];
      }
  } else {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        rho_rate_[grid_.index(i, j)] =
            mu_(std::max(work_.C(i, j), 0.0)) - params_.Gamma * work_.I(i, j);
  }

  const SourceTerms rho_src{rho_rate_, {}, opt_.source_mode};
  try {
    spatial_rhs(work_.rho, F, 1.0 / (2.0 * params_.beta), rho_src, grid_, ro, rho_ws_, out.subspan(0, n));
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("rho equation: ") + e.what(), e.i(), e.j());
  }

  if (nodal) {
    const weno::Reconstruction& rp = rho_ws_.recon;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double* rate = c_rate_.data() + 25 * grid_.index(i, j);
        const weno::CellPoints& c = rp.at(i, j);
        for (int k = 0; k < 25; ++k) rate[k] = -chi1_ * c.tensor[k / 5][k % 5];
      }
  } else {
    for (std::size_t k = 0; k < n; ++k) c_rate_[k] = -chi1_ * u[k];
  }

  try {
    if (nodal) {
      assemble_rhs(work_.C, zero_adv_, params_.kappa, c_src, grid_, ro, c_ws_, out.subspan(n, n));
    } else {
      spatial_rhs(work_.C, zero_adv_, params_.kappa, c_src, grid_, ro, c_ws_, out.subspan(n, n));
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("C equation: ") + e.what(), e.i(), e.j());
  }

  for (std::size_t k = 0; k < n; ++k) out[2 * n + k] = u[k];
}

}  // namespace angio::model
