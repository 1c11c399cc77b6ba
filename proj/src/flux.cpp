#include "angio/flux.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace angio {

double upwind_flux(double a, double u_minus, double u_plus) { return a >= 0.0 ? a * u_minus : a * u_plus; }

double lax_friedrichs_flux(double a, double u_minus, double u_plus, double dx_over_dt) {
  return 0.5 * a * (u_minus + u_plus) + 0.5 * dx_over_dt * (u_minus - u_plus);
}

double numerical_flux(FluxKind kind, double a, double u_minus, double u_plus, double dx_over_dt) {
  return kind == FluxKind::upwind ? upwind_flux(a, u_minus, u_plus)
                                  : lax_friedrichs_flux(a, u_minus, u_plus, dx_over_dt);
}

AdvectionField::AdvectionField(int nx_, int ny_)
    : nx(nx_),
      ny(ny_),
      a(static_cast<std::size_t>(nx_ + 1) * ny_ * 15, 0.0),
      b(static_cast<std::size_t>(nx_) * (ny_ + 1) * 15, 0.0) {}

double AdvectionField::max_abs_a() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double AdvectionField::max_abs_b() const {
  double m = 0.0;
  for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

AdvectionField zero_advection(const GridSpec& grid) { return AdvectionField(grid.Nx, grid.Ny); }

AdvectionField sample_advection(const GridSpec& grid, const ScalarFunction& a, const ScalarFunction& b,
                                const QuadratureTables& q) {
  AdvectionField adv(grid.Nx, grid.Ny);
  for (int j = 0; j < grid.Ny; ++j)
    for (int f = 0; f <= grid.Nx; ++f) {
      double* out = adv.a_face(f, j);
      for (int al = 0; al < 5; ++al)
        for (int be = 0; be < 3; ++be)
          out[al * 3 + be] = a(grid.x_face(f) + q.gl3_nodes[be] * grid.dx, grid.y_center(j) + q.t5_nodes[al] * grid.dy);
    }
  for (int f = 0; f <= grid.Ny; ++f)
    for (int i = 0; i < grid.Nx; ++i) {
      double* out = adv.b_face(i, f);
      for (int al = 0; al < 5; ++al)
        for (int be = 0; be < 3; ++be)
          out[al * 3 + be] = b(grid.x_center(i) + q.t5_nodes[al] * grid.dx, grid.y_face(f) + q.gl3_nodes[be] * grid.dy);
    }
  adv.zero = adv.max_abs_a() == 0.0 && adv.max_abs_b() == 0.0;
  return adv;
}

double interface_flux_sum(std::span<const double> u_minus, std::span<const double> u_plus,
                          std::span<const double> a, const QuadratureTables& q, FluxKind kind,
                          double dx_over_dt) {
  double sum = 0.0;
  for (int al = 0; al < 5; ++al) {
    double row = 0.0;
    for (int be = 0; be < 3; ++be) {
      const int k = al * 3 + be;
      row += q.gl3_weights[be] * numerical_flux(kind, a[k], u_minus[k], u_plus[k], dx_over_dt);
    }
    sum += q.t5_weights[al] * row;
  }
  return sum;
}

double diffusion_term(std::span<const double> x_left, std::span<const double> x_mid,
                      std::span<const double> x_right, std::span<const double> y_down,
                      std::span<const double> y_mid, std::span<const double> y_up, double d,
                      const GridSpec& grid, const QuadratureTables& q) {
  if (d == 0.0) return 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (int al = 0; al < 5; ++al) {
    sx += q.t5_weights[al] * (x_right[al] - 2.0 * x_mid[al] + x_left[al]);
    sy += q.t5_weights[al] * (y_up[al] - 2.0 * y_mid[al] + y_down[al]);
  }
  return d * (sx / (grid.dx * grid.dx) + sy / (grid.dy * grid.dy));
}

double source_term(std::span<const double> h, const QuadratureTables& q) {
  double sum = 0.0;
  for (int al = 0; al < 5; ++al) {
    double row = 0.0;
    for (int be = 0; be < 5; ++be) row += q.t5_weights[be] * h[al * 5 + be];
    sum += q.t5_weights[al] * row;
  }
  return sum;
}

namespace {

// Coefficient of the cell's own state in -(1/h) * fhat at its "hi" face.
inline double own_outflow_hi(FluxKind kind, double a, double ratio) {
  if (kind == FluxKind::upwind) return std::max(a, 0.0);
  return std::max(0.0, 0.5 * a + 0.5 * ratio);
}

// Coefficient of the cell's own state in +(1/h) * fhat at its "lo" face.
inline double own_outflow_lo(FluxKind kind, double a, double ratio) {
  if (kind == FluxKind::upwind) return std::max(-a, 0.0);
  return std::max(0.0, 0.5 * ratio - 0.5 * a);
}

// Contiguous runs of a cell's values for the requested families, paired with
// the matching runs of OutflowWeights.
struct Run {
  double* u;
  const double* o;
  int n;
};

// Independent accumulators keep the comparisons off one dependency chain.
double run_min(const double* u, int n) {
  double m[4] = {u[0], u[0], u[0], u[0]};
  int k = 0;
  for (; k + 4 <= n; k += 4)
    for (int l = 0; l < 4; ++l) m[l] = u[k + l] < m[l] ? u[k + l] : m[l];
  for (; k < n; ++k) m[0] = u[k] < m[0] ? u[k] : m[0];
  return std::min(std::min(m[0], m[1]), std::min(m[2], m[3]));
}

void scale_run(double* __restrict u, int n, double center, double theta) {
  for (int k = 0; k < n; ++k) {
    const double v = center + theta * (u[k] - center);
    u[k] = v > 0.0 ? v : 0.0;
  }
}

int value_runs(weno::CellPoints& c, unsigned targets, const OutflowWeights* w, Run* runs) {
  using namespace weno;
  static const OutflowWeights kNone{};
  const OutflowWeights& o = w != nullptr ? *w : kNone;
  int r = 0;
  if (targets & kXFaces) {
    runs[r++] = {&c.x_lo[0][0], o.x_lo, 15};
    runs[r++] = {&c.x_hi[0][0], o.x_hi, 15};
  }
  if (targets & kYFaces) {
    runs[r++] = {&c.y_lo[0][0], o.y_lo, 15};
    runs[r++] = {&c.y_hi[0][0], o.y_hi, 15};
  }
  if (targets & kTensor) {
    runs[r++] = {&c.tensor[0][0], o.tensor, 25};
  } else if (targets & kXCenters) {
    runs[r++] = {c.tensor[2], o.tensor + 10, 5};
  }
  if (targets & kYCenters) runs[r++] = {c.y_center, o.y_center, 5};
  return r;
}

}  // namespace

OutflowWeights outflow_weights(int i, int j, const AdvectionField& adv, double d, const SourceTerms& src,
                               const GridSpec& grid, const RhsOptions& opt, const QuadratureTables& q) {
  OutflowWeights w{};
  const double rx = opt.dt > 0.0 ? grid.dx / opt.dt : 0.0;
  const double ry = opt.dt > 0.0 ? grid.dy / opt.dt : 0.0;
  if (!adv.zero) {
    const double* a_lo = adv.a_face(i, j);
    const double* a_hi = adv.a_face(i + 1, j);
    const double* b_lo = adv.b_face(i, j);
    const double* b_hi = adv.b_face(i, j + 1);
    const double inv_dx = 1.0 / grid.dx;
    const double inv_dy = 1.0 / grid.dy;
    for (int al = 0; al < 5; ++al)
      for (int be = 0; be < 3; ++be) {
        const int k = al * 3 + be;
        const double wq = q.t5_weights[al] * q.gl3_weights[be];
        const double wx = wq * inv_dx;
        const double wy = wq * inv_dy;
        w.x_hi[k] = wx * own_outflow_hi(opt.flux, a_hi[k], rx);
        w.x_lo[k] = wx * own_outflow_lo(opt.flux, a_lo[k], rx);
        w.y_hi[k] = wy * own_outflow_hi(opt.flux, b_hi[k], ry);
        w.y_lo[k] = wy * own_outflow_lo(opt.flux, b_lo[k], ry);
      }
  }
  if (d != 0.0) {
    for (int al = 0; al < 5; ++al) {
      w.tensor[2 * 5 + al] += 2.0 * d * q.t5_weights[al] / (grid.dx * grid.dx);
      w.y_center[al] = 2.0 * d * q.t5_weights[al] / (grid.dy * grid.dy);
    }
  }
  if (!src.rate.empty()) {
    const std::size_t cell = grid.index(i, j);
    if (src.mode == SourceMode::nodal) {
      const double* r = src.rate.data() + 25 * cell;
      for (int al = 0; al < 5; ++al)
        for (int be = 0; be < 5; ++be)
          w.tensor[al * 5 + be] += q.t5_weights[al] * q.t5_weights[be] * std::max(-r[al * 5 + be], 0.0);
    } else {
      w.cell = std::max(-src.rate[cell], 0.0);
    }
  }
  return w;
}

double limit_cell(weno::CellPoints& c, unsigned targets, double avg, const OutflowWeights* w, double euler_dt) {
  Run runs[6];
  const int nr = value_runs(c, targets, w, runs);
  if (nr == 0) return 1.0;

  double lo = run_min(runs[0].u, runs[0].n);
  for (int r = 1; r < nr; ++r) lo = std::min(lo, run_min(runs[r].u, runs[r].n));

  double theta = 1.0;
  if (!(avg > 0.0)) {
    theta = 0.0;
  } else if (lo < 0.0) {
    theta = std::min(1.0, avg / (avg - lo));
  }

  if (w != nullptr && euler_dt > 0.0 && theta > 0.0) {
    // remainder R(theta) = avg (1 - dt sum o) - theta * dt * sum o (u - avg) must stay >= 0
    double total = w->cell;
    double spread = 0.0;
    for (int r = 0; r < nr; ++r)
      for (int k = 0; k < runs[r].n; ++k) {
        total += runs[r].o[k];
        spread += runs[r].o[k] * (runs[r].u[k] - avg);
      }
    const double base = avg * (1.0 - euler_dt * total);
    const double growth = euler_dt * spread;
    if (base <= 0.0) {
      theta = 0.0;
    } else if (theta * growth > base) {
      theta = base / growth;
    }
  }

  if (theta < 1.0) {
    const double center = std::max(avg, 0.0);
    for (int r = 0; r < nr; ++r) scale_run(runs[r].u, runs[r].n, center, theta);
  }
  return theta;
}

unsigned rhs_targets(const AdvectionField& adv, double d, const SourceTerms& src) {
  unsigned t = 0;
  if (!adv.zero) t |= weno::kXFaces | weno::kYFaces;
  if (d != 0.0) t |= weno::kXCenters | weno::kYCenters;
  if (src.mode == SourceMode::nodal && !src.rate.empty()) t |= weno::kTensor;
  return t;
}

namespace {

void check_finite(std::span<const double> out, const GridSpec& grid) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!std::isfinite(out[k])) {
      const int i = static_cast<int>(k % static_cast<std::size_t>(grid.Nx));
      const int j = static_cast<int>(k / static_cast<std::size_t>(grid.Nx));
      throw NumericalError("spatial_rhs: non-finite value at cell (" + std::to_string(i) + ", " +
                               std::to_string(j) + ")",
                           i, j);
    }
  }
}

}  // namespace

void reconstruct_for_rhs(const Field2D& u, unsigned targets, const RhsOptions& opt, RhsWorkspace& ws) {
  if (targets != 0) {
    weno::reconstruct_lines(u, targets, opt.weno, ws.recon);
  } else {
    ws.recon.resize(u.nx(), u.ny());
  }
}

void spatial_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                 const GridSpec& grid, const RhsOptions& opt, RhsWorkspace& ws, std::span<double> out) {
  reconstruct_for_rhs(u, rhs_targets(adv, d, src), opt, ws);
  assemble_rhs(u, adv, d, src, grid, opt, ws, out);
}

void assemble_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                  const GridSpec& grid, const RhsOptions& opt, RhsWorkspace& ws, std::span<double> out) {
  const int nx = grid.Nx;
  const int ny = grid.Ny;
  if (u.nx() != nx || u.ny() != ny) throw std::invalid_argument("assemble_rhs: field does not match grid");
  if (out.size() != grid.cells()) throw std::invalid_argument("assemble_rhs: output size mismatch");
  const QuadratureTables& q = quadrature();
  const unsigned targets = rhs_targets(adv, d, src);
  const double rx = opt.dt > 0.0 ? grid.dx / opt.dt : 0.0;
  const double ry = opt.dt > 0.0 ? grid.dy / opt.dt : 0.0;
  if (opt.flux == FluxKind::lax_friedrichs && !adv.zero && !(opt.dt > 0.0))
    throw std::invalid_argument("assemble_rhs: Lax-Friedrichs flux needs dt > 0");

  weno::Reconstruction& rec = ws.recon;
  if (rec.nx() != nx || rec.ny() != ny || (rec.targets() & targets) != targets)
    throw std::logic_error("assemble_rhs: workspace does not hold the required reconstruction");

  if (opt.limiter && targets != 0) {
#pragma omp parallel for schedule(static)
    for (int j = -1; j <= ny; ++j) {
      for (int i = -1; i <= nx; ++i) {
        const bool interior = i >= 0 && i < nx && j >= 0 && j < ny;
        if (interior && opt.euler_dt > 0.0) {
          const OutflowWeights w = outflow_weights(i, j, adv, d, src, grid, opt, q);
          limit_cell(rec.at(i, j), targets, u(i, j), &w, opt.euler_dt);
        } else {
          limit_cell(rec.at(i, j), targets, u(i, j), nullptr, 0.0);
        }
      }
    }
  }

  if (!adv.zero) {
    ws.x_flux.assign(static_cast<std::size_t>(nx + 1) * ny, 0.0);
    ws.y_flux.assign(static_cast<std::size_t>(nx) * (ny + 1), 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j)
      for (int f = 0; f <= nx; ++f)
        ws.x_flux[static_cast<std::size_t>(j) * (nx + 1) + f] =
            interface_flux_sum({&rec.at(f - 1, j).x_hi[0][0], 15}, {&rec.at(f, j).x_lo[0][0], 15},
                               {adv.a_face(f, j), 15}, q, opt.flux, rx);
#pragma omp parallel for schedule(static)
    for (int f = 0; f <= ny; ++f)
      for (int i = 0; i < nx; ++i)
        ws.y_flux[static_cast<std::size_t>(f) * nx + i] =
            interface_flux_sum({&rec.at(i, f - 1).y_hi[0][0], 15}, {&rec.at(i, f).y_lo[0][0], 15},
                               {adv.b_face(i, f), 15}, q, opt.flux, ry);
  }

  const bool nodal_rate = src.mode == SourceMode::nodal && !src.rate.empty();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    double h[25];
    for (int i = 0; i < nx; ++i) {
      const std::size_t cell = grid.index(i, j);
      double r = 0.0;
      if (!adv.zero) {
        r -= (ws.x_flux[static_cast<std::size_t>(j) * (nx + 1) + i + 1] -
              ws.x_flux[static_cast<std::size_t>(j) * (nx + 1) + i]) /
             grid.dx;
        r -= (ws.y_flux[static_cast<std::size_t>(j + 1) * nx + i] - ws.y_flux[static_cast<std::size_t>(j) * nx + i]) /
             grid.dy;
      }
      if (d != 0.0) {
        r += diffusion_term(rec.at(i - 1, j).tensor[2], rec.at(i, j).tensor[2], rec.at(i + 1, j).tensor[2],
                            rec.at(i, j - 1).y_center, rec.at(i, j).y_center, rec.at(i, j + 1).y_center, d,
                            grid, q);
      }
      if (src.mode == SourceMode::nodal) {
        if (nodal_rate || !src.forcing.empty()) {
          const double* rate = nodal_rate ? src.rate.data() + 25 * cell : nullptr;
          const double* forcing = src.forcing.empty() ? nullptr : src.forcing.data() + 25 * cell;
          const weno::CellPoints& c = rec.at(i, j);
          for (int k = 0; k < 25; ++k) {
            double v = 0.0;
            if (rate != nullptr) v += rate[k] * c.tensor[k / 5][k % 5];
            if (forcing != nullptr) v += forcing[k];
            h[k] = v;
          }
          r += source_term(h, q);
        }
      } else {
        if (!src.rate.empty()) r += src.rate[cell] * u(i, j);
        if (!src.forcing.empty()) r += src.forcing[cell];
      }
      out[cell] = r;
    }
  }
  check_finite(out, grid);
}

std::vector<double> spatial_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                                const GridSpec& grid, const RhsOptions& opt) {
  RhsWorkspace ws;
  std::vector<double> out(grid.cells());
  spatial_rhs(u, adv, d, src, grid, opt, ws, out);
  return out;
}

std::optional<double> cfl_max_dt(double max_abs_a, double max_abs_b, double d, const GridSpec& grid,
                                 double ssp_factor) {
  if (max_abs_a < 0.0 || max_abs_b < 0.0 || d < 0.0)
    throw std::invalid_argument("cfl_max_dt: speeds and diffusivity must be nonnegative");
  if (!(ssp_factor > 0.0) || ssp_factor > 1.0) throw std::invalid_argument("cfl_max_dt: ssp factor must lie in (0, 1]");
  const double speed = std::max(max_abs_a, max_abs_b);
  std::optional<double> dt;
  if (speed > 0.0) dt = kAdvectionCfl / (speed * (1.0 / grid.dx + 1.0 / grid.dy));
  if (d > 0.0) {
    const double diff = kDiffusionCfl / (d * (1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy)));
    dt = dt ? std::min(*dt, diff) : diff;
  }
  if (dt) *dt *= ssp_factor;
  return dt;
}

}  // namespace angio
