// Serial reference for the parallel right-hand side. Every point value is
// rebuilt from the scalar reconstruct_point API, one cell at a time.

#include <cmath>
#include <vector>

#include "angio/flux.hpp"

namespace angio::reference {

namespace {

using weno::EvalPoint;
using weno::Stencil5;

double y_first(const Field2D& u, int k, int j, EvalPoint p, const weno::Options& opt) {
  const Stencil5 s = {u(k, j - 2), u(k, j - 1), u(k, j), u(k, j + 1), u(k, j + 2)};
  return weno::reconstruct_point(s, p, opt);
}

double x_first(const Field2D& u, int i, int k, EvalPoint p, const weno::Options& opt) {
  const Stencil5 s = {u(i - 2, k), u(i - 1, k), u(i, k), u(i + 1, k), u(i + 2, k)};
  return weno::reconstruct_point(s, p, opt);
}

}  // namespace

weno::CellPoints cell_points(const Field2D& u, int i, int j, unsigned targets, const weno::Options& opt) {
  weno::CellPoints c{};
  if (targets & weno::kXFaces) {
    for (int a = 0; a < 5; ++a) {
      Stencil5 line;
      for (int m = 0; m < 5; ++m) line[m] = y_first(u, i - 2 + m, j, weno::kNodes[a], opt);
      for (int b = 0; b < 3; ++b) {
        c.x_lo[a][b] = weno::reconstruct_point(line, weno::kLoFace[b], opt);
        c.x_hi[a][b] = weno::reconstruct_point(line, weno::kHiFace[b], opt);
      }
    }
  }
  if (targets & weno::kYCenters) {
    Stencil5 line;
    for (int m = 0; m < 5; ++m) line[m] = y_first(u, i - 2 + m, j, EvalPoint::node2, opt);
    for (int a = 0; a < 5; ++a) c.y_center[a] = weno::reconstruct_point(line, weno::kNodes[a], opt);
  }
  if (targets & weno::kYFaces) {
    for (int a = 0; a < 5; ++a) {
      Stencil5 line;
      for (int m = 0; m < 5; ++m) line[m] = x_first(u, i, j - 2 + m, weno::kNodes[a], opt);
      for (int b = 0; b < 3; ++b) {
        c.y_lo[a][b] = weno::reconstruct_point(line, weno::kLoFace[b], opt);
        c.y_hi[a][b] = weno::reconstruct_point(line, weno::kHiFace[b], opt);
      }
    }
  }
  const bool tensor = (targets & weno::kTensor) != 0;
  if (tensor || (targets & weno::kXCenters)) {
    for (int a = 0; a < 5; ++a) {
      if (!tensor && a != 2) continue;
      Stencil5 line;
      for (int m = 0; m < 5; ++m) line[m] = x_first(u, i, j - 2 + m, weno::kNodes[a], opt);
      for (int b = 0; b < 5; ++b) c.tensor[a][b] = weno::reconstruct_point(line, weno::kNodes[b], opt);
    }
  }
  return c;
}

std::vector<double> spatial_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                                const GridSpec& grid, const RhsOptions& opt) {
  const int nx = grid.Nx;
  const int ny = grid.Ny;
  const QuadratureTables& q = quadrature();
  const unsigned targets = rhs_targets(adv, d, src);

  const auto ring = [&](int i, int j) { return static_cast<std::size_t>((j + 1) * (nx + 2) + (i + 1)); };
  std::vector<weno::CellPoints> cells(static_cast<std::size_t>((nx + 2) * (ny + 2)));
  for (int j = -1; j <= ny; ++j) {
    for (int i = -1; i <= nx; ++i) {
      weno::CellPoints c = cell_points(u, i, j, targets, opt.weno);
      if (opt.limiter && targets != 0) {
        const bool interior = i >= 0 && i < nx && j >= 0 && j < ny;
        if (interior && opt.euler_dt > 0.0) {
          const OutflowWeights w = outflow_weights(i, j, adv, d, src, grid, opt, q);
          limit_cell(c, targets, u(i, j), &w, opt.euler_dt);
        } else {
          limit_cell(c, targets, u(i, j), nullptr, 0.0);
        }
      }
      cells[ring(i, j)] = c;
    }
  }

  const double rx = opt.dt > 0.0 ? grid.dx / opt.dt : 0.0;
  const double ry = opt.dt > 0.0 ? grid.dy / opt.dt : 0.0;
  const auto face_sum = [&](const double (*um)[3], const double (*up)[3], const double* a, double ratio) {
    double s = 0.0;
    for (int al = 0; al < 5; ++al)
      for (int be = 0; be < 3; ++be)
        s += q.t5_weights[al] * q.gl3_weights[be] *
             numerical_flux(opt.flux, a[al * 3 + be], um[al][be], up[al][be], ratio);
    return s;
  };

  std::vector<double> out(grid.cells(), 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const weno::CellPoints& c = cells[ring(i, j)];
      double r = 0.0;
      if (!adv.zero) {
        const double fr = face_sum(c.x_hi, cells[ring(i + 1, j)].x_lo, adv.a_face(i + 1, j), rx);
        const double fl = face_sum(cells[ring(i - 1, j)].x_hi, c.x_lo, adv.a_face(i, j), rx);
        const double gu = face_sum(c.y_hi, cells[ring(i, j + 1)].y_lo, adv.b_face(i, j + 1), ry);
        const double gd = face_sum(cells[ring(i, j - 1)].y_hi, c.y_lo, adv.b_face(i, j), ry);
        r -= (fr - fl) / grid.dx + (gu - gd) / grid.dy;
      }
      if (d != 0.0) {
        const double* left = cells[ring(i - 1, j)].tensor[2];
        const double* right = cells[ring(i + 1, j)].tensor[2];
        const double* down = cells[ring(i, j - 1)].y_center;
        const double* up = cells[ring(i, j + 1)].y_center;
        double sx = 0.0;
        double sy = 0.0;
        for (int al = 0; al < 5; ++al) {
          sx += q.t5_weights[al] * (left[al] - 2.0 * c.tensor[2][al] + right[al]);
          sy += q.t5_weights[al] * (down[al] - 2.0 * c.y_center[al] + up[al]);
        }
        r += d * sx / (grid.dx * grid.dx) + d * sy / (grid.dy * grid.dy);
      }
      const std::size_t cell = grid.index(i, j);
      if (src.mode == SourceMode::nodal) {
        for (int al = 0; al < 5; ++al)
          for (int be = 0; be < 5; ++be) {
            double h = 0.0;
            if (!src.rate.empty()) h += src.rate[25 * cell + al * 5 + be] * c.tensor[al][be];
            if (!src.forcing.empty()) h += src.forcing[25 * cell + al * 5 + be];
            r += q.t5_weights[al] * q.t5_weights[be] * h;
          }
      } else {
        if (!src.rate.empty()) r += src.rate[cell] * u(i, j);
        if (!src.forcing.empty()) r += src.forcing[cell];
      }
      if (!std::isfinite(r)) throw NumericalError("reference::spatial_rhs: non-finite value", i, j);
      out[cell] = r;
    }
  }
  return out;
}

}  // namespace angio::reference
