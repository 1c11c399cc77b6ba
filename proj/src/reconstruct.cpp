#include "angio/reconstruct.hpp"

#include <algorithm>
#include <vector>

namespace angio::weno {

namespace {

// Six face Gauss points followed by the five interior nodes.
constexpr std::array<EvalPoint, 11> kFaceAndNodes = {
    EvalPoint::lo_minus, EvalPoint::lo,    EvalPoint::lo_plus, EvalPoint::hi_minus,
    EvalPoint::hi,       EvalPoint::hi_plus, EvalPoint::node0, EvalPoint::node1,
    EvalPoint::node2,    EvalPoint::node3, EvalPoint::node4};

}  // namespace

void Reconstruction::resize(int nx, int ny) {
  if (nx == nx_ && ny == ny_ && !cells_.empty()) return;
  nx_ = nx;
  ny_ = ny;
  cells_.assign(static_cast<std::size_t>((nx + 2) * (ny + 2)), CellPoints{});
  for (auto& f : x_first_) f = Field2D(nx, ny);
  for (auto& f : y_first_) f = Field2D(nx, ny);
}

void reconstruct_lines(const Field2D& u, unsigned targets, const Options& opt, Reconstruction& out) {
  const int nx = u.nx();
  const int ny = u.ny();
  out.resize(nx, ny);
  out.targets_ = targets;

  const bool x_faces = (targets & kXFaces) != 0;
  const bool y_faces = (targets & kYFaces) != 0;
  const bool x_centers = (targets & kXCenters) != 0;
  const bool y_centers = (targets & kYCenters) != 0;
  const bool tensor = (targets & kTensor) != 0;

  const bool need_x_first = y_faces || tensor || x_centers;
  const bool need_y_first = x_faces || y_centers;
  const std::ptrdiff_t ys = u.stride();
  const std::span<const EvalPoint> nodes(kNodes);

  // Pass 1: collapse one direction onto the five transverse nodes.
  if (need_x_first) {
    auto& xf = out.x_first_;
    const bool all_nodes = y_faces || tensor;
    const std::span<const EvalPoint> xn = all_nodes ? nodes : nodes.subspan(2, 1);
    const int a0 = all_nodes ? 0 : 2;
#pragma omp parallel for schedule(static)
    for (int j = -3; j <= ny + 2; ++j) {
      double* dst[5];
      for (std::size_t a = 0; a < xn.size(); ++a) dst[a] = xf[a0 + a].ptr(-1, j);
      reconstruct_row(u.ptr(-1, j), 1, nx + 2, xn, opt, dst);
    }
  }
  if (need_y_first) {
    auto& yf = out.y_first_;
    // y-centre lines alone only need the middle node
    const std::span<const EvalPoint> yn = x_faces ? nodes : nodes.subspan(2, 1);
    const int a0 = x_faces ? 0 : 2;
#pragma omp parallel for schedule(static)
    for (int j = -1; j <= ny; ++j) {
      double* dst[5];
      for (std::size_t a = 0; a < yn.size(); ++a) dst[a] = yf[a0 + a].ptr(-3, j);
      reconstruct_row(u.ptr(-3, j), ys, nx + 6, yn, opt, dst);
    }
  }

  // Pass 2: point values along the other direction, one row at a time into
  // scratch rows, then scattered into the per-cell records.
  const auto& xf = out.x_first_;
  const auto& yf = out.y_first_;
  const std::span<const EvalPoint> faces(kFaceAndNodes.data(), 6);
  const std::span<const EvalPoint> faces_nodes(kFaceAndNodes);
  const std::ptrdiff_t fs = xf[0].stride();
  const int w = nx + 2;
#pragma omp parallel
  {
    std::vector<double> scratch(static_cast<std::size_t>(11 * w));
    double* rows[11];
    for (int n = 0; n < 11; ++n) rows[n] = scratch.data() + n * w;
    const auto scatter = [&](int j, int first, int n, auto&& field) {
      for (int i = -1; i <= nx; ++i) {
        double* d = field(out.at(i, j));
        for (int k = 0; k < n; ++k) d[k] = rows[first + k][i + 1];
      }
    };
#pragma omp for schedule(static)
    for (int j = -1; j <= ny; ++j) {
      if (x_faces) {
        for (int a = 0; a < 5; ++a) {
          const bool with_nodes = (a == 2) && y_centers;
          reconstruct_row(yf[a].ptr(-1, j), 1, w, with_nodes ? faces_nodes : faces, opt, rows);
          scatter(j, 0, 3, [a](CellPoints& c) { return c.x_lo[a]; });
          scatter(j, 3, 3, [a](CellPoints& c) { return c.x_hi[a]; });
          if (with_nodes) scatter(j, 6, 5, [](CellPoints& c) { return c.y_center; });
        }
      } else if (y_centers) {
        reconstruct_row(yf[2].ptr(-1, j), 1, w, nodes, opt, rows);
        scatter(j, 0, 5, [](CellPoints& c) { return c.y_center; });
      }

      if (y_faces || tensor) {
        for (int a = 0; a < 5; ++a) {
          const bool with_nodes = tensor || ((a == 2) && x_centers);
          if (y_faces) {
            reconstruct_row(xf[a].ptr(-1, j), fs, w, with_nodes ? faces_nodes : faces, opt, rows);
            scatter(j, 0, 3, [a](CellPoints& c) { return c.y_lo[a]; });
            scatter(j, 3, 3, [a](CellPoints& c) { return c.y_hi[a]; });
            if (with_nodes) scatter(j, 6, 5, [a](CellPoints& c) { return c.tensor[a]; });
          } else {
            reconstruct_row(xf[a].ptr(-1, j), fs, w, nodes, opt, rows);
            scatter(j, 0, 5, [a](CellPoints& c) { return c.tensor[a]; });
          }
        }
      } else if (x_centers) {
        reconstruct_row(xf[2].ptr(-1, j), fs, w, nodes, opt, rows);
        scatter(j, 0, 5, [](CellPoints& c) { return c.tensor[2]; });
      }
    }
  }
}

Reconstruction reconstruct_lines(const Field2D& u, unsigned targets, const Options& opt) {
  Reconstruction r;
  reconstruct_lines(u, targets, opt, r);
  return r;
}

}  // namespace angio::weno
