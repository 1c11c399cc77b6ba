#pragma once

#include <array>
#include <vector>

#include "angio/grid.hpp"
#include "angio/weno.hpp"

namespace angio::weno {

/// Which point families reconstruct_lines should produce.
enum Target : unsigned {
  kXFaces = 1u,    // u(x_{i+-1/2}^beta, y~_j^alpha)
  kYFaces = 2u,    // u(x~_i^alpha, y_{j+-1/2}^beta)
  kXCenters = 4u,  // u(x_i, y~_j^alpha)
  kYCenters = 8u,  // u(x~_i^alpha, y_j)
  kTensor = 16u,   // u(x~_i^alpha, y~_j^beta)
  kAllTargets = 31u,
};

/// Point values owned by one cell, all reconstructed from that cell's stencils.
/// Face arrays are [transverse node alpha][Gauss point beta]. "lo" faces give
/// the u^+ state at x_{i-1/2} (resp. y_{j-1/2}); "hi" faces give u^-.
struct CellPoints {
  double x_lo[5][3];
  double x_hi[5][3];
  double y_lo[5][3];
  double y_hi[5][3];
  /// [alpha in x][beta in y], x direction first. Row 2 holds the x-centre
  /// lines u(x_i, y~^beta).
  double tensor[5][5];
  /// u(x~^alpha, y_j), y direction first.
  double y_center[5];
};

/// Reconstructed values for cells [-1, nx] x [-1, ny]: the interior plus one
/// ring of ghost cells, which supply the exterior states at boundary faces.
class Reconstruction {
 public:
  Reconstruction() = default;
  Reconstruction(int nx, int ny) { resize(nx, ny); }

  void resize(int nx, int ny);
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  unsigned targets() const { return targets_; }

  CellPoints& at(int i, int j) { return cells_[index(i, j)]; }
  const CellPoints& at(int i, int j) const { return cells_[index(i, j)]; }

 private:
  friend void reconstruct_lines(const Field2D&, unsigned, const Options&, Reconstruction&);

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>((j + 1) * (nx_ + 2) + (i + 1));
  }

  int nx_ = 0;
  int ny_ = 0;
  unsigned targets_ = 0;
  std::vector<CellPoints> cells_;
  // First-pass line averages: x_first[a](i, j) is the y-direction double
  // average at x = x~_i^a; y_first[a](i, j) the x-direction one at y = y~_j^a.
  std::array<Field2D, 5> x_first_;
  std::array<Field2D, 5> y_first_;
};

/// Dimension-by-dimension WENO reconstruction of the requested point families.
/// Ghost layers of u must be populated. Rows are processed in parallel.
void reconstruct_lines(const Field2D& u, unsigned targets, const Options& opt, Reconstruction& out);
Reconstruction reconstruct_lines(const Field2D& u, unsigned targets, const Options& opt = {});

}  // namespace angio::weno
