#include "angio/grid.hpp"

#include <algorithm>
#include <cmath>

namespace angio {

GridSpec build_grid(double X, double Y0, double Y1, int Nx, int Ny) {
  if (!(X > 0.0) || !std::isfinite(X)) throw std::invalid_argument("grid: X must be positive");
  if (!(Y1 > Y0) || !std::isfinite(Y0) || !std::isfinite(Y1))
    throw std::invalid_argument("grid: Y1 must exceed Y0");
  if (Nx < 5 || Ny < 5) throw std::invalid_argument("grid: Nx and Ny must be at least 5");
  GridSpec g;
  g.X = X;
  g.Y0 = Y0;
  g.Y1 = Y1;
  g.Nx = Nx;
  g.Ny = Ny;
  g.dx = X / Nx;
  g.dy = (Y1 - Y0) / Ny;
  return g;
}

QuadratureTables make_quadrature() {
  const double r = std::sqrt(15.0) / 10.0;
  const double w1 = 5.0 / 18.0;
  const double w2 = 4.0 / 9.0;
  const double w3 = 5.0 / 18.0;
  QuadratureTables q;
  q.gl3_nodes = {-r, 0.0, r};
  q.gl3_weights = {w1, w2, w3};
  q.t5_nodes = {-2.0 * r, -r, 0.0, r, 2.0 * r};
  q.t5_weights = {w1 * w1, 2.0 * w1 * w2, 2.0 * w1 * w3 + w2 * w2, 2.0 * w3 * w2, w3 * w3};
  return q;
}

const QuadratureTables& quadrature() {
  static const QuadratureTables q = make_quadrature();
  return q;
}

Field2D::Field2D(int nx, int ny, double fill)
    : nx_(nx), ny_(ny), stride_(nx + 2 * kGhost) {
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("Field2D: non-positive extent");
  data_.assign(static_cast<std::size_t>((nx + 2 * kGhost) * (ny + 2 * kGhost)), fill);
}

void Field2D::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Field2D::set_interior(std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_))
    throw std::invalid_argument("Field2D::set_interior: size mismatch");
  for (int j = 0; j < ny_; ++j)
    std::copy_n(values.data() + static_cast<std::size_t>(j) * nx_, nx_, ptr(0, j));
}

void Field2D::get_interior(std::span<double> values) const {
  if (values.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_))
    throw std::invalid_argument("Field2D::get_interior: size mismatch");
  for (int j = 0; j < ny_; ++j)
    std::copy_n(ptr(0, j), nx_, values.data() + static_cast<std::size_t>(j) * nx_);
}

std::vector<double> Field2D::interior() const {
  std::vector<double> out(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  get_interior(out);
  return out;
}

void Field2D::fill_periodic() {
  auto wrap = [](int k, int n) { return ((k % n) + n) % n; };
  for (int j = -kGhost; j < ny_ + kGhost; ++j) {
    for (int i = -kGhost; i < nx_ + kGhost; ++i) {
      if (i >= 0 && i < nx_ && j >= 0 && j < ny_) continue;
      (*this)(i, j) = (*this)(wrap(i, nx_), wrap(j, ny_));
    }
  }
}

void Field2D::fill_ghosts_constant(double v) {
  for (int j = -kGhost; j < ny_ + kGhost; ++j) {
    for (int i = -kGhost; i < nx_ + kGhost; ++i) {
      if (i >= 0 && i < nx_ && j >= 0 && j < ny_) continue;
      (*this)(i, j) = v;
    }
  }
}

void Field2D::fill_ghosts_mirror() {
  auto reflect = [](int k, int n) {
    if (k < 0) return -k - 1;
    if (k >= n) return 2 * n - k - 1;
    return k;
  };
  for (int j = -kGhost; j < ny_ + kGhost; ++j) {
    for (int i = -kGhost; i < nx_ + kGhost; ++i) {
      if (i >= 0 && i < nx_ && j >= 0 && j < ny_) continue;
      (*this)(i, j) = (*this)(reflect(i, nx_), reflect(j, ny_));
    }
  }
}

double double_average(const ScalarFunction& f, int i, int j, const GridSpec& grid,
                      const QuadratureTables& q) {
  const double xc = grid.x_center(i);
  const double yc = grid.y_center(j);
  double sum = 0.0;
  for (int a = 0; a < 5; ++a) {
    const double x = xc + q.t5_nodes[a] * grid.dx;
    double row = 0.0;
    for (int b = 0; b < 5; ++b) {
      const double v = f(x, yc + q.t5_nodes[b] * grid.dy);
      if (!std::isfinite(v))
        throw NumericalError("double_average: non-finite function value", i, j);
      row += q.t5_weights[b] * v;
    }
    sum += q.t5_weights[a] * row;
  }
  return sum;
}

Field2D average_field(const ScalarFunction& f, const GridSpec& grid, const QuadratureTables& q) {
  Field2D out(grid.Nx, grid.Ny);
  for (int j = 0; j < grid.Ny; ++j)
    for (int i = 0; i < grid.Nx; ++i) out(i, j) = double_average(f, i, j, grid, q);
  return out;
}

}  // namespace angio
