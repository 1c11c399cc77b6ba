#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace angio {

/// Ghost cells stored on every side of a field. The WENO5 stencil of the
/// exterior neighbour of a boundary face reaches three cells out.
inline constexpr int kGhost = 3;

/// Raised when a kernel meets a NaN/Inf. Carries the offending cell.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int i, int j)
      : std::runtime_error(what), i_(i), j_(j) {}
  int i() const { return i_; }
  int j() const { return j_; }

 private:
  int i_;
  int j_;
};

/// Uniform rectangular mesh on [0, X] x [Y0, Y1].
struct GridSpec {
  double X = 1.0;
  double Y0 = 0.0;
  double Y1 = 1.0;
  int Nx = 0;
  int Ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  double x_center(int i) const { return (i + 0.5) * dx; }
  double y_center(int j) const { return Y0 + (j + 0.5) * dy; }
  /// Left edge of cell i (x_{i-1/2}).
  double x_face(int i) const { return i * dx; }
  double y_face(int j) const { return Y0 + j * dy; }
  std::size_t cells() const { return static_cast<std::size_t>(Nx) * static_cast<std::size_t>(Ny); }
  /// Flat interior index, x fastest.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(Nx) + static_cast<std::size_t>(i);
  }
};

GridSpec build_grid(double X, double Y0, double Y1, int Nx, int Ny);

/// Gauss-Legendre rule on [-1/2, 1/2] and the 5-point rule it induces for
/// double averages (sum of two independent Gauss samples). Offsets are in
/// units of cell width.
struct QuadratureTables {
  std::array<double, 3> gl3_nodes{};
  std::array<double, 3> gl3_weights{};
  std::array<double, 5> t5_nodes{};
  std::array<double, 5> t5_weights{};
};

QuadratureTables make_quadrature();

/// Process-wide immutable copy of make_quadrature().
const QuadratureTables& quadrature();

/// Cell-centred scalar with kGhost layers on every side, x fastest in memory.
class Field2D {
 public:
  Field2D() = default;
  Field2D(int nx, int ny, double fill = 0.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  /// Distance in memory between (i, j) and (i, j + 1).
  std::ptrdiff_t stride() const { return stride_; }

  double& operator()(int i, int j) { return data_[offset(i, j)]; }
  double operator()(int i, int j) const { return data_[offset(i, j)]; }
  const double* ptr(int i, int j) const { return data_.data() + offset(i, j); }
  double* ptr(int i, int j) { return data_.data() + offset(i, j); }

  void fill(double v);
  void set_interior(std::span<const double> values);
  void get_interior(std::span<double> values) const;
  std::vector<double> interior() const;

  bool same_shape(const Field2D& other) const { return nx_ == other.nx_ && ny_ == other.ny_; }

  /// Periodic wrap of all ghost cells (corners included).
  void fill_periodic();
  /// Every ghost cell set to v.
  void fill_ghosts_constant(double v);
  /// Even reflection across all four boundaries.
  void fill_ghosts_mirror();

 private:
  std::size_t offset(int i, int j) const {
    return static_cast<std::size_t>((j + kGhost) * stride_ + (i + kGhost));
  }

  int nx_ = 0;
  int ny_ = 0;
  std::ptrdiff_t stride_ = 0;
  std::vector<double> data_;
};

using AveragedField = Field2D;

using ScalarFunction = std::function<double(double x, double y)>;

/// Double cell average of f over cell (i, j) by the 5x5 tensor rule.
/// Exact for polynomials of degree <= 5 in each variable.
double double_average(const ScalarFunction& f, int i, int j, const GridSpec& grid,
                      const QuadratureTables& q = quadrature());

/// Interior double averages of f on the whole grid; ghosts are left at zero.
Field2D average_field(const ScalarFunction& f, const GridSpec& grid,
                      const QuadratureTables& q = quadrature());

}  // namespace angio
