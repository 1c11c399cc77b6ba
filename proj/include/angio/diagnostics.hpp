#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "angio/grid.hpp"

namespace angio::diagnostics {

struct MinMass {
  double min = 0.0;
  double mass = 0.0;
};

/// Smallest cell average and sum of u dx dy over the interior.
MinMass min_and_mass(const Field2D& u, const GridSpec& grid);
/// Same on a flat interior block (x fastest).
MinMass min_and_mass(std::span<const double> u, const GridSpec& grid);

double max_value(std::span<const double> u);

/// P_i = sum_j u_ij dy, one entry per x column.
std::vector<double> marginal_profile(const Field2D& rho, const GridSpec& grid);
std::vector<double> marginal_profile(std::span<const double> rho, const GridSpec& grid);

/// amplitude sech^2(width (x - X)); throws std::invalid_argument for width <= 0.
double soliton_profile(double x, double amplitude, double width, double X);

struct SolitonFit {
  double amplitude = 0.0;
  double width_param = 0.0;
  double X = 0.0;
  double r_squared = 0.0;
  int iterations = 0;
  std::optional<double> speed_c;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  int max_iterations = 200;
  /// Stop once the relative parameter update falls below this.
  double step_tol = 1e-13;
};

/// Levenberg-Marquardt fit of a sech^2 pulse, started from the peak sample
/// and the half-maximum width. Throws FitError when the data has no strict
/// interior maximum or the iteration does not settle.
SolitonFit fit_soliton(std::span<const double> x, std::span<const double> y, const FitOptions& opt = {});

struct SpeedEstimate {
  double c = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the straight-line fit.
  double residual = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of X against t. Needs at least three samples with
/// distinct times.
SpeedEstimate front_speed(std::span<const std::pair<double, double>> t_and_X);

/// Least-squares slope of log(error) against log(h). Needs two or more pairs,
/// h strictly decreasing and every error positive.
double convergence_order(std::span<const double> h, std::span<const double> errors);

/// Discrete L1 and max norms of a - b over cells of area cell_area.
double l1_distance(std::span<const double> a, std::span<const double> b, double cell_area);
double linf_distance(std::span<const double> a, std::span<const double> b);

}  // namespace angio::diagnostics
