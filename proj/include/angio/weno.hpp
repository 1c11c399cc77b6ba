#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace angio::weno {

/// The eleven evaluation points used by the scheme, as offsets from the cell
/// centre in cell widths: Gauss points of [x_{i-1}, x_i] and [x_i, x_{i+1}]
/// (the "face" points) and the five double-average nodes.
enum class EvalPoint : int {
  lo_minus = 0,  // -1/2 - sqrt(15)/10
  lo,            // -1/2
  lo_plus,       // -1/2 + sqrt(15)/10
  hi_minus,      // +1/2 - sqrt(15)/10
  hi,            // +1/2
  hi_plus,       // +1/2 + sqrt(15)/10
  node0,         // -sqrt(15)/5
  node1,         // -sqrt(15)/10
  node2,         // 0
  node3,         // +sqrt(15)/10
  node4,         // +sqrt(15)/5
};
inline constexpr int kNumEvalPoints = 11;

inline constexpr std::array<EvalPoint, 3> kLoFace = {EvalPoint::lo_minus, EvalPoint::lo, EvalPoint::lo_plus};
inline constexpr std::array<EvalPoint, 3> kHiFace = {EvalPoint::hi_minus, EvalPoint::hi, EvalPoint::hi_plus};
inline constexpr std::array<EvalPoint, 5> kNodes = {EvalPoint::node0, EvalPoint::node1, EvalPoint::node2,
                                                    EvalPoint::node3, EvalPoint::node4};

double offset(EvalPoint p);

/// Double averages u_{i-2} ... u_{i+2} along one direction.
using Stencil5 = std::array<double, 5>;
using Coeffs5 = std::array<double, 5>;
using Triple = std::array<double, 3>;

/// Coefficients of the degree-4 polynomial p(t) = sum c_l t^l, t = (x - x_i)/dx,
/// whose double averages over the five stencil cells equal the data.
Coeffs5 central_poly_coeffs(const Stencil5& s);
double eval_poly(const Coeffs5& c, double t);
/// dp/dt; divide by the cell width for a physical derivative.
double eval_poly_derivative(const Coeffs5& c, double t);

/// Values at t of the three quadratics matching the double averages of the
/// left, centred and right three-cell sub-stencils.
Triple substencil_values(const Stencil5& s, double t);

/// Linear weights d_0, d_1, d_2 with sum_m d_m p_m(t) = p(t) for every stencil.
Triple linear_weights(EvalPoint p);
/// Same, by integer id 0..10; throws std::out_of_range otherwise.
Triple linear_weights(int id);

struct SmoothnessIndicators {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

SmoothnessIndicators smoothness(const Stencil5& s);

inline constexpr double kDefaultEps = 1e-6;
/// Splitting parameter for points with a negative linear weight.
inline constexpr double kTheta = 3.0;

/// Normalised nonlinear weights. Falls back to the split positive/negative
/// construction whenever some d_m < 0; the result always sums to one.
Triple nonlinear_weights(const Triple& d, const SmoothnessIndicators& beta, double eps = kDefaultEps);

enum class Mode { nonlinear, linear };

struct Options {
  Mode mode = Mode::nonlinear;
  double eps = kDefaultEps;
};

/// sum_m omega_m p_m(t) at one canonical point (omega = d in linear mode).
double reconstruct_point(const Stencil5& s, EvalPoint p, const Options& opt = {});

/// Batched form used by the 2D kernels: the stencil is read from
/// u[-2*stride], ..., u[2*stride]; smoothness is computed once and shared by
/// all requested points.
void reconstruct_points(const double* u, std::ptrdiff_t stride, std::span<const EvalPoint> points,
                        const Options& opt, double* out);

/// Row form: `count` stencils centred at u, u + 1, ..., u + count - 1, each
/// read along `stride`. Point n of stencil c goes to out[n][c]. Bitwise equal
/// to calling reconstruct_points once per stencil.
void reconstruct_row(const double* u, std::ptrdiff_t stride, int count, std::span<const EvalPoint> points,
                     const Options& opt, double* const* out);

/// Scaling limiter about a nonnegative cell average: returns avg + theta (u_q - avg)
/// with theta = min(1, avg / (avg - min_q u_q)). Writes in place.
void positivity_limiter(double cell_avg, std::span<double> points);

/// Theta for the limiter above without applying it.
double positivity_theta(double cell_avg, std::span<const double> points);

}  // namespace angio::weno
