#include "angio/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace angio::diagnostics {

MinMass min_and_mass(std::span<const double> u, const GridSpec& grid) {
  if (u.size() != grid.cells()) throw std::invalid_argument("min_and_mass: size does not match the grid");
  MinMass r;
  r.min = u.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (double v : u) {
    r.min = std::min(r.min, v);
    s += v;
  }
  r.mass = s * grid.dx * grid.dy;
  return r;
}

MinMass min_and_mass(const Field2D& u, const GridSpec& grid) { return min_and_mass(u.interior(), grid); }

double max_value(std::span<const double> u) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : u) m = std::max(m, v);
  return m;
}

std::vector<double> marginal_profile(std::span<const double> rho, const GridSpec& grid) {
  if (rho.size() != grid.cells()) throw std::invalid_argument("marginal_profile: size does not match the grid");
  std::vector<double> p(static_cast<std::size_t>(grid.Nx), 0.0);
  for (int j = 0; j < grid.Ny; ++j)
    for (int i = 0; i < grid.Nx; ++i) p[static_cast<std::size_t>(i)] += rho[grid.index(i, j)];
  for (double& v : p) v *= grid.dy;
  return p;
}

std::vector<double> marginal_profile(const Field2D& rho, const GridSpec& grid) {
  return marginal_profile(rho.interior(), grid);
}

double soliton_profile(double x, double amplitude, double width, double X) {
  if (!(width > 0.0)) throw std::invalid_argument("soliton_profile: width_param must be positive");
  const double s = 1.0 / std::cosh(width * (x - X));
  return amplitude * s * s;
}

namespace {

using Vec3 = Eigen::Vector3d;

double cost(std::span<const double> x, std::span<const double> y, const Vec3& p) {
  double c = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = soliton_profile(x[k], p[0], p[1], p[2]) - y[k];
    c += r * r;
  }
  return c;
}

// distance from the peak to where the samples cross half the peak value,
// linearly interpolated; nullopt when that side never drops below half
std::optional<double> half_width(std::span<const double> x, std::span<const double> y, std::size_t k, int dir) {
  const double half = 0.5 * y[k];
  for (std::ptrdiff_t m = static_cast<std::ptrdiff_t>(k);; m += dir) {
    const std::ptrdiff_t n = m + dir;
    if (n < 0 || n >= static_cast<std::ptrdiff_t>(y.size())) return std::nullopt;
    if (y[n] <= half) {
      const double f = (y[m] - half) / (y[m] - y[n]);
      return std::abs(x[m] + f * (x[n] - x[m]) - x[k]);
    }
  }
}

}  // namespace

SolitonFit fit_soliton(std::span<const double> x, std::span<const double> y, const FitOptions& opt) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_soliton: x and y differ in length");
  if (x.size() < 4) throw FitError("fit_soliton: need at least four samples");
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) throw FitError("fit_soliton: non-finite sample");

  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  if (peak == 0 || peak + 1 == y.size() || !(y[peak] > y.front()) || !(y[peak] > y.back()) || !(y[peak] > 0.0))
    throw FitError("fit_soliton: profile has no strict interior maximum");

  const auto hl = half_width(x, y, peak, -1);
  const auto hr = half_width(x, y, peak, +1);
  double hw = 0.0;
  if (hl && hr) hw = 0.5 * (*hl + *hr);
  else if (hl) hw = *hl;
  else if (hr) hw = *hr;
  else hw = 0.25 * std::abs(x.back() - x.front());
  if (!(hw > 0.0)) throw FitError("fit_soliton: degenerate half width");

  // sech^2(z) = 1/2 at z = acosh(sqrt 2)
  Vec3 p(y[peak], std::acosh(std::sqrt(2.0)) / hw, x[peak]);
  double c = cost(x, y, p);
  double lambda = 1e-3;

  SolitonFit fit;
  bool converged = false;
  for (int it = 1; it <= opt.max_iterations && !converged; ++it) {
    fit.iterations = it;
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Vec3 jtr = Vec3::Zero();
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double z = p[1] * (x[k] - p[2]);
      const double s = 1.0 / std::cosh(z);
      const double s2 = s * s;
      const double th = std::tanh(z);
      const double r = p[0] * s2 - y[k];
      const Vec3 g(s2, -2.0 * p[0] * s2 * th * (x[k] - p[2]), 2.0 * p[0] * s2 * th * p[1]);
      jtj += g * g.transpose();
      jtr += g * r;
    }
    if (jtr.lpNorm<Eigen::Infinity>() == 0.0) break;

    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Vec3 step = a.ldlt().solve(-jtr);
      const Vec3 trial = p + step;
      const double ct = trial.allFinite() && trial[1] > 0.0 ? cost(x, y, trial) : std::numeric_limits<double>::infinity();
      if (ct <= c) {
        const double rel = step.cwiseAbs().cwiseQuotient(p.cwiseAbs().cwiseMax(1e-300)).maxCoeff();
        p = trial;
        converged = rel < opt.step_tol || c - ct <= 1e-15 * c;
        c = ct;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          // no descent direction left: the current point is a minimum to
          // working precision
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) throw FitError("fit_soliton: no convergence within the iteration limit");
  if (!(p[0] >= 0.0) || !(p[1] > 0.0) || !p.allFinite()) throw FitError("fit_soliton: fit diverged");

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double tot = 0.0;
  for (double v : y) tot += (v - mean) * (v - mean);
  fit.amplitude = p[0];
  fit.width_param = p[1];
  fit.X = p[2];
  fit.r_squared = tot > 0.0 ? std::clamp(1.0 - c / tot, 0.0, 1.0) : 0.0;
  return fit;
}

SpeedEstimate front_speed(std::span<const std::pair<double, double>> t_and_X) {
  const std::size_t n = t_and_X.size();
  if (n < 3) throw std::invalid_argument("front_speed: need at least three snapshots");
  double tm = 0.0;
  double xm = 0.0;
  for (const auto& [t, X] : t_and_X) {
    tm += t;
    xm += X;
  }
  tm /= static_cast<double>(n);
  xm /= static_cast<double>(n);
  double stt = 0.0;
  double stx = 0.0;
  for (const auto& [t, X] : t_and_X) {
    stt += (t - tm) * (t - tm);
    stx += (t - tm) * (X - xm);
  }
  if (!(stt > 0.0)) throw std::invalid_argument("front_speed: snapshot times are not distinct");
  SpeedEstimate e;
  e.points = n;
  e.c = stx / stt;
  e.intercept = xm - e.c * tm;
  double ss = 0.0;
  for (const auto& [t, X] : t_and_X) {
    const double r = X - (e.intercept + e.c * t);
    ss += r * r;
  }
  e.residual = std::sqrt(ss / static_cast<double>(n));
  return e;
}

double convergence_order(std::span<const double> h, std::span<const double> errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("convergence_order: h and errors differ in length");
  if (h.size() < 2) throw std::invalid_argument("convergence_order: need at least two resolutions");
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(errors[k] > 0.0) || !std::isfinite(errors[k]))
      throw std::invalid_argument("convergence_order: errors must be positive");
    if (!(h[k] > 0.0)) throw std::invalid_argument("convergence_order: h must be positive");
    if (k > 0 && !(h[k] < h[k - 1])) throw std::invalid_argument("convergence_order: h must be strictly decreasing");
  }
  const auto n = static_cast<double>(h.size());
  double lm = 0.0;
  double em = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    lm += std::log(h[k]);
    em += std::log(errors[k]);
  }
  lm /= n;
  em /= n;
  double sll = 0.0;
  double sle = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double a = std::log(h[k]) - lm;
    sll += a * a;
    sle += a * (std::log(errors[k]) - em);
  }
  return sle / sll;
}

double l1_distance(std::span<const double> a, std::span<const double> b, double cell_area) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s * cell_area;
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_distance: size mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace angio::diagnostics
