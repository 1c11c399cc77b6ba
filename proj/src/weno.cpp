#include "angio/weno.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace angio::weno {

namespace {

const double kS15 = std::sqrt(15.0);
const double kG = kS15 / 10.0;

struct PointKernel {
  double t = 0.0;
  // p_m(t) = rows[m][0..2] . (three sub-stencil values, left to right)
  double rows[3][3] = {};
  Triple d{};
  bool all_positive = true;
  // split construction, normalised gamma^+ / gamma^- and their sums sigma^+ / sigma^-
  Triple gamma_plus{};
  Triple gamma_minus{};
  double sigma_plus = 1.0;
  double sigma_minus = 0.0;
};

Triple table_weights(EvalPoint p) {
  const double s = kS15;
  const double a1 = (307.0 + 72.0 * s) / 960.0;
  const double a2 = (8377.0 - 1542.0 * s) / 6720.0;
  const double a3 = 173.0 * (-11.0 + 3.0 * s) / 3360.0;
  const double b1 = (307.0 - 72.0 * s) / 960.0;
  const double b2 = (8377.0 + 1542.0 * s) / 6720.0;
  const double b3 = -173.0 * (11.0 + 3.0 * s) / 3360.0;
  const double e1 = (427.0 + 87.0 * s) / 1590.0;
  const double e2 = 368.0 / 795.0;
  const double e3 = (427.0 - 87.0 * s) / 1590.0;
  const double f1 = (29147.0 - 246.0 * s) / 129360.0;
  const double f2 = 35533.0 / 64680.0;
  const double f3 = (29147.0 + 246.0 * s) / 129360.0;
  switch (p) {
    case EvalPoint::lo_minus: return {a1, a2, a3};
    case EvalPoint::lo: return {341.0 / 1200.0, 337.0 / 600.0, 37.0 / 240.0};
    case EvalPoint::lo_plus: return {b1, b2, b3};
    case EvalPoint::hi_minus: return {b3, b2, b1};
    case EvalPoint::hi: return {37.0 / 240.0, 337.0 / 600.0, 341.0 / 1200.0};
    case EvalPoint::hi_plus: return {a3, a2, a1};
    case EvalPoint::node0: return {e1, e2, e3};
    case EvalPoint::node1: return {f1, f2, f3};
    case EvalPoint::node2: return {-2.0 / 15.0, 19.0 / 15.0, -2.0 / 15.0};
    case EvalPoint::node3: return {f3, f2, f1};
    case EvalPoint::node4: return {e3, e2, e1};
  }
  throw std::out_of_range("weno: unknown evaluation point");
}

PointKernel make_kernel(EvalPoint p) {
  PointKernel k;
  const double t = offset(p);
  const double t2 = t * t;
  k.t = t;
  // left quadratic on u_{i-2}, u_{i-1}, u_i
  k.rows[0][0] = -1.0 / 12.0 + 0.5 * t + 0.5 * t2;
  k.rows[0][1] = 2.0 / 12.0 - 2.0 * t - t2;
  k.rows[0][2] = 11.0 / 12.0 + 1.5 * t + 0.5 * t2;
  // centred quadratic on u_{i-1}, u_i, u_{i+1}
  k.rows[1][0] = -1.0 / 12.0 - 0.5 * t + 0.5 * t2;
  k.rows[1][1] = 14.0 / 12.0 - t2;
  k.rows[1][2] = -1.0 / 12.0 + 0.5 * t + 0.5 * t2;
  // right quadratic on u_i, u_{i+1}, u_{i+2}
  k.rows[2][0] = 11.0 / 12.0 - 1.5 * t + 0.5 * t2;
  k.rows[2][1] = 2.0 / 12.0 + 2.0 * t - t2;
  k.rows[2][2] = -1.0 / 12.0 - 0.5 * t + 0.5 * t2;

  k.d = table_weights(p);
  k.all_positive = std::all_of(k.d.begin(), k.d.end(), [](double v) { return v >= 0.0; });
  if (!k.all_positive) {
    Triple gp{};
    Triple gm{};
    double sp = 0.0;
    double sm = 0.0;
    for (int m = 0; m < 3; ++m) {
      gp[m] = 0.5 * (k.d[m] + kTheta * std::abs(k.d[m]));
      gm[m] = gp[m] - k.d[m];
      sp += gp[m];
      sm += gm[m];
    }
    for (int m = 0; m < 3; ++m) {
      k.gamma_plus[m] = gp[m] / sp;
      k.gamma_minus[m] = gm[m] / sm;
    }
    k.sigma_plus = sp;
    k.sigma_minus = sm;
  }
  return k;
}

const std::array<PointKernel, kNumEvalPoints>& kernels() {
  static const std::array<PointKernel, kNumEvalPoints> table = [] {
    std::array<PointKernel, kNumEvalPoints> t{};
    for (int p = 0; p < kNumEvalPoints; ++p) t[p] = make_kernel(static_cast<EvalPoint>(p));
    return t;
  }();
  return table;
}

inline double sq(double v) { return v * v; }

inline SmoothnessIndicators smoothness_strided(const double* u, std::ptrdiff_t s) {
  const double um2 = u[-2 * s], um1 = u[-s], u0 = u[0], up1 = u[s], up2 = u[2 * s];
  SmoothnessIndicators b;
  b.beta0 = 13.0 / 12.0 * sq(um2 - 2.0 * um1 + u0) + 0.25 * sq(um2 - 4.0 * um1 + 3.0 * u0);
  b.beta1 = 13.0 / 12.0 * sq(um1 - 2.0 * u0 + up1) + 0.25 * sq(um1 - up1);
  b.beta2 = 13.0 / 12.0 * sq(u0 - 2.0 * up1 + up2) + 0.25 * sq(3.0 * u0 - 4.0 * up1 + up2);
  return b;
}

}  // namespace

double offset(EvalPoint p) {
  switch (p) {
    case EvalPoint::lo_minus: return -0.5 - kG;
    case EvalPoint::lo: return -0.5;
    case EvalPoint::lo_plus: return -0.5 + kG;
    case EvalPoint::hi_minus: return 0.5 - kG;
    case EvalPoint::hi: return 0.5;
    case EvalPoint::hi_plus: return 0.5 + kG;
    case EvalPoint::node0: return -2.0 * kG;
    case EvalPoint::node1: return -kG;
    case EvalPoint::node2: return 0.0;
    case EvalPoint::node3: return kG;
    case EvalPoint::node4: return 2.0 * kG;
  }
  throw std::out_of_range("weno: unknown evaluation point");
}

Coeffs5 central_poly_coeffs(const Stencil5& s) {
  const double um2 = s[0], um1 = s[1], u0 = s[2], up1 = s[3], up2 = s[4];
  return {
      (2.0 * um2 - 23.0 * um1 + 222.0 * u0 - 23.0 * up1 + 2.0 * up2) / 180.0,
      (um2 - 6.0 * um1 + 6.0 * up1 - up2) / 8.0,
      (-um2 + 10.0 * um1 - 18.0 * u0 + 10.0 * up1 - up2) / 12.0,
      (-um2 + 2.0 * um1 - 2.0 * up1 + up2) / 12.0,
      (um2 - 4.0 * um1 + 6.0 * u0 - 4.0 * up1 + up2) / 24.0,
  };
}

double eval_poly(const Coeffs5& c, double t) {
  return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
}

double eval_poly_derivative(const Coeffs5& c, double t) {
  return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]));
}

Triple substencil_values(const Stencil5& s, double t) {
  const double um2 = s[0], um1 = s[1], u0 = s[2], up1 = s[3], up2 = s[4];
  const double t2 = t * t;
  return {
      (-um2 + 2.0 * um1 + 11.0 * u0) / 12.0 + 0.5 * (um2 - 4.0 * um1 + 3.0 * u0) * t +
          0.5 * (um2 - 2.0 * um1 + u0) * t2,
      (-um1 + 14.0 * u0 - up1) / 12.0 + 0.5 * (up1 - um1) * t + 0.5 * (um1 - 2.0 * u0 + up1) * t2,
      (11.0 * u0 + 2.0 * up1 - up2) / 12.0 + 0.5 * (-3.0 * u0 + 4.0 * up1 - up2) * t +
          0.5 * (u0 - 2.0 * up1 + up2) * t2,
  };
}

Triple linear_weights(EvalPoint p) { return table_weights(p); }

Triple linear_weights(int id) {
  if (id < 0 || id >= kNumEvalPoints) throw std::out_of_range("weno: unknown evaluation point id");
  return table_weights(static_cast<EvalPoint>(id));
}

SmoothnessIndicators smoothness(const Stencil5& s) { return smoothness_strided(s.data() + 2, 1); }

Triple nonlinear_weights(const Triple& d, const SmoothnessIndicators& beta, double eps) {
  const double inv[3] = {1.0 / sq(beta.beta0 + eps), 1.0 / sq(beta.beta1 + eps), 1.0 / sq(beta.beta2 + eps)};
  const bool positive = std::all_of(d.begin(), d.end(), [](double v) { return v >= 0.0; });
  if (positive) {
    const double w0 = d[0] * inv[0], w1 = d[1] * inv[1], w2 = d[2] * inv[2];
    const double sum = w0 + w1 + w2;
    return {w0 / sum, w1 / sum, w2 / sum};
  }
  Triple gp{};
  Triple gm{};
  double sp = 0.0;
  double sm = 0.0;
  for (int m = 0; m < 3; ++m) {
    gp[m] = 0.5 * (d[m] + kTheta * std::abs(d[m]));
    gm[m] = gp[m] - d[m];
    sp += gp[m];
    sm += gm[m];
  }
  Triple wp{};
  Triple wm{};
  double sum_p = 0.0;
  double sum_m = 0.0;
  for (int m = 0; m < 3; ++m) {
    wp[m] = gp[m] / sp * inv[m];
    wm[m] = gm[m] / sm * inv[m];
    sum_p += wp[m];
    sum_m += wm[m];
  }
  Triple omega{};
  for (int m = 0; m < 3; ++m) omega[m] = sp * wp[m] / sum_p - sm * wm[m] / sum_m;
  return omega;
}

double reconstruct_point(const Stencil5& s, EvalPoint p, const Options& opt) {
  const Triple pm = substencil_values(s, offset(p));
  const Triple d = linear_weights(p);
  const Triple w = opt.mode == Mode::linear ? d : nonlinear_weights(d, smoothness(s), opt.eps);
  return w[0] * pm[0] + w[1] * pm[1] + w[2] * pm[2];
}

void reconstruct_row(const double* u, std::ptrdiff_t stride, int count, std::span<const EvalPoint> points,
                     const Options& opt, double* const* out) {
  constexpr int kChunk = 64;
  const auto& table = kernels();
  const bool linear = opt.mode == Mode::linear;
  const double eps = opt.eps;
  alignas(64) double v[5][kChunk];
  alignas(64) double inv[3][kChunk];
  for (int c0 = 0; c0 < count; c0 += kChunk) {
    const int nc = std::min(kChunk, count - c0);
    for (int m = 0; m < 5; ++m) {
      const double* src = u + c0 + (m - 2) * stride;
      for (int c = 0; c < nc; ++c) v[m][c] = src[c];
    }
    if (!linear) {
      for (int c = 0; c < nc; ++c) {
        const double um2 = v[0][c], um1 = v[1][c], u0 = v[2][c], up1 = v[3][c], up2 = v[4][c];
        const double b0 = 13.0 / 12.0 * sq(um2 - 2.0 * um1 + u0) + 0.25 * sq(um2 - 4.0 * um1 + 3.0 * u0);
        const double b1 = 13.0 / 12.0 * sq(um1 - 2.0 * u0 + up1) + 0.25 * sq(um1 - up1);
        const double b2 = 13.0 / 12.0 * sq(u0 - 2.0 * up1 + up2) + 0.25 * sq(3.0 * u0 - 4.0 * up1 + up2);
        inv[0][c] = 1.0 / sq(b0 + eps);
        inv[1][c] = 1.0 / sq(b1 + eps);
        inv[2][c] = 1.0 / sq(b2 + eps);
      }
    }
    for (std::size_t n = 0; n < points.size(); ++n) {
      const PointKernel& k = table[static_cast<int>(points[n])];
      const double r00 = k.rows[0][0], r01 = k.rows[0][1], r02 = k.rows[0][2];
      const double r10 = k.rows[1][0], r11 = k.rows[1][1], r12 = k.rows[1][2];
      const double r20 = k.rows[2][0], r21 = k.rows[2][1], r22 = k.rows[2][2];
      double* __restrict dst = out[n] + c0;
      if (linear) {
        const double d0 = k.d[0], d1 = k.d[1], d2 = k.d[2];
        for (int c = 0; c < nc; ++c) {
          const double p0 = r00 * v[0][c] + r01 * v[1][c] + r02 * v[2][c];
          const double p1 = r10 * v[1][c] + r11 * v[2][c] + r12 * v[3][c];
          const double p2 = r20 * v[2][c] + r21 * v[3][c] + r22 * v[4][c];
          dst[c] = d0 * p0 + d1 * p1 + d2 * p2;
        }
      } else if (k.all_positive) {
        const double d0 = k.d[0], d1 = k.d[1], d2 = k.d[2];
        for (int c = 0; c < nc; ++c) {
          const double p0 = r00 * v[0][c] + r01 * v[1][c] + r02 * v[2][c];
          const double p1 = r10 * v[1][c] + r11 * v[2][c] + r12 * v[3][c];
          const double p2 = r20 * v[2][c] + r21 * v[3][c] + r22 * v[4][c];
          const double w0 = d0 * inv[0][c], w1 = d1 * inv[1][c], w2 = d2 * inv[2][c];
          const double r = 1.0 / (w0 + w1 + w2);
          dst[c] = (w0 * r) * p0 + (w1 * r) * p1 + (w2 * r) * p2;
        }
      } else {
        const double g0 = k.gamma_plus[0], g1 = k.gamma_plus[1], g2 = k.gamma_plus[2];
        const double h0 = k.gamma_minus[0], h1 = k.gamma_minus[1], h2 = k.gamma_minus[2];
        const double sgp = k.sigma_plus, sgm = k.sigma_minus;
        for (int c = 0; c < nc; ++c) {
          const double p0 = r00 * v[0][c] + r01 * v[1][c] + r02 * v[2][c];
          const double p1 = r10 * v[1][c] + r11 * v[2][c] + r12 * v[3][c];
          const double p2 = r20 * v[2][c] + r21 * v[3][c] + r22 * v[4][c];
          const double a0 = g0 * inv[0][c], a1 = g1 * inv[1][c], a2 = g2 * inv[2][c];
          const double m0 = h0 * inv[0][c], m1 = h1 * inv[1][c], m2 = h2 * inv[2][c];
          // one division for both normalisations
          const double sp = a0 + a1 + a2;
          const double sm = m0 + m1 + m2;
          const double r = 1.0 / (sp * sm);
          const double rp = sgp * sm * r;
          const double rm = sgm * sp * r;
          dst[c] = (a0 * rp - m0 * rm) * p0 + (a1 * rp - m1 * rm) * p1 + (a2 * rp - m2 * rm) * p2;
        }
      }
    }
  }
}

void reconstruct_points(const double* u, std::ptrdiff_t stride, std::span<const EvalPoint> points,
                        const Options& opt, double* out) {
  double* outs[kNumEvalPoints];
  const std::size_t n = std::min<std::size_t>(points.size(), kNumEvalPoints);
  for (std::size_t k = 0; k < n; ++k) outs[k] = out + k;
  if (points.size() <= kNumEvalPoints) {
    reconstruct_row(u, stride, 1, points, opt, outs);
    return;
  }
  for (std::size_t k = 0; k < points.size(); k += kNumEvalPoints)
    reconstruct_points(u, stride, points.subspan(k, std::min<std::size_t>(kNumEvalPoints, points.size() - k)), opt,
                       out + k);
}

double positivity_theta(double cell_avg, std::span<const double> points) {
  if (points.empty()) return 1.0;
  if (!(cell_avg > 0.0)) return 0.0;
  const double lo = *std::min_element(points.begin(), points.end());
  if (lo >= 0.0) return 1.0;
  return std::min(1.0, cell_avg / (cell_avg - lo));
}

void positivity_limiter(double cell_avg, std::span<double> points) {
  const double theta = positivity_theta(cell_avg, points);
  if (theta == 1.0) return;
  const double base = std::max(cell_avg, 0.0);
  for (double& v : points) v = std::max(0.0, base + theta * (v - base));
}

}  // namespace angio::weno
