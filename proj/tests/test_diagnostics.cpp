#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "angio/diagnostics.hpp"
#include "angio/flux.hpp"
#include "angio/ssp.hpp"
#include "doctest.h"

using namespace angio;
using namespace angio::diagnostics;

TEST_CASE("min and mass") {
  const GridSpec g = build_grid(1.0, -1.5, 1.5, 10, 30);
  Field2D one(10, 30, 1.0);
  auto mm = min_and_mass(one, g);
  CHECK(mm.min == 1.0);
  CHECK(mm.mass == doctest::Approx(3.0));
  Field2D zero(10, 30, 0.0);
  mm = min_and_mass(zero, g);
  CHECK(mm.min == 0.0);
  CHECK(mm.mass == 0.0);
  zero(4, 7) = -1e-3;
  CHECK(min_and_mass(zero, g).min == -1e-3);
}

TEST_CASE("marginal profile") {
  const GridSpec g = build_grid(1.0, -1.5, 1.5, 10, 30);
  for (double v : marginal_profile(Field2D(10, 30, 1.0), g)) CHECK(v == doctest::Approx(3.0).epsilon(1e-14));
  // separable f(x) g(y): P_i = f_i * sum_j g_j dy, which is f_i * integral of g to quadrature accuracy
  Field2D s(10, 30);
  for (int j = 0; j < 30; ++j)
    for (int i = 0; i < 10; ++i) s(i, j) = (1.0 + i) * std::exp(-g.y_center(j) * g.y_center(j));
  const auto p = marginal_profile(s, g);
  const double gauss = std::sqrt(std::numbers::pi) * std::erf(1.5);
  for (int i = 0; i < 10; ++i) CHECK(p[i] == doctest::Approx((1.0 + i) * gauss).epsilon(1e-3));
  // linearity
  Field2D sum(10, 30);
  for (int j = 0; j < 30; ++j)
    for (int i = 0; i < 10; ++i) sum(i, j) = 2.0 * s(i, j) + 1.0;
  const auto ps = marginal_profile(sum, g);
  for (int i = 0; i < 10; ++i) CHECK(ps[i] == doctest::Approx(2.0 * p[i] + 3.0).epsilon(1e-13));
}

TEST_CASE("sech^2 profile") {
  CHECK(soliton_profile(0.4, 2.0, 5.0, 0.4) == 2.0);
  CHECK(soliton_profile(0.5, 2.0, 5.0, 0.4) == doctest::Approx(soliton_profile(0.3, 2.0, 5.0, 0.4)));
  const double half = std::acosh(std::sqrt(2.0)) / 5.0;
  CHECK(soliton_profile(0.4 + half, 2.0, 5.0, 0.4) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(soliton_profile(0.0, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("fit recovers synthetic pulses") {
  std::vector<double> x(101), y(101);
  for (int k = 0; k <= 100; ++k) {
    x[k] = k / 100.0;
    y[k] = soliton_profile(x[k], 2.0, 5.0, 0.4);
  }
  const auto f = fit_soliton(x, y);
  CHECK(f.amplitude == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.width_param == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(f.X == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937 gen(42);
  std::uniform_real_distribution<double> U(-0.01, 0.01);
  for (int k = 0; k <= 100; ++k) y[k] *= 1.0 + U(gen);
  const auto n = fit_soliton(x, y);
  CHECK(n.r_squared > 0.99);
  CHECK(n.X == doctest::Approx(0.4).epsilon(1e-2));

  std::vector<double> mono(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) mono[k] = x[k];
  CHECK_THROWS_AS(fit_soliton(x, mono), FitError);
}

TEST_CASE("front speed") {
  std::vector<std::pair<double, double>> tx;
  for (int k = 0; k < 5; ++k) tx.emplace_back(0.1 * k, 0.1 + 0.5 * 0.1 * k);
  const auto e = front_speed(tx);
  CHECK(e.c == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.residual == doctest::Approx(0.0).epsilon(1e-14));
  auto shifted = tx;
  for (auto& [t, X] : shifted) t += 3.7;
  CHECK(front_speed(shifted).c == doctest::Approx(e.c).epsilon(1e-12));
  std::vector<std::pair<double, double>> still = {{0, 0.3}, {1, 0.3}, {2, 0.3}};
  CHECK(front_speed(still).c == 0.0);
  CHECK_THROWS_AS(front_speed(std::vector<std::pair<double, double>>{{0, 1}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("front speed of a pulse advected through the solver") {
  // periodic 1D strip, speed 0.5, Gaussian marginal; the fitted sech^2 peak
  // follows the Gaussian's centre
  const GridSpec g = build_grid(1.0, 0.0, 0.1, 100, 5);
  const auto adv = sample_advection(g, [](double, double) { return 0.5; }, [](double, double) { return 0.0; });
  RhsOptions opt;
  opt.limiter = false;
  Field2D u(g.Nx, g.Ny);
  RhsWorkspace ws;
  const ssp::RhsFn rhs = [&](double, std::span<const double> v, std::span<double> r) {
    u.set_interior(v);
    u.fill_periodic();
    spatial_rhs(u, adv, 0.0, SourceTerms{}, g, opt, ws, r);
  };
  const auto u0 = average_field(
      [](double x, double) { return std::exp(-std::pow((x - 0.3) / 0.05, 2)); }, g).interior();
  ssp::AdvanceConfig cfg;
  cfg.scheme = ssp::Scheme::rk3;
  cfg.dt = 0.002;
  cfg.t_final = 0.6;
  cfg.snapshot_times = {0.0, 0.2, 0.4, 0.6};
  const auto tr = ssp::advance(u0, rhs, cfg);
  std::vector<double> x(g.Nx);
  for (int i = 0; i < g.Nx; ++i) x[i] = g.x_center(i);
  std::vector<std::pair<double, double>> tx;
  for (const auto& s : tr.snapshots) tx.emplace_back(s.t, fit_soliton(x, marginal_profile(s.state, g)).X);
  CHECK(front_speed(tx).c == doctest::Approx(0.5).epsilon(2e-2));
}

TEST_CASE("observed order") {
  const std::vector<double> h = {0.1, 0.05};
  CHECK(convergence_order(h, std::vector<double>{1e-2, 1.25e-3}) == doctest::Approx(3.0).epsilon(1e-12));
  const std::vector<double> h4 = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e;
  for (double v : h4) e.push_back(3.0 * std::pow(v, 5));
  CHECK(std::abs(convergence_order(h4, e) - 5.0) <= 1e-10);
  CHECK_THROWS_AS(convergence_order(h, std::vector<double>{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_order(std::vector<double>{0.05, 0.1}, std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("distances") {
  const std::vector<double> a = {1.0, 2.0, 3.0}, b = {1.0, 2.5, 2.0};
  CHECK(l1_distance(a, b, 0.1) == doctest::Approx(0.15));
  CHECK(linf_distance(a, b) == 1.0);
}
