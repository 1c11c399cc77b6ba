#include <cmath>
#include <limits>
#include <vector>

#include "angio/diagnostics.hpp"
#include "angio/ssp.hpp"
#include "doctest.h"

using namespace angio;

namespace {

const ssp::RhsFn decay = [](double, std::span<const double> u, std::span<double> r) { r[0] = -u[0]; };

double final_error(ssp::Scheme s, double dt) {
  ssp::AdvanceConfig cfg;
  cfg.scheme = s;
  cfg.dt = dt;
  cfg.t_final = 1.0;
  return std::abs(ssp::advance({1.0}, decay, cfg).final_state[0] - std::exp(-1.0));
}

double order(ssp::Scheme s) {
  const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e;
  for (double dt : h) e.push_back(final_error(s, dt));
  return diagnostics::convergence_order(h, e);
}

}  // namespace

TEST_CASE("single steps on u' = -u against hand substitution") {
  // euler: 1 - h; rk2: 1 - h + h^2/2; rk3: 1 - h + h^2/2 - h^3/6
  CHECK(ssp::euler_step({1.0}, 0.0, 0.1, decay)[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(ssp::rk2_step({1.0}, 0.0, 0.1, decay)[0] == doctest::Approx(0.905).epsilon(1e-15));
  CHECK(std::abs(ssp::rk3_step({1.0}, 0.0, 0.1, decay)[0] - 0.9048333333333333) <= 1e-10);
}

TEST_CASE("empirical orders") {
  CHECK(order(ssp::Scheme::euler) >= 0.95);
  CHECK(order(ssp::Scheme::rk2) >= 1.95);
  CHECK(order(ssp::Scheme::rk3) >= 2.95);
  CHECK(order(ssp::Scheme::msstep3) >= 2.95);
}

TEST_CASE("multistep update formula") {
  ssp::History h;
  for (int k = 3; k >= 0; --k) h.push({double(k)}, {10.0 * k});
  // newest pushed last: state(0) = 0, state(3) = 3
  CHECK(h.state(0)[0] == 0.0);
  CHECK(h.state(3)[0] == 3.0);
  const double dt = 0.01;
  const double expect = 16.0 / 27.0 * (0.0 + 3.0 * dt * 0.0) + 11.0 / 27.0 * (3.0 + 12.0 / 11.0 * dt * 30.0);
  CHECK(ssp::msstep3_step(h, dt)[0] == doctest::Approx(expect).epsilon(1e-15));
  ssp::History short_h;
  short_h.push({1.0}, {1.0});
  CHECK_THROWS_AS(ssp::msstep3_step(short_h, dt), std::logic_error);
  CHECK_THROWS_AS(short_h.state(1), std::out_of_range);
}

TEST_CASE("uniform_steps lands on the final time") {
  const auto [n, dt] = ssp::uniform_steps(0.687, 2.2906e-4);
  CHECK(n == 3000);
  CHECK(dt == doctest::Approx(2.29e-4).epsilon(1e-12));
  const auto [m, dm] = ssp::uniform_steps(1.0, 0.1);
  CHECK(m == 10);
  CHECK(dm == doctest::Approx(0.1));
  CHECK_THROWS_AS(ssp::uniform_steps(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("advance emits snapshots at the nearest steps") {
  ssp::AdvanceConfig cfg;
  cfg.scheme = ssp::Scheme::rk3;
  cfg.dt = 0.01;
  cfg.t_final = 0.1;
  cfg.snapshot_times = {0.0, 0.05, 0.1};
  const auto tr = ssp::advance({1.0}, decay, cfg);
  REQUIRE(tr.snapshots.size() == 3);
  CHECK(tr.snapshots[1].step == 5);
  CHECK(tr.snapshots[1].t == doctest::Approx(0.05));
  CHECK(tr.steps == 10);
  CHECK(tr.final_state[0] == doctest::Approx(std::exp(-0.1)).epsilon(1e-6));
  cfg.snapshot_times = {0.2};
  CHECK_THROWS_AS(ssp::advance({1.0}, decay, cfg), std::invalid_argument);
}

TEST_CASE("msstep3 start-up reuses the stored first stage") {
  int calls = 0;
  const ssp::RhsFn counted = [&](double, std::span<const double> u, std::span<double> r) {
    ++calls;
    r[0] = -u[0];
  };
  ssp::AdvanceConfig cfg;
  cfg.scheme = ssp::Scheme::msstep3;
  cfg.dt = 0.1;
  cfg.t_final = 1.0;
  ssp::advance({1.0}, counted, cfg);
  // three RK3 steps at 3 evaluations each, then one per multistep step
  CHECK(calls == 3 * 3 + 7);
}

TEST_CASE("aborts carry the step and the partial trajectory") {
  SUBCASE("non-finite state") {
    const ssp::RhsFn blowup = [](double t, std::span<const double> u, std::span<double> r) {
      r[0] = t > 0.25 ? std::numeric_limits<double>::infinity() : -u[0];
    };
    ssp::AdvanceConfig cfg;
    cfg.scheme = ssp::Scheme::euler;
    cfg.dt = 0.1;
    cfg.t_final = 1.0;
    cfg.snapshot_times = {0.1};
    try {
      ssp::advance({1.0}, blowup, cfg);
      FAIL("expected an abort");
    } catch (const ssp::SolverAbort& e) {
      CHECK(e.step() == 4);
      CHECK(e.partial().steps == 3);
      CHECK(e.partial().snapshots.size() == 1);
    }
  }
  SUBCASE("strict positivity") {
    const ssp::RhsFn drain = [](double, std::span<const double>, std::span<double> r) { r[0] = -1.0; };
    ssp::AdvanceConfig cfg;
    cfg.scheme = ssp::Scheme::euler;
    cfg.dt = 0.3;
    cfg.t_final = 1.2;
    cfg.strict_positivity = true;
    CHECK_THROWS_AS(ssp::advance({0.5}, drain, cfg), ssp::SolverAbort);
  }
  SUBCASE("observer") {
    ssp::AdvanceConfig cfg;
    cfg.scheme = ssp::Scheme::rk2;
    cfg.dt = 0.1;
    cfg.t_final = 1.0;
    const ssp::StepObserver stop = [](std::size_t step, double, std::span<const double>) {
      return step == 2 ? std::string("enough") : std::string();
    };
    try {
      ssp::advance({1.0}, decay, cfg, stop);
      FAIL("expected an abort");
    } catch (const ssp::SolverAbort& e) {
      CHECK(std::string(e.what()).find("enough") != std::string::npos);
      CHECK(e.step() == 2);
    }
  }
}

TEST_CASE("scheme names and factors") {
  CHECK(ssp::parse_scheme("msstep3") == ssp::Scheme::msstep3);
  CHECK_FALSE(ssp::parse_scheme("rk4"));
  CHECK(ssp::ssp_factor(ssp::Scheme::msstep3) == doctest::Approx(1.0 / 3.0));
  CHECK(ssp::ssp_factor(ssp::Scheme::rk3) == 1.0);
}
