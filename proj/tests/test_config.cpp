#include <string>

#include "angio/config.hpp"
#include "doctest.h"

using namespace angio;
using namespace angio::io;

TEST_CASE("empty document gives the reference scenario") {
  const RunConfig c = parse_config("");
  CHECK(c == RunConfig{});
  const GridSpec g = c.grid();
  CHECK(g.dx == doctest::Approx(0.02));
  CHECK(g.dy == doctest::Approx(0.02));
  CHECK(c.T_final == 0.687);
  CHECK(c.integrator == ssp::Scheme::msstep3);
  CHECK(!c.dt);
  CHECK(c.params.A == 22.42);
  const auto t = c.output_times();
  REQUIRE(t.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(t[k] == doctest::Approx(0.1145 * (k + 1)).epsilon(1e-14));
}

TEST_CASE("single overrides") {
  CHECK(parse_config("Nx=100").grid().dx == doctest::Approx(0.01));
  const RunConfig c = parse_config("# comment\n  flux = lax-friedrichs  # trailing\n\ndt=2.2906e-4\nlimiter=off\n");
  CHECK(c.flux == FluxKind::lax_friedrichs);
  CHECK(c.dt == 2.2906e-4);
  CHECK_FALSE(c.limiter);
  const RunConfig s = parse_config("T_final=0.01\nsnapshot_interval=0.005\n");
  CHECK(s.output_times().size() == 2);
}

TEST_CASE("errors carry line numbers") {
  const auto line_of = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("flux=centered") == 1);
  CHECK(line_of("Nx=50\n\nNx 60") == 3);
  CHECK(line_of("Nx=5x") == 1);
  CHECK(line_of("# ok\nbogus=1") == 2);
  CHECK(line_of("Nx=50\nNx=60") == 2);
  CHECK(line_of("kappa=") == 1);
  CHECK(line_of("T_final=-1") == 0);
  CHECK(line_of("snapshot_times=0.1,0.9") == 0);
  CHECK(line_of("weno_mode=linear\nintegrator=rk3") == -1);
  try {
    parse_config("flux=centered");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("centered") != std::string::npos);
  }
}

TEST_CASE("serialize round trip") {
  RunConfig c;
  c.Nx = 37;
  c.params.v0 = {0.3, -0.1};
  c.params.cL_decay = 0.25;
  c.dt = 1.0 / 3.0 * 1e-4;
  c.snapshot_interval.reset();
  c.snapshot_times = {0.1, 0.2, 0.30000000000000004};
  c.weno_mode = weno::Mode::linear;
  c.source_mode = SourceMode::cell_average;
  c.out_dir = "some dir/x";
  c.seed = 12345678901234ull;
  CHECK(parse_config(serialize(c)) == c);
  CHECK(parse_config(serialize(RunConfig{})) == RunConfig{});
  RunConfig none;
  none.snapshot_interval.reset();
  CHECK(parse_config(serialize(none)) == none);
}

TEST_CASE("overrides apply on top and revalidate") {
  RunConfig c;
  apply_override(c, "dt=2.2906e-4");
  CHECK(c.dt == 2.2906e-4);
  apply_override(c, "dt=auto");
  CHECK(!c.dt);
  CHECK_THROWS_AS(apply_override(c, "Nx=2"), ConfigError);
  CHECK(c.Nx == 50);
  CHECK_THROWS_AS(apply_override(c, "nonsense"), ConfigError);
}

TEST_CASE("every key is documented") {
  CHECK(config_keys().size() >= 30);
  for (const auto& k : config_keys()) CHECK_FALSE(k.help.empty());
}
