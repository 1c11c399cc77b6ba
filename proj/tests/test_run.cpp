#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "angio/run.hpp"
#include "angio/verify.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace angio;
using namespace angio::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("angio_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_config() {
  RunConfig c;
  c.Nx = 10;
  c.Ny = 30;
  c.T_final = 0.01;
  c.snapshot_interval = 0.005;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("short run writes snapshots, manifest and diagnostics") {
  const fs::path out = scratch("short");
  const RunResult r = run_simulation(small_config(), out);
  CHECK_FALSE(r.aborted);
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[1].t == doctest::Approx(0.01));
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "diagnostics.json"));
  CHECK_FALSE(fs::exists(out / "ABORTED"));
  CHECK(r.audit.min_rho >= 0.0);
  CHECK(r.audit.min_C >= 0.0);

  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["status"] == "completed");
  CHECK(m["snapshots"].size() == 2);
  CHECK(m["chi1"].get<double>() == doctest::Approx(0.0025638366685886).epsilon(1e-12));
  CHECK(m["config"]["Nx"] == "10");

  // schema: fixed header, then Nx * Ny rows of 2 integers and 5 finite reals
  std::ifstream is(out / r.snapshots[0].file, std::ios::binary);
  std::string line;
  for (int k = 0; k < kSnapshotHeaderLines; ++k) {
    std::getline(is, line);
    CHECK(line.rfind("#", 0) == 0);
  }
  std::getline(is, line);
  CHECK(line == kSnapshotColumns);
  int rows = 0;
  while (std::getline(is, line)) {
    CHECK(line.find('\r') == std::string::npos);
    int i = -1, j = -1;
    double v[5];
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf,%lf", &i, &j, &v[0], &v[1], &v[2], &v[3], &v[4]) == 7);
    for (double x : v) CHECK(std::isfinite(x));
    ++rows;
  }
  CHECK(rows == 300);
}

TEST_CASE("identical configs give identical snapshot files") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_simulation(small_config(), a);
  run_simulation(small_config(), b);
  std::string why;
  CHECK(verify::same_snapshots(a, b, why));
}

TEST_CASE("a step far above the bound aborts with a marker and partial output") {
  const fs::path out = scratch("abort");
  RunConfig c = small_config();
  c.dt = 0.01;
  c.limiter = false;
  c.strict_positivity = true;
  c.T_final = 2.0;
  c.snapshot_interval = 0.004;
  std::ostringstream log, err;
  CHECK(run_command(c, out, log, err) == kExitSolverAbort);
  CHECK(fs::exists(out / "ABORTED"));
  CHECK(err.str().find("step") != std::string::npos);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["status"] == "aborted");
  std::ostringstream rep, rerr;
  CHECK(report_command(out, rep, rerr) == kExitOk);
  CHECK(rep.str().find("ABORTED") != std::string::npos);
}

TEST_CASE("report") {
  const fs::path out = scratch("report");
  run_simulation(small_config(), out);
  std::ostringstream rep, err;
  CHECK(report_command(out, rep, err) == kExitOk);
  CHECK(rep.str().find("completed") != std::string::npos);
  const fs::path empty = scratch("empty");
  fs::create_directories(empty);
  std::ostringstream r2, e2;
  CHECK(report_command(empty, r2, e2) == kExitIo);
  CHECK(e2.str().find("no manifest") != std::string::npos);
  std::ofstream(empty / "manifest.json") << "{ not json";
  std::ostringstream r3, e3;
  CHECK(report_command(empty, r3, e3) == kExitIo);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const std::string cli = ANGIO_CLI_PATH;
  const auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  std::ofstream(dir / "bad.cfg") << "flux=centered\n";
  CHECK(run("run --config " + (dir / "bad.cfg").string()) == kExitConfig);
  CHECK(slurp(dir / "log.txt").find("line 1") != std::string::npos);
  CHECK(run("run --override Nx=2") == kExitConfig);
  CHECK(run("report --out " + (dir / "nothing").string()) == kExitIo);
  std::ofstream(dir / "ok.cfg") << "Nx=10\nNy=30\nT_final=0.004\nsnapshot_interval=0.002\n";
  CHECK(run("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "o").string() + " --threads 2") ==
        kExitOk);
  CHECK(fs::exists(dir / "o" / "snapshot_002.csv"));
  fs::create_directories(dir / "blocked");
  std::ofstream(dir / "blocked" / "file") << "x";
  CHECK(run("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "blocked" / "file" / "sub").string()) ==
        kExitIo);
}
