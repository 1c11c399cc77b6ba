// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned in
// angio/verify.hpp and below. Criteria 6, 7 and 9 need full reference runs
// and take several minutes each.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "angio/run.hpp"
#include "angio/verify.hpp"
#include "table_oracle.hpp"

namespace fs = std::filesystem;
using namespace angio;
using verify::CheckResult;

namespace {

constexpr double kExactnessSeconds = 1.0;
constexpr double kConvergenceSeconds = 30.0;
constexpr double kReferenceRunSeconds = 600.0;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ANGIO_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-9"};
  std::string work = "acceptance_runs";
  bool skip_full = false;
  app.add_option("--work", work, "directory for the reference runs");
  app.add_flag("--skip-full", skip_full, "skip the criteria that need full reference runs");
  CLI11_PARSE(app, argc, argv);
  const fs::path dir(work);
  fs::create_directories(dir);

  std::vector<CheckResult> results;
  const auto report = [&](CheckResult r) {
    std::cout << verify::format(r) << std::endl;
    results.push_back(std::move(r));
  };

  {
    CheckResult r = verify::check_weno_exactness();
    r.passed = r.passed && r.seconds < kExactnessSeconds;
    r.detail += "; runtime limit " + std::to_string(kExactnessSeconds) + " s";
    report(r);
  }
  {
    CheckResult r = verify::check_weight_table();
    const auto diffs = oracle::printed_table_diff();
    const bool listed = diffs == oracle::kKnownMisprints;
    std::string list;
    for (const auto& d : diffs) list += (list.empty() ? "" : "; ") + d;
    r.passed = r.passed && listed;
    r.detail += "; printed-table diff {" + list + "}" + (listed ? " = documented misprints" : " != documented misprints");
    report(r);
  }
  {
    CheckResult r = verify::check_convergence();
    r.passed = r.passed && r.seconds < kConvergenceSeconds;
    report(r);
  }
  report(verify::check_integrator_orders());
  report(verify::check_conservation());

  if (!skip_full) {
    std::cout << "reference run (criteria 6, 7) ..." << std::endl;
    const fs::path ref = dir / "reference";
    io::RunConfig cfg;
    const io::RunResult run = io::run_simulation(cfg, ref, &std::cout);
    report(verify::check_positivity(run));
    CheckResult pulse = verify::check_pulse(run);
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << "; wall " << run.wall_seconds << " s on " << run.threads
       << " thread(s), target < " << kReferenceRunSeconds << " s";
    pulse.detail += os.str();
    report(pulse);
  }

  report(verify::check_chi1());

  if (!skip_full) {
    CheckResult r;
    r.id = 9;
    r.name = "determinism (repeat run, --threads 4 vs --threads 1)";
    const auto t0 = std::chrono::steady_clock::now();
    const int rc1 = run_cli("run --threads 1 --out " + (dir / "threads1").string(), dir / "threads1.log");
    const int rc4 = run_cli("run --threads 4 --out " + (dir / "threads4").string(), dir / "threads4.log");
    std::string why_repeat, why_threads;
    bool repeat = false, threads = false;
    if (rc1 == 0 && rc4 == 0) {
      repeat = verify::same_snapshots(dir / "reference", dir / "threads1", why_repeat);
      threads = verify::same_snapshots(dir / "threads1", dir / "threads4", why_threads);
    }
    r.passed = rc1 == 0 && rc4 == 0 && repeat && threads;
    r.detail = "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc4) + "; repeat: " + why_repeat +
               "; threads: " + why_threads;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(r);
  }

  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
