// Command-line front end: run, report, verify.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "angio/config.hpp"
#include "angio/run.hpp"
#include "angio/verify.hpp"

#ifdef ANGIO_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

using namespace angio;

int load_config(const std::string& path, const std::vector<std::string>& overrides, io::RunConfig& cfg) {
  try {
    if (!path.empty()) {
      std::ifstream is(path, std::ios::binary);
      if (!is) {
        std::cerr << "io error: cannot read config " << path << "\n";
        return io::kExitIo;
      }
      std::ostringstream ss;
      ss << is.rdbuf();
      cfg = io::parse_config(ss.str());
    }
    for (const auto& o : overrides) io::apply_override(cfg, o);
  } catch (const io::ConfigError& e) {
    std::cerr << "config error" << (path.empty() ? "" : " in " + path) << ": " << e.what() << "\n";
    return io::kExitConfig;
  }
  return io::kExitOk;
}

void set_threads(int n) {
#ifdef ANGIO_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"angio: WENO5 finite-volume solver for the reduced angiogenesis model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  int threads = 0;
  bool full = false;
  bool print_config = false;

  auto* run = app.add_subcommand("run", "integrate the model and write snapshots and diagnostics");
  run->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides out_dir)");
  run->add_option("--override", overrides, "key=value applied after the config file (repeatable)");
  run->add_option("--threads", threads, "OpenMP threads for the right-hand side")->check(CLI::PositiveNumber);
  run->add_flag("--print-config", print_config, "print the resolved config and exit");

  auto* report = app.add_subcommand("report", "summarise a finished run directory");
  report->add_option("--out", out_dir, "run directory")->required();

  auto* verify = app.add_subcommand("verify", "run the verification suites and print pass/fail");
  verify->add_option("--out", out_dir, "scratch directory for the positivity run")->default_val("verify_out");
  verify->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
  verify->add_flag("--full", full, "use the full reference run (minutes) instead of a short one");

  auto* keys = app.add_subcommand("keys", "list config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : io::kExitConfig;
  }
  set_threads(threads);

  if (*run) {
    io::RunConfig cfg;
    if (const int rc = load_config(config_path, overrides, cfg)) return rc;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (print_config) {
      std::cout << io::serialize(cfg);
      return 0;
    }
    return io::run_command(cfg, cfg.out_dir, std::cout, std::cerr);
  }
  if (*report) return io::report_command(out_dir, std::cout, std::cerr);
  if (*verify) {
    try {
      return verify::verify_command(out_dir, full, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "io error: " << e.what() << "\n";
      return io::kExitIo;
    }
  }
  if (*keys) {
    for (const auto& k : io::config_keys()) std::cout << k.key << "\t" << k.help << "\n";
    return 0;
  }
  return 0;
}
