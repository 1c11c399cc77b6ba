#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "angio/config.hpp"
#include "angio/diagnostics.hpp"

namespace angio::io {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolverAbort = 3, kExitIo = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshots whose marginal fit reaches this r^2 count as showing the pulse.
inline constexpr double kPulseR2 = 0.9;

struct SnapshotSummary {
  double t = 0.0;
  std::size_t step = 0;
  std::string file;
  double min_rho = 0.0;
  double min_C = 0.0;
  double max_C = 0.0;
  double mass_rho = 0.0;
  double mass_C = 0.0;
  double mass_I = 0.0;
  std::optional<diagnostics::SolitonFit> fit;
  std::string fit_error;
};

/// Extremes over every accepted step, including the initial state.
struct StepAudit {
  double min_rho = 0.0;
  std::size_t min_rho_step = 0;
  double min_C = 0.0;
  std::size_t min_C_step = 0;
  double max_C = 0.0;
  std::size_t max_C_step = 0;
  /// Time of the first snapshot showing the pulse, if any.
  std::optional<double> pulse_onset;
  /// Steps after pulse_onset at which the integral of C went up, and by how much at most.
  std::size_t c_mass_increases = 0;
  double max_c_mass_increase = 0.0;
  /// Largest dt divided by the step bound re-evaluated along the run.
  double max_dt_over_bound = 0.0;
  /// Integral of C after every step (index = step).
  std::vector<double> c_mass;
};

struct RunResult {
  RunConfig config;
  double chi1 = 0.0;
  double dt_used = 0.0;
  std::optional<double> dt_bound;
  std::size_t steps = 0;
  double t_reached = 0.0;
  double wall_seconds = 0.0;
  int threads = 1;
  bool aborted = false;
  std::string abort_reason;
  std::vector<SnapshotSummary> snapshots;
  std::optional<diagnostics::SpeedEstimate> speed;
  StepAudit audit;
};

/// Runs cfg and writes snapshot CSVs, manifest.json and diagnostics.json into
/// out_dir (plus an ABORTED marker on solver failure). Throws ConfigError for a
/// config the solver cannot honour and IoError when writing fails; a solver
/// abort is reported through the result.
RunResult run_simulation(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// run_simulation wrapped with exit codes and messages on err.
int run_command(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log, std::ostream& err);

/// Prints the per-snapshot table and the speed estimate from a run directory.
int report_command(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

/// Column layout shared by the writer and the tests.
inline constexpr const char* kSnapshotColumns = "i,j,x_center,y_center,rho,C,I";
inline constexpr int kSnapshotHeaderLines = 6;

std::string snapshot_file_name(std::size_t index);

}  // namespace angio::io
