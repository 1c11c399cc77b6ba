#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "angio/flux.hpp"
#include "angio/grid.hpp"
#include "angio/model.hpp"
#include "angio/ssp.hpp"
#include "angio/weno.hpp"

namespace angio::io {

/// Step size of the published reference run, kept as a documented override.
inline constexpr double kReferenceDt = 2.2906e-4;

struct RunConfig {
  double x_max = 1.0;
  double y_min = -1.5;
  double y_max = 1.5;
  int Nx = 50;
  int Ny = 150;

  model::ModelParams params{};

  ssp::Scheme integrator = ssp::Scheme::msstep3;
  FluxKind flux = FluxKind::upwind;
  bool limiter = true;
  weno::Mode weno_mode = weno::Mode::nonlinear;
  double weno_eps = weno::kDefaultEps;
  SourceMode source_mode = SourceMode::nodal;

  /// nullopt selects the step-size bound computed from the initial state.
  std::optional<double> dt;
  /// Multiplier on the automatic step.
  double cfl_safety = 1.0;
  double T_final = 0.687;
  /// Either an interval (snapshots at k * interval, k >= 1) or explicit times.
  std::optional<double> snapshot_interval = 0.1145;
  std::vector<double> snapshot_times;
  std::string out_dir = "out";
  bool strict_positivity = false;
  /// Reserved; the solver is deterministic and never reads it.
  std::uint64_t seed = 0;

  GridSpec grid() const;
  model::SchemeOptions scheme_options() const;
  /// Resolved output times in increasing order.
  std::vector<double> output_times() const;

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  /// 1-based line in the document, 0 for overrides and whole-config checks.
  int line() const { return line_; }

 private:
  int line_;
};

/// key=value lines, '#' starts a comment. Missing keys keep their defaults.
RunConfig parse_config(std::string_view text);
/// Applies one "key=value" on top of cfg and revalidates.
void apply_override(RunConfig& cfg, std::string_view assignment);
/// Every key, one per line, in a form parse_config reads back exactly.
std::string serialize(const RunConfig& cfg);
/// Throws ConfigError on a violated invariant.
void validate(const RunConfig& cfg);

struct KeyDoc {
  std::string_view key;
  std::string_view help;
};
/// All recognised keys with a one-line description.
const std::vector<KeyDoc>& config_keys();

std::string_view to_string(FluxKind k);
std::string_view to_string(weno::Mode m);
std::string_view to_string(SourceMode m);

}  // namespace angio::io
