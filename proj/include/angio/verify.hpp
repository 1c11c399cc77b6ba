#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "angio/run.hpp"

namespace angio::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Tolerances, fixed here so the CLI and the acceptance binary agree.
inline constexpr double kExactnessTol = 1e-11;
inline constexpr double kWeightTableTol = 1e-12;
inline constexpr double kMinSpatialOrder = 4.5;
inline constexpr double kMinOrderRk2 = 1.95;
inline constexpr double kMinOrderRk3 = 2.95;
inline constexpr double kMinOrderMsstep3 = 2.95;
inline constexpr double kRk3StepValue = 0.90483333333333333;  // 1 - h + h^2/2 - h^3/6 at h = 0.1
inline constexpr double kRk3StepTol = 1e-10;
inline constexpr double kMassTol = 1e-10;
inline constexpr double kChi1RouteTol = 1e-8;
inline constexpr double kChi1LimitTol = 1e-6;
inline constexpr double kMaxPrincipleSlack = 1e-10;
inline constexpr double kPulseFromTime = 0.2290;

/// Monomials of degree <= 4 at all eleven points, linear weights.
CheckResult check_weno_exactness();
/// Stored linear weights against the exactness system solved afresh.
CheckResult check_weight_table();
/// Periodic 1D advection of sin(2 pi x), upwind flux, RK3 with dt ~ dx^(5/3).
CheckResult check_convergence(weno::Mode mode = weno::Mode::nonlinear);
/// u' = -u on [0, 1] for rk2, rk3, msstep3, plus the single rk3 step.
CheckResult check_integrator_orders();
/// 1000 steps of periodic pure advection with the limiter on.
CheckResult check_conservation();
/// Adaptive against Simpson quadrature, and against the eta -> infinity limit.
CheckResult check_chi1();
/// Every-step minima and the maximum principle, from a finished run.
CheckResult check_positivity(const io::RunResult& run);
/// Pulse fit quality, monotone front and shrinking C from a finished run.
CheckResult check_pulse(const io::RunResult& run);

/// Byte-for-byte comparison of every snapshot file named in two run
/// directories' manifests.
bool same_snapshots(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why);

/// Criteria that need no full run, then a short positivity run of the
/// reference setup (or the full run when `full`). Prints one line per check
/// and returns 0 when all pass, 1 otherwise.
int verify_command(const std::filesystem::path& out_dir, bool full, std::ostream& out);

std::string format(const CheckResult& r);

}  // namespace angio::verify
