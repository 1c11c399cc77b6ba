#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace angio::ssp {

enum class Scheme { euler, rk2, rk3, msstep3 };

/// CFL multiplier: 1/3 for the multistep scheme, 1 otherwise.
double ssp_factor(Scheme s);
std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

using State = std::vector<double>;
/// r = L(t, u). Must not alias u and r.
using RhsFn = std::function<void(double t, std::span<const double> u, std::span<double> r)>;

/// u + dt r(u)
State euler_step(const State& u, double t, double dt, const RhsFn& rhs);
/// u1 = u + dt r(u); u_next = u/2 + u1/2 + dt/2 r(u1)
State rk2_step(const State& u, double t, double dt, const RhsFn& rhs);
/// Shu-Osher form. r0, when given, must equal r(t, u) and saves one evaluation.
State rk3_step(const State& u, double t, double dt, const RhsFn& rhs, std::span<const double> r0 = {});

/// The four most recent (state, rhs) levels, newest first.
class History {
 public:
  void push(State u, State r);
  void clear() { size_ = 0; }
  std::size_t size() const { return size_; }
  /// k = 0 is t_n, k = 3 is t_{n-3}.
  const State& state(std::size_t k) const { return u_[slot(k)]; }
  const State& rhs(std::size_t k) const { return r_[slot(k)]; }

 private:
  std::size_t slot(std::size_t k) const;

  std::array<State, 4> u_;
  std::array<State, 4> r_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

/// (16/27)(u^n + 3 dt r^n) + (11/27)(u^{n-3} + (12/11) dt r^{n-3}).
/// Throws std::logic_error with fewer than four levels.
State msstep3_step(const History& h, double dt);

struct AdvanceConfig {
  Scheme scheme = Scheme::msstep3;
  double dt = 0.0;
  double t_final = 0.0;
  /// Requested output times in [0, t_final]; each maps to the nearest step.
  std::vector<double> snapshot_times;
  /// Abort as soon as a state entry drops below zero.
  bool strict_positivity = false;
};

struct Snapshot {
  double t = 0.0;
  std::size_t step = 0;
  State state;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
  double dt = 0.0;
  double t = 0.0;
  State final_state;
};

/// Step count and uniform step actually used: the requested dt is shrunk so
/// that an integer number of steps lands exactly on t_final.
std::pair<std::size_t, double> uniform_steps(double t_final, double dt);

class SolverAbort : public std::runtime_error {
 public:
  SolverAbort(const std::string& what, std::size_t step, double t, Trajectory partial)
      : std::runtime_error(what), step_(step), t_(t), partial_(std::move(partial)) {}
  std::size_t step() const { return step_; }
  double t() const { return t_; }
  const Trajectory& partial() const { return partial_; }

 private:
  std::size_t step_;
  double t_;
  Trajectory partial_;
};

/// Called after every step (step >= 1) with the new state. A non-empty return
/// value aborts the run with that reason.
using StepObserver = std::function<std::string(std::size_t step, double t, std::span<const double> u)>;

/// Uniform stepping from t = 0 to t_final. msstep3 starts with three RK3
/// steps whose first-stage evaluations seed the history.
Trajectory advance(State u0, const RhsFn& rhs, const AdvanceConfig& cfg, const StepObserver& observer = {});

}  // namespace angio::ssp
