#include "angio/ssp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "angio/grid.hpp"

namespace angio::ssp {

double ssp_factor(Scheme s) { return s == Scheme::msstep3 ? 1.0 / 3.0 : 1.0; }

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::euler:
      return "euler";
    case Scheme::rk2:
      return "rk2";
    case Scheme::rk3:
      return "rk3";
    case Scheme::msstep3:
      return "msstep3";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::euler, Scheme::rk2, Scheme::rk3, Scheme::msstep3})
    if (name == to_string(s)) return s;
  return std::nullopt;
}

namespace {

State eval(const RhsFn& rhs, double t, const State& u) {
  State r(u.size());
  rhs(t, u, r);
  return r;
}

}  // namespace

State euler_step(const State& u, double t, double dt, const RhsFn& rhs) {
  const State r = eval(rhs, t, u);
  State out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k] + dt * r[k];
  return out;
}

State rk2_step(const State& u, double t, double dt, const RhsFn& rhs) {
  const State r0 = eval(rhs, t, u);
  State u1(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) u1[k] = u[k] + dt * r0[k];
  const State r1 = eval(rhs, t + dt, u1);
  State out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = 0.5 * u[k] + 0.5 * u1[k] + 0.5 * dt * r1[k];
  return out;
}

State rk3_step(const State& u, double t, double dt, const RhsFn& rhs, std::span<const double> r0) {
  State r;
  if (r0.empty()) {
    r = eval(rhs, t, u);
    r0 = r;
  }
  const std::size_t n = u.size();
  State u1(n);
  for (std::size_t k = 0; k < n; ++k) u1[k] = u[k] + dt * r0[k];
  const State r1 = eval(rhs, t + dt, u1);
  State u2(n);
  for (std::size_t k = 0; k < n; ++k) u2[k] = 0.75 * u[k] + 0.25 * u1[k] + 0.25 * dt * r1[k];
  const State r2 = eval(rhs, t + 0.5 * dt, u2);
  State out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = u[k] / 3.0 + 2.0 / 3.0 * u2[k] + 2.0 / 3.0 * dt * r2[k];
  return out;
}

void History::push(State u, State r) {
  head_ = (head_ + 1) % 4;
  u_[head_] = std::move(u);
  r_[head_] = std::move(r);
  size_ = std::min<std::size_t>(size_ + 1, 4);
}

std::size_t History::slot(std::size_t k) const {
  if (k >= size_) throw std::out_of_range("History: level not stored");
  return (head_ + 4 - k) % 4;
}

State msstep3_step(const History& h, double dt) {
  if (h.size() < 4) throw std::logic_error("msstep3_step: needs four history levels");
  const State& un = h.state(0);
  const State& rn = h.rhs(0);
  const State& uo = h.state(3);
  const State& ro = h.rhs(3);
  State out(un.size());
  for (std::size_t k = 0; k < un.size(); ++k)
    out[k] = 16.0 / 27.0 * (un[k] + 3.0 * dt * rn[k]) + 11.0 / 27.0 * (uo[k] + 12.0 / 11.0 * dt * ro[k]);
  return out;
}

std::pair<std::size_t, double> uniform_steps(double t_final, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("advance: dt must be positive");
  if (t_final == 0.0) return {0, dt};
  const double ratio = t_final / dt;
  // tolerate a requested dt that divides t_final up to rounding
  auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
  n = std::max<std::size_t>(n, 1);
  return {n, t_final / static_cast<double>(n)};
}

Trajectory advance(State u0, const RhsFn& rhs, const AdvanceConfig& cfg, const StepObserver& observer) {
  if (!(cfg.t_final >= 0.0)) throw std::invalid_argument("advance: t_final must be nonnegative");
  const auto [nsteps, dt] = uniform_steps(cfg.t_final, cfg.dt);

  // step index for each requested snapshot
  std::vector<std::size_t> wanted;
  for (double s : cfg.snapshot_times) {
    if (s < 0.0 || s > cfg.t_final * (1.0 + 1e-12))
      throw std::invalid_argument("advance: snapshot time outside [0, t_final]");
    wanted.push_back(static_cast<std::size_t>(std::llround(s / dt)));
  }
  if (cfg.t_final == 0.0) wanted = {0};

  Trajectory traj;
  traj.dt = dt;
  auto emit = [&](std::size_t step, const State& u) {
    for (std::size_t w : wanted)
      if (w == step) {
        traj.snapshots.push_back({static_cast<double>(step) * dt, step, u});
        break;
      }
  };

  State u = std::move(u0);
  emit(0, u);
  History hist;

  for (std::size_t n = 0; n < nsteps; ++n) {
    const double t = static_cast<double>(n) * dt;
    State next;
    try {
      switch (cfg.scheme) {
        case Scheme::euler:
          next = euler_step(u, t, dt, rhs);
          break;
        case Scheme::rk2:
          next = rk2_step(u, t, dt, rhs);
          break;
        case Scheme::rk3:
          next = rk3_step(u, t, dt, rhs);
          break;
        case Scheme::msstep3: {
          State r = eval(rhs, t, u);
          hist.push(u, std::move(r));
          next = hist.size() < 4 ? rk3_step(u, t, dt, rhs, hist.rhs(0)) : msstep3_step(hist, dt);
          break;
        }
      }
    } catch (const NumericalError& e) {
      traj.steps = n;
      traj.t = t;
      traj.final_state = std::move(u);
      std::ostringstream msg;
      msg << "non-finite right-hand side at step " << n + 1 << ": " << e.what();
      throw SolverAbort(msg.str(), n + 1, t + dt, std::move(traj));
    }

    std::string reason;
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (!std::isfinite(next[k])) {
        reason = "non-finite state entry " + std::to_string(k);
        break;
      }
      if (cfg.strict_positivity && next[k] < 0.0) {
        std::ostringstream msg;
        msg << "positivity violation at state entry " << k << " (value " << next[k] << ")";
        reason = msg.str();
        break;
      }
    }
    const double t_next = static_cast<double>(n + 1) * dt;
    if (reason.empty() && observer) reason = observer(n + 1, t_next, next);
    if (!reason.empty()) {
      traj.steps = n;
      traj.t = t;
      traj.final_state = std::move(u);
      throw SolverAbort("step " + std::to_string(n + 1) + ": " + reason, n + 1, t_next, std::move(traj));
    }
    u = std::move(next);
    emit(n + 1, u);
  }

  traj.steps = nsteps;
  traj.t = static_cast<double>(nsteps) * dt;
  traj.final_state = std::move(u);
  return traj;
}

}  // namespace angio::ssp
