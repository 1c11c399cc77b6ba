#pragma once

#include <array>
#include <span>
#include <vector>

#include "angio/flux.hpp"
#include "angio/grid.hpp"
#include "angio/weno.hpp"

namespace angio::model {

struct ModelParams {
  double delta1 = 0.255;
  double beta = 5.88;
  double A = 22.42;
  double Gamma = 0.135;
  double Gamma1 = 1.0;
  double q1 = 1.0;
  double kappa = 0.0045;
  double chi = 0.002;
  double eta = 15.0;
  /// Width of the Fermi factor in the consumption integral (not the WENO eps).
  double epsilon_v = 0.001;
  double sigma_v = 0.08;
  /// Inverse hypoxic length in the x1 = 1 boundary profile.
  double a = 1.0 / 0.3;
  double cL = 1.1;
  /// c_L(t) = cL * exp(-cL_decay * t); zero keeps it constant.
  double cL_decay = 0.0;
  std::array<double, 2> v0 = default_v0();
  /// Half-width of the truncated velocity box [-v_box, v_box]^2.
  double v_box = 4.0;

  static std::array<double, 2> default_v0();
  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
  double cL_at(double t) const;

  bool operator==(const ModelParams&) const = default;
};

/// A C / (1 + C); throws std::domain_error for C < 0.
double alpha_of(double C, const ModelParams& p);
/// (alpha/pi) [1 + alpha / (2 pi beta (1 + sigma_v^2)) ln(1 + 1/sigma_v^2)]
double mu_of(double C, const ModelParams& p);

/// mu_of with the constants hoisted out, for inner loops. No sign check.
struct BirthRate {
  explicit BirthRate(const ModelParams& p);
  double operator()(double C) const {
    const double al = A * C / (1.0 + C);
    return al * inv_pi * (1.0 + al * k);
  }
  double A;
  double inv_pi;
  double k;
};

/// Consumption rate chi_1 by adaptive Gauss-Kronrod in V, with the angular
/// integral in closed form 4 (1 + V) E(2 sqrt(V) / (1 + V)). Cached per
/// (chi, eta, epsilon_v).
double chi1_of(const ModelParams& p);
double chi1_adaptive(const ModelParams& p, double* error_estimate = nullptr);
/// Independent route: composite Simpson on a fixed grid in both V and phi.
double chi1_simpson(const ModelParams& p, int v_panels = 4000, int phi_panels = 2000);
/// eta -> infinity limit (Fermi factor dropped).
double chi1_limit(const ModelParams& p);

/// V beyond which exp(-V^2) < 1e-16.
double chi1_v_cutoff();

/// Integral of exp(-|v - v0|^2) over the velocity box, closed form.
double velocity_mass(const ModelParams& p);

/// Pointwise initial data.
double initial_rho_point(double x1, double x2, const ModelParams& p);
double initial_c_point(double x1, double x2);

/// c_L(t) exp(-a^2 x2^2)
double boundary_c(double t, double x2, const ModelParams& p);

struct SystemState {
  Field2D rho;
  Field2D C;
  Field2D I;
  double t = 0.0;
};

SystemState initial_state(const GridSpec& grid, const ModelParams& p, const QuadratureTables& q = quadrature());

/// Ghost layers: C from the boundary profile at x1 = 1 and zero elsewhere,
/// rho zero everywhere, I mirrored.
void fill_ghosts(SystemState& s, const GridSpec& grid, const ModelParams& p, const QuadratureTables& q = quadrature());
void fill_c_ghosts(Field2D& C, double t, const GridSpec& grid, const ModelParams& p, const QuadratureTables& q);

/// F = delta1 / (1 + Gamma1 C)^q1 grad C at every face node, from the linear
/// central reconstruction polynomial and its derivative. At each node the
/// values from the two cells sharing the face are averaged. C ghosts must be
/// filled.
AdvectionField force_field(const Field2D& C, const GridSpec& grid, const ModelParams& p,
                           const QuadratureTables& q = quadrature());

/// (1/pi) exp(-|v - v0|^2) rho
double lift_to_phase_space(double rho, std::array<double, 2> v, const ModelParams& p);

struct SchemeOptions {
  FluxKind flux = FluxKind::upwind;
  bool limiter = true;
  weno::Options weno{};
  SourceMode source_mode = SourceMode::nodal;
};

/// The (rho, C, I) system as one flat state [rho | C | I], each block x fastest.
class CoupledSystem {
 public:
  CoupledSystem(GridSpec grid, ModelParams params, SchemeOptions opt);

  const GridSpec& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  const SchemeOptions& options() const { return opt_; }
  double chi1() const { return chi1_; }
  std::size_t size() const { return 3 * grid_.cells(); }

  /// Step bookkeeping for the limiter and the Lax-Friedrichs flux.
  void set_step(double dt, double euler_dt);

  std::vector<double> pack(const SystemState& s) const;
  SystemState unpack(std::span<const double> u, double t) const;

  void rhs(double t, std::span<const double> u, std::span<double> out);

  /// Largest |F1|, |F2| over the face nodes and the largest diffusivity, for
  /// the step-size bound. On boundary faces only the outgoing part of the
  /// normal speed counts: the exterior rho state is zero, so an incoming
  /// speed there multiplies nothing.
  struct Speeds {
    double max_a = 0.0;
    double max_b = 0.0;
    double max_d = 0.0;
  };
  Speeds speeds(std::span<const double> u, double t);

 private:
  void load(std::span<const double> u, double t);

  GridSpec grid_;
  ModelParams params_;
  SchemeOptions opt_;
  double chi1_;
  BirthRate mu_;
  double dt_ = 0.0;
  double euler_dt_ = 0.0;

  SystemState work_;
  RhsWorkspace rho_ws_;
  RhsWorkspace c_ws_;
  weno::Reconstruction i_points_;
  std::vector<double> rho_rate_;
  std::vector<double> c_rate_;
  AdvectionField zero_adv_;
};

}  // namespace angio::model
