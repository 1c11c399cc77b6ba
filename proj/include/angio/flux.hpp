#pragma once

#include <optional>
#include <span>
#include <vector>

#include "angio/grid.hpp"
#include "angio/reconstruct.hpp"
#include "angio/weno.hpp"

namespace angio {

enum class FluxKind { upwind, lax_friedrichs };

/// a u^- for a >= 0, a u^+ otherwise.
double upwind_flux(double a, double u_minus, double u_plus);
/// (a/2)(u^- + u^+) + (1/2)(dx/dt)(u^- - u^+).
double lax_friedrichs_flux(double a, double u_minus, double u_plus, double dx_over_dt);
double numerical_flux(FluxKind kind, double a, double u_minus, double u_plus, double dx_over_dt);

/// Advection speeds sampled at the 15 quadrature nodes of every face.
/// x face f (0..Nx) sits at x = f dx between cells f-1 and f; its nodes are
/// (f dx + gl3[beta] dx, y_j + t5[alpha] dy), stored [alpha][beta]. y faces
/// mirror this with the roles of x and y swapped.
struct AdvectionField {
  int nx = 0;
  int ny = 0;
  std::vector<double> a;  // (nx + 1) * ny * 15
  std::vector<double> b;  // nx * (ny + 1) * 15
  bool zero = true;

  AdvectionField() = default;
  AdvectionField(int nx_, int ny_);

  double* a_face(int f, int j) { return a.data() + 15 * (static_cast<std::size_t>(j) * (nx + 1) + f); }
  const double* a_face(int f, int j) const { return a.data() + 15 * (static_cast<std::size_t>(j) * (nx + 1) + f); }
  double* b_face(int i, int f) { return b.data() + 15 * (static_cast<std::size_t>(f) * nx + i); }
  const double* b_face(int i, int f) const { return b.data() + 15 * (static_cast<std::size_t>(f) * nx + i); }

  double max_abs_a() const;
  double max_abs_b() const;
};

AdvectionField zero_advection(const GridSpec& grid);
AdvectionField sample_advection(const GridSpec& grid, const ScalarFunction& a, const ScalarFunction& b,
                                const QuadratureTables& q = quadrature());

/// sum_alpha sum_beta w~_alpha w_beta fhat(a, u^-, u^+) over one face patch;
/// all spans hold 15 values laid out [alpha][beta].
double interface_flux_sum(std::span<const double> u_minus, std::span<const double> u_plus,
                          std::span<const double> a, const QuadratureTables& q, FluxKind kind,
                          double dx_over_dt);

/// Double-average diffusion operator from centre-line point values:
/// d/dx^2 sum_a w~_a [u(x_{i+1}) - 2 u(x_i) + u(x_{i-1})](y~^a) plus the y analogue.
double diffusion_term(std::span<const double> x_left, std::span<const double> x_mid,
                      std::span<const double> x_right, std::span<const double> y_down,
                      std::span<const double> y_mid, std::span<const double> y_up, double d,
                      const GridSpec& grid, const QuadratureTables& q);

/// 5x5 tensor quadrature of point values h[alpha * 5 + beta].
double source_term(std::span<const double> h, const QuadratureTables& q);

enum class SourceMode { nodal, cell_average };

/// Reaction h = rate * u + forcing. In nodal mode both spans hold 25 values per
/// interior cell (tensor nodes, [alpha x][beta y]) and u is the reconstructed
/// point value; in cell-average mode they hold one value per cell and u is the
/// double average. Empty spans mean zero.
struct SourceTerms {
  std::span<const double> rate;
  std::span<const double> forcing;
  SourceMode mode = SourceMode::nodal;
};

struct RhsOptions {
  FluxKind flux = FluxKind::upwind;
  bool limiter = true;
  weno::Options weno{};
  /// Current step; only the Lax-Friedrichs flux reads it.
  double dt = 0.0;
  /// Forward-Euler step the limiter must keep nonnegative (dt / ssp factor).
  /// Zero keeps only the point-value bound.
  double euler_dt = 0.0;
};

/// Coefficient o_k >= 0 with which each of a cell's own reconstructed values
/// enters the right-hand side negatively (the RHS is >= -sum_k o_k u_k plus
/// nonnegative neighbour and production terms).
struct OutflowWeights {
  double x_lo[15];
  double x_hi[15];
  double y_lo[15];
  double y_hi[15];
  double tensor[25];
  double y_center[5];
  /// Coefficient on the cell average itself (cell-average source mode).
  double cell;
};

OutflowWeights outflow_weights(int i, int j, const AdvectionField& adv, double d, const SourceTerms& src,
                               const GridSpec& grid, const RhsOptions& opt, const QuadratureTables& q);

/// Scales the cell's reconstructed values about avg so that all are
/// nonnegative and, when weights are given, avg - euler_dt * sum_k o_k u_k >= 0.
/// Only the families in `targets` are touched. Returns the scaling factor.
double limit_cell(weno::CellPoints& c, unsigned targets, double avg, const OutflowWeights* w, double euler_dt);

/// Reconstruction targets spatial_rhs needs for the given operator.
unsigned rhs_targets(const AdvectionField& adv, double d, const SourceTerms& src);

struct RhsWorkspace {
  weno::Reconstruction recon;
  std::vector<double> x_flux;  // (nx + 1) * ny
  std::vector<double> y_flux;  // nx * (ny + 1)
};

/// First half of spatial_rhs: raw (unlimited) point values into ws.recon.
void reconstruct_for_rhs(const Field2D& u, unsigned targets, const RhsOptions& opt, RhsWorkspace& ws);

/// Second half: limiter, fluxes and assembly from the raw values left in
/// ws.recon by reconstruct_for_rhs with targets = rhs_targets(adv, d, src).
void assemble_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                  const GridSpec& grid, const RhsOptions& opt, RhsWorkspace& ws, std::span<double> out);

/// Semi-discrete right-hand side d(u_bar)/dt on the interior cells, x fastest.
/// Ghost layers of u must be filled. After the call ws.recon holds the
/// (limited) point values used.
void spatial_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                 const GridSpec& grid, const RhsOptions& opt, RhsWorkspace& ws, std::span<double> out);

std::vector<double> spatial_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                                const GridSpec& grid, const RhsOptions& opt = {});

/// Largest step keeping the scheme inside its positivity bounds:
///   dt (1/dx + 1/dy) max(|a|, |b|) <= 1e-2,   dt (1/dx^2 + 1/dy^2) d <= 8e-2,
/// scaled by ssp_factor. nullopt when both coefficients vanish.
std::optional<double> cfl_max_dt(double max_abs_a, double max_abs_b, double d, const GridSpec& grid,
                                 double ssp_factor);

inline constexpr double kAdvectionCfl = 1e-2;
inline constexpr double kDiffusionCfl = 8e-2;

namespace reference {

/// All point families of one cell, rebuilt from scratch with the scalar
/// reconstruct_point API.
weno::CellPoints cell_points(const Field2D& u, int i, int j, unsigned targets, const weno::Options& opt);

/// Serial, unshared implementation of spatial_rhs kept for testing and
/// benchmarking the parallel kernel.
std::vector<double> spatial_rhs(const Field2D& u, const AdvectionField& adv, double d, const SourceTerms& src,
                                const GridSpec& grid, const RhsOptions& opt);

}  // namespace reference

}  // namespace angio
