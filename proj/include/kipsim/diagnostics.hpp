#pragma once

#include <cstdint>
#include <vector>

#include "kipsim/nse.hpp"

namespace kipsim {

// Post-processing checks on recorded trajectories plus a few standalone
// structural probes (stationarity, plane-wave dispersion, 2D rotation).
// Everything here consumes the shared stencils from fields.hpp; nothing is
// re-discretized locally.

// Residuals of the moment balance laws along a stored record series.  Time
// derivatives are centered differences of the recorded columns (4th order
// where five uniformly spaced records are available, 2nd order for three or
// four), evaluated on the longest uniformly spaced prefix of the series; a
// trailing partial-step record is simply dropped.  Fewer than three records
// is a usage error (ConfigError).
struct ResidualSeries {
    std::vector<double> t;           // times where the centered stencil fits
    std::vector<double> x_residual;  // d<x>/dt minus the transport moment
    std::vector<double> p_residual;  // d<p>/dt minus the force moment
    std::vector<double> e_residual;  // dE/dt minus the power moment
    double max_x_residual = 0.0;
    double max_p_residual = 0.0;
    double max_e_residual = 0.0;
    // Largest magnitude of the predicted right-hand sides over the same
    // window, for relative reporting.  Zero when a source vanishes
    // identically (e.g. the power moment at constant diffusion).
    double x_scale = 0.0;
    double p_scale = 0.0;
    double e_scale = 0.0;
};

// Constant-diffusion balance laws:
//   d<x>/dt = int gamma grad Sigma / m,   d<p>/dt = -int rho grad V,
//   dE/dt   = 0.
// The transport moment is not <p>/m unless gamma = rho, which is exactly the
// point of checking it.
ResidualSeries ehrenfest_residuals(const std::vector<NseRecord>& records);

// Space/time-dependent-diffusion balance laws: the transport moment gains
// -int D f(rho) grad rho, the force moment gains -int f grad rho . grad
// Sigma dD/dx, and the power moment is -int f grad rho . grad Sigma dD/dt.
ResidualSeries variable_diffusion_residuals(const std::vector<NseRecord>& records);

// Plane-wave phase-rotation rate versus the prediction
//   omega = (hbar k^2 / 2m) * dgamma(A^2).
// Evolves psi0 = A exp(i k x) with k = wavenumber(mode) and regresses the
// unwrapped phase at node 0 against time (least squares).  Requires free
// flight: no external potential, zero bulk couplings, constant diffusion
// (ConfigError otherwise).  The record cadence must resolve the rotation
// (|omega| dt cadence < pi), or the unwrap aliases.
struct DispersionResult {
    double k = 0.0;
    double amplitude = 0.0;
    double omega_measured = 0.0;
    double omega_predicted = 0.0;
    double rel_error = 0.0;
    double max_amplitude_drift = 0.0;  // max relative |rho(probe) - A^2|
    bool amplitude_warning = false;    // drift above 1e-6: not a clean plane wave
};
DispersionResult dispersion_check(const NseProblem& p, double amplitude, int mode, double dt,
                                  double t_end, int cadence = 1);

// Stationary phase profiles: a time-independent Sigma_s solves both hydro
// equations iff the density is rebuilt from it through the entropic weight,
//   rho_s = kappa^{-1}(exp(Sigma_s / (m D) - beta')).
// Returns that density plus the continuity-equation residual max|drho/dt|
// evaluated at (rho_s, Sigma_s); small for genuine stationary profiles,
// order-one for anything else.  Constant positive diffusion required.
// Throws RangeError if the profile maps above the attainable density range.
struct StationaryCheck {
    RealField rho;              // density induced by the phase profile
    double max_residual = 0.0;  // max |drho/dt| over the grid
};
StationaryCheck stationary_residual(const NseProblem& p, const RealField& sigma_s,
                                    double beta_prime);

// Vorticity of the effective transport velocity u = (gamma/rho) grad Sigma/m
// on a periodic 2D grid:
//   omega_z = (1/m) [d_x(gamma/rho) d_y Sigma - d_y(gamma/rho) d_x Sigma].
// Identically zero whenever gamma = rho (the prefactor field is the constant
// 1), so rotation is a signature of nonlinear drift.
RealField vorticity_2d(const Grid2D& g, const RealField& rho, const RealField& sigma,
                       const EntropyModel& model, double mass);

// Closed form of the same quantity for the nonlinear inclusion drift
// gamma = rho (1 + kappa rho):
//   omega_z = (kappa/m) [d_x rho d_y Sigma - d_y rho d_x Sigma].
// Dual evaluation path for cross-checking vorticity_2d.
RealField vorticity_2d_eip(const Grid2D& g, const RealField& rho, const RealField& sigma,
                           double kappa_e, double mass);

// <L_z> = int rho (x d_y Sigma - y d_x Sigma) dx dy.
double angular_momentum_2d(const Grid2D& g, const RealField& rho, const RealField& sigma);

// Static-profile existence test for the phase-shift map with a
// space-dependent diffusion field: the shifted phase is single-valued iff
//   curl[D grad ln_kappa(rho)] = d_x(D d_y ln_kappa) - d_y(D d_x ln_kappa)
// vanishes.  Returns that curl field; `diffusion` is D sampled on the grid.
RealField gauge_condition_curl_2d(const Grid2D& g, const RealField& diffusion,
                                  const RealField& rho, const EntropyModel& model);

// Seeded smooth periodic fields for randomized structural checks: a mode-sum
// with 1/|j|^2 amplitude decay and uniform random coefficients in [-1, 1]
// from mt19937_64(seed), plus a constant offset.  Worst-case excursion from
// the offset is bounded by 2 * amplitude * sum of the mode weights, so
// offsets can be chosen to keep densities positive.
RealField random_smooth_field(const Grid1D& g, std::uint64_t seed, int n_modes, double amplitude,
                              double offset);
RealField random_smooth_field(const Grid2D& g, std::uint64_t seed, int n_modes, double amplitude,
                              double offset);

}  // namespace kipsim
