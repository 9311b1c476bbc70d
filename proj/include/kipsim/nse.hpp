#pragma once

#include <functional>
#include <vector>

#include "kipsim/entropy.hpp"
#include "kipsim/fields.hpp"
#include "kipsim/potential.hpp"

namespace kipsim {

// Quantum evolution problem: i hbar psi_t = -(hbar^2/2m) Lap psi
//                                           + [W + i Wcal] psi + V psi,
// where the complex nonlinearity is assembled from the entropy model's
// drift gamma(rho) and diffusion f(rho), plus an optional polynomial
// self-interaction G(rho) = sum_j g_coeffs[j] * rho^(j+1).
struct NseProblem {
    Grid1D grid;
    EntropyModel model;
    Potential potential;
    Diffusion diffusion = Diffusion::constant(0.0);
    std::vector<double> g_coeffs;
    double hbar = 1.0;
    double mass = 1.0;

    double G(double rho) const;        // dU_tilde/drho
    double U_tilde(double rho) const;  // sum_j g[j] rho^(j+2)/(j+2)
};

// Real part of the nonlinearity at time t (t only matters for variable D):
//   W = (m/2)(gamma' - 1) w^2 + m f(rho) div(D w) + G(rho),   w = grad Sigma / m.
RealField nonlinearity_W(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                         double t);

// Imaginary part:
//   Wcal = -(hbar/2 rho) div{[gamma - rho] w} + (hbar/2 rho) div[D f(rho) grad rho].
// The first bracket vanishes identically for linear-drift models and is
// skipped there rather than evaluated as a difference of near-equal fields.
RealField nonlinearity_Wcal(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                            double t);

// psi-representation right-hand side dpsi/dt; grad Sigma is recovered from
// psi itself via phase_gradient, so no unwrapping is involved.
ComplexField nse_rhs_psi(const NseProblem& p, const ComplexField& psi, double t);

// Hydrodynamic right-hand side for the pair (rho, Sigma):
//   drho/dt   = -div[ gamma(rho) grad Sigma / m - D f(rho) grad rho ]
//   dSigma/dt = -[ gamma'(rho) (grad Sigma)^2 / 2m + U_q
//                  + m f(rho) div(D grad Sigma / m) + G + V ]
void hydro_rhs(const NseProblem& p, const RealField& rho, const RealField& sigma, double t,
               RealField& drho, RealField& dsigma);

// Hamiltonian energy
//   E = int[ (grad S)^2 gamma / 2m + hbar^2 (grad rho)^2 / 8m rho
//            - D f(rho) grad rho . grad S + U_tilde(rho) + V rho ] dx,
// with D = D(t, x) under the integral when the diffusion varies.
double hamiltonian_energy(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                          double t);

enum class Representation { Psi, Hydro };

struct NseRecord {
    double t = 0.0;
    double norm = 0.0;       // int rho
    double x_mean = 0.0;     // int x rho
    double p_mean = 0.0;     // int rho grad Sigma
    double energy = 0.0;
    double boundary_density = 0.0;
    // Moments consumed by the Ehrenfest residual post-processing:
    double drift_mean = 0.0;  // int gamma(rho) grad Sigma / m   = <(gamma/rho) u_drift>
    double fext_mean = 0.0;   // -int rho grad V                 = <F_ext>
    double diff_mean = 0.0;   // int D f(rho) grad rho           = <D f grad ln rho>
    double a_dt_mean = 0.0;   // int f grad rho . grad Sigma dD/dt   = m <A dD/dt>
    double a_dx_mean = 0.0;   // int f grad rho . grad Sigma dD/dx   = m <A dD/dx>
    // State sample at the probe node (phase-tracking diagnostics).
    std::complex<double> psi_probe{0.0, 0.0};
};

struct NseRunOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    int cadence = 10;
    Representation representation = Representation::Psi;
    bool check_nodes = true;      // reject interior nodes at record times
    bool store_density = false;   // keep a density frame per record
    int probe_node = -1;          // fill psi_probe from this node when >= 0
};

struct NseResult {
    ComplexField psi;   // final state (composed from (rho, sigma) on the hydro path)
    RealField rho;
    RealField sigma;    // unwrapped phase (hydro path) or empty (psi path)
    std::vector<NseRecord> records;
    std::vector<RealField> density_frames;  // filled when store_density is set
    long steps = 0;
};

// Explicit RK4 in the requested representation.  Prechecks the dispersive
// bound dt <= 0.2 m dx^2 / hbar and, when D > 0, the diffusive bound
// dt <= 0.2 dx^2 / (D max f); re-monitors the diffusive bound at record
// times as the density range evolves.
NseResult evolve_nse(const NseProblem& p, const Wavefunction& psi0, const NseRunOptions& opt);
NseResult evolve_nse_hydro(const NseProblem& p, const HydroPair& h0, const NseRunOptions& opt);

double nse_stable_dt(const NseProblem& p, double rho_lo, double rho_hi);

// Shared RK4 driver over an arbitrary psi-space right-hand side; used by the
// gauge-transformed and linearized evolutions so every psi integration goes
// through one stepping/recording path.  rhs(t, psi, out) writes dpsi/dt;
// energy(t, rho, grad_sigma) supplies the record's energy column.
using PsiRhs = std::function<void(double, const ComplexField&, ComplexField&)>;
using EnergyFn = std::function<double(double, const RealField&, const RealField&)>;
NseResult evolve_psi_with(const NseProblem& p, const Wavefunction& psi0, const NseRunOptions& opt,
                          const PsiRhs& rhs, const EnergyFn& energy);

}  // namespace kipsim
