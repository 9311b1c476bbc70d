#pragma once

#include "kipsim/nse.hpp"

namespace kipsim {

// State-dependent phase transformation phi = psi exp(-(i/hbar) m D ln kappa(rho)).
// Pointwise modulus-preserving (|phi| = |psi| exactly), but state-dependent:
// it is treated as a nonlinear change of variables throughout, never as an
// inner-product-preserving map between different states.
Wavefunction gauge_forward(const Wavefunction& psi, const EntropyModel& model, double D);
Wavefunction gauge_inverse(const Wavefunction& phi, const EntropyModel& model, double D);

// Nonlinearities of the transformed picture, evaluated from (rho, grad sigma):
//   Wt   = (m/2)(gamma' - 1) wt^2 + m D^2 [f1 Lap rho + f2 (grad rho)^2] + G
//   Wct  = -(hbar/2 rho) div{[gamma - rho] wt},     wt = grad sigma / m.
// For linear-drift models Wct vanishes identically and Wt is a purely real
// density-only nonlinearity (f1, f2 reduce to their rho-weighted variants).
struct TransformedNonlinearities {
    RealField W;
    RealField Wcal;
};
TransformedNonlinearities transformed_nonlinearities(const NseProblem& p, const RealField& rho,
                                                     const RealField& grad_sigma);

// Energy of the transformed picture:
//   E = int[ (grad s)^2 gamma / 2m + hbar^2 (grad rho)^2 / 8m rho
//            - (m D^2/2) f1(rho) (grad rho)^2 + U_tilde + V rho ] dx.
// drop_u_bar removes the f1 gradient term, giving the potential of the
// drift-only quantization; the difference between the two assemblies is the
// density-only bookkeeping term -(m D^2/2) f1 (grad rho)^2.
double transformed_energy(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                          bool drop_u_bar);

// RK4 evolution of the transformed equation
//   i hbar phi_t = -(hbar^2/2m) Lap phi + [Wt + i Wct] phi + V phi.
// With drop_u_bar the density-only D^2 block of Wt is omitted as well,
// which is the equation produced by quantizing the drift-only continuity
// equation directly (an A/B test of the two potential conventions).
NseResult evolve_transformed(const NseProblem& p, const Wavefunction& phi0,
                             const NseRunOptions& opt, bool drop_u_bar = false);

// Dual evolution: the same physical state evolved in the original picture
// (evolve_nse) and, gauge-transformed, in the transformed picture; densities
// compared at record times.
struct GaugeCheckResult {
    NseResult original;
    NseResult transformed;
    std::vector<double> t;
    std::vector<double> linf;  // max_x |rho_psi - rho_phi| per record
    double max_linf = 0.0;
};
GaugeCheckResult gauge_check(const NseProblem& p, const Wavefunction& psi0,
                             const NseRunOptions& opt);

// Reduced Planck scale of the linearized picture, kbar = hbar sqrt(1 - (2mD/hbar)^2).
// Defined only for 2mD/hbar < 1.
double dg_kbar(double hbar, double mass, double D);

// Phase rescaling chi = rho^(1/2) exp(i sigma / kbar) mapping the transformed
// diffusive equation (linear-drift log model) onto the free linear equation
// with hbar -> kbar.  Requires a node-free state (phase is unwrapped).
Wavefunction dg_linearize(const Wavefunction& phi, double D);

// Three-way chain at matched record times, log model with gamma = rho:
//   A: canonical picture  (complex nonlinearity, evolve_nse)
//   B: transformed picture (density-only nonlinearity, evolve_transformed)
//   C: linearized picture  (linear equation at hbar = kbar)
// All three densities must track each other; the result carries the pairwise
// discrepancy series.
struct DgChainResult {
    NseResult canonical;
    NseResult transformed;
    NseResult linear;
    std::vector<double> t;
    std::vector<double> linf_ab;  // |rho_A - rho_B|_inf per record
    std::vector<double> linf_bc;  // |rho_B - rho_C|_inf per record
    double l2_bc_final = 0.0;     // L2 density error B vs C at t_end
};
DgChainResult dg_chain(const NseProblem& p, const Wavefunction& psi0, const NseRunOptions& opt);

}  // namespace kipsim
