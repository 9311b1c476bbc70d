#pragma once

#include <string>

#include "kipsim/grid.hpp"

namespace kipsim {

// Periodic 4th-order central finite differences.  This is the single
// derivative path used everywhere a gradient or Laplacian of a sampled field
// is needed; solvers and diagnostics must not mix discretizations.

// order = 1 (gradient) or 2 (Laplacian); anything else is a usage error.
RealField spatial_derivative(const Grid1D& g, const RealField& field, int order);
ComplexField spatial_derivative(const Grid1D& g, const ComplexField& field, int order);

// In-place variants used by the steppers (out must be presized to g.n).
void deriv1_into(const Grid1D& g, const double* f, double* out);
void deriv2_into(const Grid1D& g, const double* f, double* out);
void deriv1_into(const Grid1D& g, const std::complex<double>* f, std::complex<double>* out);
void deriv2_into(const Grid1D& g, const std::complex<double>* f, std::complex<double>* out);

// Riemann sum; on a uniform periodic grid this coincides with the trapezoid
// rule and integrates derivatives of periodic fields to exactly zero.
double integrate(const Grid1D& g, const RealField& field);

// 2D partials along x / y (4th-order, periodic), row-major fields.
RealField partial_x(const Grid2D& g, const RealField& field);
RealField partial_y(const Grid2D& g, const RealField& field);
double integrate(const Grid2D& g, const RealField& field);

struct Wavefunction {
    Grid1D grid;
    ComplexField psi;
    double hbar = 1.0;
    double mass = 1.0;
};

struct HydroPair {
    Grid1D grid;
    RealField rho;    // density, non-negative
    RealField sigma;  // action-valued phase; psi = sqrt(rho) exp(i sigma/hbar)
    double hbar = 1.0;
    double mass = 1.0;
};

// Polar (Madelung) decomposition.  The phase is unwrapped by accumulating
// nearest-node phase increments starting at the density maximum, so the
// round trip compose(decompose(psi)) is exact to roundoff.  Throws
// DecompositionError if the density support (rho >= floor) is not a single
// periodic arc: a vanishing density inside the support leaves the phase
// undefined there.
HydroPair polar_decompose(const Wavefunction& w, double rho_floor = 1e-12);
Wavefunction polar_compose(const HydroPair& h);

// Number of up/down crossings of `threshold` around the periodic grid.
// 0 means one-signed everywhere; 2 is a single support arc; more than 2
// signals an interior node (density vanishing inside the support).
int support_transitions(const RealField& rho, double threshold);

// Quantum potential U_q = -(hbar^2 / 2m) (Lap sqrt(rho)) / sqrt(rho),
// evaluated with the shared stencils; divisions floor at rho_floor.
RealField quantum_potential(const Grid1D& g, const RealField& rho, double hbar, double mass,
                            double rho_floor = 1e-12);

// Phase gradient via hbar * Im(psi* psi') / (rho + floor).  The additive
// regularization keeps the field smooth through near-vacuum regions (a hard
// max() would put stencil kinks exactly where tails meet the floor); inside
// the support the relative error is floor/rho.  No unwrapping step.
RealField phase_gradient(const Wavefunction& w, double rho_floor = 1e-12);

// Snapshot export: '#'-prefixed metadata, then one row per node with columns
// x, re_psi, im_psi, rho, sigma.  Deterministic formatting (%.17g).
std::string snapshot_csv(const Wavefunction& w);
std::string snapshot_csv(const HydroPair& h);

}  // namespace kipsim
