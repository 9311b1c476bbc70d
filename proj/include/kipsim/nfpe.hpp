#pragma once

#include <vector>

#include "kipsim/entropy.hpp"
#include "kipsim/fields.hpp"
#include "kipsim/potential.hpp"

namespace kipsim {

// Nonlinear Fokker-Planck (position-space) problem:
//
//   d rho / dt = -div[ u_drift gamma(rho) - D f(rho) grad rho ],
//   u_drift = -D beta grad V.
//
// Discretized in divergence form: fluxes are built at cell faces and then
// differenced, so the discrete mass integral is conserved exactly.  Each face
// carries J = u gamma - D f grad rho with gamma and f averaged to the face as
// chord means and the drift taken from potential differences.  Two structural
// consequences: the kappa-inverse equilibrium construction is the exact
// discrete fixed point (every face flux vanishes identically there, the wrap
// face included), and the free energy decreases monotonically in semi-discrete
// time.  Faces touching near-vacuum cells use the donor cell's gamma, so
// degenerate-diffusion fronts never drain an empty cell.
struct NfpeProblem {
    Grid1D grid;
    EntropyModel model;
    Potential potential;
    double diffusion = 0.1;
    double beta = 1.0;
};

// Time derivative of rho.  Negative densities below the floor are treated as
// vacuum; the result telescopes to zero total mass change by construction.
RealField nfpe_rhs(const NfpeProblem& p, const RealField& rho);

// F[rho] = int dx int_0^rho ln kappa(r) dr + beta int V rho dx.
// The inner integral is evaluated per node by adaptive Simpson quadrature in
// log-density space, from the floor up (the [0, floor] sliver is dropped; it
// is below the resolution of the H-theorem checks).
double free_energy(const NfpeProblem& p, const RealField& rho);

// kappa^{-1}(exp(logy)) with the two out-of-range branches classified: logy at
// or below the attainable range of ln kappa gives 0 (vacuum), at or above the
// upper end gives +infinity (diverging branch).
double density_from_log_weight(const EntropyModel& model, double logy);

// rho_eq(x) = kappa^{-1}(exp(-beta V(x) - beta_prime)) with beta_prime fixed
// by bisection so the grid mass is 1 to 1e-10.  Arguments that fall below the
// attainable range of kappa give vacuum (compact-support equilibria); a
// diverging branch (e.g. bosonic EIP near condensation) is treated as
// infinite mass by the bisection.  Throws NumericError when no normalizable
// equilibrium exists in the bracket.
RealField equilibrium_density(const EntropyModel& model, const Grid1D& grid,
                              const Potential& potential, double beta,
                              double* beta_prime_out = nullptr);

struct NfpeRecord {
    double t = 0.0;
    double mass = 0.0;
    double free_energy = 0.0;
    double min_rho = 0.0;
    double boundary_density = 0.0;
    double l2_to_reference = 0.0;  // populated when a reference is supplied
};

struct NfpeResult {
    RealField rho;
    std::vector<NfpeRecord> records;
    long steps = 0;
};

struct NfpeRunOptions {
    double dt = 1e-4;
    double t_end = 1.0;
    int cadence = 10;               // record every this many steps
    bool record_free_energy = true;
    const RealField* reference = nullptr;  // optional L2 comparison target
};

// Explicit RK4 with the diffusive stability precheck
// dt <= 0.2 spacing^2 / (D max f) over the initial density range; the same
// bound is re-monitored at record times as the density range evolves.
NfpeResult evolve_nfpe(const NfpeProblem& p, const RealField& rho0, const NfpeRunOptions& opt);

// Stability-bound helper shared by the precheck and scenario validation.
double nfpe_stable_dt(const NfpeProblem& p, double rho_lo, double rho_hi);

}  // namespace kipsim
