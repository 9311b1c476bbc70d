#pragma once

#include <string>
#include <utility>

#include "kipsim/errors.hpp"

namespace kipsim {

// Generalized-entropy catalog.
//
// Each model is defined by its deformed logarithm ln kappa(rho); everything a
// solver needs is derived from that single function and the drift coefficient
// gamma(rho):
//
//   f(rho)   = gamma(rho) * d ln kappa / d rho      (diffusion coefficient)
//   ft(rho)  = rho * d ln kappa / d rho             (linear-drift variant)
//   f1(rho)  = gamma(rho) * (d ln kappa / d rho)^2  (transformed-picture
//   f2(rho)  = (1/2) d f1 / d rho                    coefficients; f1t/f2t are
//                                                    the gamma = rho variants)
//   F(rho)   = integral of f                        (drift antiderivative)
//
// The catalog carries the concrete families the solvers support.  Analytic
// derivatives are exact; the printed closed forms for special cases live in
// the tests as independent oracles.

enum class EntropyVariant { BoltzmannGibbs, TwoParam, Tsallis, Kaniadakis, Eip };

// Drift choice for the exclusion-inclusion (EIP) family: the interpolation
// freedom can be spent to keep the drift linear (gamma = rho, nonlinearity in
// the diffusion) or the diffusion constant (gamma = rho(1 + kappa rho)).
enum class EipDrift { Linear, Nonlinear };

class EntropyModel {
public:
    static EntropyModel boltzmann_gibbs();
    // Two-parameter deformed logarithm; requires |kappa_d| < 1 + r.
    static EntropyModel two_param(double kappa_d, double r);
    static EntropyModel tsallis(double q);
    static EntropyModel kaniadakis(double kappa_d);
    static EntropyModel eip(double kappa_e, EipDrift drift);

    EntropyVariant variant() const { return variant_; }
    EipDrift eip_drift() const { return drift_; }
    std::string name() const;

    double rho_floor() const { return rho_floor_; }
    void set_rho_floor(double floor);

    // Deformed logarithm and its exact derivatives.  rho must be positive;
    // values in (0, rho_floor) are evaluated at the floor.
    double ln_kappa(double rho) const;
    double dln_kappa(double rho) const;
    double d2ln_kappa(double rho) const;

    // Drift coefficient gamma(rho) and derivative; gamma(0) = 0.
    double gamma(double rho) const;
    double dgamma(double rho) const;

    double f(double rho) const;
    double f_tilde(double rho) const;
    double f1(double rho) const;
    double f2(double rho) const;
    double f1_tilde(double rho) const;
    double f2_tilde(double rho) const;
    // Antiderivative of f with F(rho -> 0) finite, fixed by F(0) = 0 where
    // the limit exists (all cataloged families).
    double f_antiderivative(double rho) const;

    // Inverse of kappa(rho) = exp(ln_kappa(rho)).  Closed form for BG and
    // EIP, guarded bisection on the monotone ln_kappa otherwise.  Throws
    // RangeError when y is outside the range of kappa over the admissible
    // interval.
    double kappa_inverse(double y) const;

    // Largest interval on which d ln kappa / d rho > 0, determined at
    // construction.  Scenario validation requires the working density range
    // to sit inside it.
    double rho_valid_lo() const { return valid_lo_; }
    double rho_valid_hi() const { return valid_hi_; }

    // Range of ln kappa over the admissible densities, as [lo, hi]; entries
    // are +-inf where the map is unbounded.  Used by equilibrium construction
    // to classify out-of-range Boltzmann arguments as vacuum or divergence.
    std::pair<double, double> ln_kappa_range() const;

    // Model parameters (meaning depends on the variant).
    double param_kappa() const { return kappa_; }
    double param_r() const { return r_; }
    double param_q() const { return q_; }

private:
    EntropyModel() = default;

    double floored(double rho) const;
    void classify_validity();

    EntropyVariant variant_ = EntropyVariant::BoltzmannGibbs;
    EipDrift drift_ = EipDrift::Linear;
    double kappa_ = 0.0;   // two_param / kaniadakis kappa_d, eip kappa_e
    double r_ = 0.0;       // two_param r
    double q_ = 1.0;       // tsallis q
    double rho_floor_ = 1e-12;
    double valid_lo_ = 0.0;
    double valid_hi_ = 0.0;
    // Two-parameter power-law coefficients, precomputed.
    double ap_ = 0.0, am_ = 0.0;  // f = ap rho^{r+k} - am rho^{r-k}
    bool small_kappa_ = false;    // |kappa_d| < 1e-6: use the analytic limit
    bool small_q_ = false;        // |q - 1| < 1e-6: use the BG limit
};

// Evaluator bundle for a model, as consumed by the solvers.  Construction
// revalidates the parameter set and fails with ConfigError on a model whose
// admissible interval does not cover [lo, hi].
struct DerivedFunctionals {
    EntropyModel model;
    DerivedFunctionals(const EntropyModel& m, double lo, double hi);
};

}  // namespace kipsim
