#include "kipsim/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace kipsim {

namespace {

Wavefunction apply_gauge_phase(const Wavefunction& w, const EntropyModel& model, double D,
                               double direction) {
    Wavefunction out = w;
    const double c = direction * w.mass * D / w.hbar;
    for (std::size_t i = 0; i < w.psi.size(); ++i) {
        double rho = std::norm(w.psi[i]);
        double theta = c * model.ln_kappa(std::max(rho, model.rho_floor()));
        out.psi[i] = w.psi[i] * std::polar(1.0, theta);
    }
    return out;
}

bool linear_drift(const EntropyModel& m) {
    return !(m.variant() == EntropyVariant::Eip && m.eip_drift() == EipDrift::Nonlinear);
}

double clamp0(double rho) { return rho > 0.0 ? rho : 0.0; }

}  // namespace

Wavefunction gauge_forward(const Wavefunction& psi, const EntropyModel& model, double D) {
    return apply_gauge_phase(psi, model, D, -1.0);
}

Wavefunction gauge_inverse(const Wavefunction& phi, const EntropyModel& model, double D) {
    return apply_gauge_phase(phi, model, D, +1.0);
}

TransformedNonlinearities transformed_nonlinearities(const NseProblem& p, const RealField& rho,
                                                     const RealField& grad_sigma) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    const double D = p.diffusion.max_value();
    TransformedNonlinearities out;
    out.W.assign(n, 0.0);
    out.Wcal.assign(n, 0.0);

    RealField grho(n), lrho(n);
    deriv1_into(g, rho.data(), grho.data());
    deriv2_into(g, rho.data(), lrho.data());

    const double c = p.mass * D * D;
    for (int i = 0; i < n; ++i) {
        double r = clamp0(rho[i]);
        out.W[i] = c * (p.model.f1(r) * lrho[i] + p.model.f2(r) * grho[i] * grho[i]) + p.G(r);
    }
    if (!linear_drift(p.model)) {
        const double kap = p.model.param_kappa();
        RealField tmp(n), div(n);
        for (int i = 0; i < n; ++i) {
            double r = clamp0(rho[i]);
            double ws = grad_sigma[i] / p.mass;
            tmp[i] = kap * r * r * ws;
            out.W[i] += 0.5 * p.mass * (p.model.dgamma(r) - 1.0) * ws * ws;
        }
        deriv1_into(g, tmp.data(), div.data());
        const double floor = p.model.rho_floor();
        for (int i = 0; i < n; ++i) {
            out.Wcal[i] = -0.5 * p.hbar * div[i] / (clamp0(rho[i]) + floor);
        }
    }
    return out;
}

double transformed_energy(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                          bool drop_u_bar) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    const double D = p.diffusion.max_value();
    RealField grho(n);
    deriv1_into(g, rho.data(), grho.data());
    const double floor = p.model.rho_floor();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = clamp0(rho[i]);
        double kinetic = 0.5 * grad_sigma[i] * grad_sigma[i] * p.model.gamma(r) / p.mass;
        double fisher = p.hbar * p.hbar * grho[i] * grho[i] / (8.0 * p.mass * (r + floor));
        double ubar = drop_u_bar
                          ? 0.0
                          : -0.5 * p.mass * D * D * p.model.f1(r) * grho[i] * grho[i];
        acc += kinetic + fisher + ubar + p.U_tilde(r) + p.potential.value(g.x[i]) * r;
    }
    return acc * g.spacing;
}

NseResult evolve_transformed(const NseProblem& p, const Wavefunction& phi0,
                             const NseRunOptions& opt, bool drop_u_bar) {
    if (!p.diffusion.is_constant()) {
        throw ConfigError("evolve_transformed: the transformed picture requires constant D");
    }
    PsiRhs rhs = [&p, drop_u_bar](double, const ComplexField& phi, ComplexField& out) {
        const Grid1D& g = p.grid;
        const int n = g.n;
        ComplexField dphi(n), lap(n);
        deriv1_into(g, phi.data(), dphi.data());
        deriv2_into(g, phi.data(), lap.data());
        RealField rho(n), gs(n);
        const double floor = p.model.rho_floor();
        for (int i = 0; i < n; ++i) {
            rho[i] = std::norm(phi[i]);
            gs[i] = p.hbar * std::imag(std::conj(phi[i]) * dphi[i]) / (rho[i] + floor);
        }
        TransformedNonlinearities nl = transformed_nonlinearities(p, rho, gs);
        if (drop_u_bar) {
            // Quantization of the drift-only continuity equation: the
            // density-only D^2 block is absent; rebuild W without it.
            for (int i = 0; i < n; ++i) {
                double r = clamp0(rho[i]);
                double base = p.G(r);
                if (!linear_drift(p.model)) {
                    double ws = gs[i] / p.mass;
                    base += 0.5 * p.mass * (p.model.dgamma(r) - 1.0) * ws * ws;
                }
                nl.W[i] = base;
            }
        }
        out.resize(n);
        const double kin = -0.5 * p.hbar * p.hbar / p.mass;
        const std::complex<double> minus_i_over_hbar(0.0, -1.0 / p.hbar);
        for (int i = 0; i < n; ++i) {
            std::complex<double> H =
                kin * lap[i] +
                std::complex<double>(nl.W[i] + p.potential.value(g.x[i]), nl.Wcal[i]) * phi[i];
            out[i] = minus_i_over_hbar * H;
        }
    };
    EnergyFn energy = [&p, drop_u_bar](double, const RealField& rho, const RealField& gs) {
        return transformed_energy(p, rho, gs, drop_u_bar);
    };
    return evolve_psi_with(p, phi0, opt, rhs, energy);
}

GaugeCheckResult gauge_check(const NseProblem& p, const Wavefunction& psi0,
                             const NseRunOptions& opt) {
    NseRunOptions o = opt;
    o.store_density = true;
    GaugeCheckResult result;
    result.original = evolve_nse(p, psi0, o);
    const double D = p.diffusion.max_value();
    Wavefunction phi0 = gauge_forward(psi0, p.model, D);
    result.transformed = evolve_transformed(p, phi0, o, false);

    std::size_t frames =
        std::min(result.original.density_frames.size(), result.transformed.density_frames.size());
    for (std::size_t k = 0; k < frames; ++k) {
        const RealField& a = result.original.density_frames[k];
        const RealField& b = result.transformed.density_frames[k];
        double linf = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            linf = std::max(linf, std::fabs(a[i] - b[i]));
        }
        result.t.push_back(result.original.records[k].t);
        result.linf.push_back(linf);
        result.max_linf = std::max(result.max_linf, linf);
    }
    return result;
}

double dg_kbar(double hbar, double mass, double D) {
    double s = 2.0 * mass * D / hbar;
    if (!(s < 1.0)) {
        throw ConfigError("dg_kbar: need 2 m D / hbar < 1 (got " + std::to_string(s) +
                          "); the linearizing map is undefined");
    }
    return hbar * std::sqrt(1.0 - s * s);
}

Wavefunction dg_linearize(const Wavefunction& phi, double D) {
    double kbar = dg_kbar(phi.hbar, phi.mass, D);
    HydroPair h = polar_decompose(phi);
    h.hbar = kbar;  // compose reads the phase scale from the pair
    Wavefunction chi = polar_compose(h);
    chi.hbar = kbar;
    return chi;
}

DgChainResult dg_chain(const NseProblem& p, const Wavefunction& psi0, const NseRunOptions& opt) {
    if (p.model.variant() != EntropyVariant::BoltzmannGibbs) {
        throw ConfigError("dg_chain: the linearization chain is defined for the log model");
    }
    const double D = p.diffusion.max_value();
    NseRunOptions o = opt;
    o.store_density = true;

    DgChainResult result;
    result.canonical = evolve_nse(p, psi0, o);

    Wavefunction phi0 = gauge_forward(psi0, p.model, D);
    result.transformed = evolve_transformed(p, phi0, o, false);

    Wavefunction chi0 = dg_linearize(phi0, D);
    NseProblem lin = p;
    lin.hbar = chi0.hbar;
    lin.diffusion = Diffusion::constant(0.0);
    lin.g_coeffs.clear();
    result.linear = evolve_nse(lin, chi0, o);

    std::size_t frames = std::min({result.canonical.density_frames.size(),
                                   result.transformed.density_frames.size(),
                                   result.linear.density_frames.size()});
    for (std::size_t k = 0; k < frames; ++k) {
        const RealField& a = result.canonical.density_frames[k];
        const RealField& b = result.transformed.density_frames[k];
        const RealField& c = result.linear.density_frames[k];
        double ab = 0.0, bc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            ab = std::max(ab, std::fabs(a[i] - b[i]));
            bc = std::max(bc, std::fabs(b[i] - c[i]));
        }
        result.t.push_back(result.canonical.records[k].t);
        result.linf_ab.push_back(ab);
        result.linf_bc.push_back(bc);
    }
    if (frames > 0) {
        const RealField& b = result.transformed.density_frames[frames - 1];
        const RealField& c = result.linear.density_frames[frames - 1];
        double acc = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            double d = b[i] - c[i];
            acc += d * d;
        }
        result.l2_bc_final = std::sqrt(acc * p.grid.spacing);
    }
    return result;
}

}  // namespace kipsim
