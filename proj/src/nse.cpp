#include "kipsim/nse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kipsim {

namespace {

constexpr double kNodeThreshold = 1e-10;

bool linear_drift(const EntropyModel& m) {
    return !(m.variant() == EntropyVariant::Eip && m.eip_drift() == EipDrift::Nonlinear);
}

double clamp0(double rho) { return rho > 0.0 ? rho : 0.0; }

}  // namespace

double NseProblem::G(double rho) const {
    double acc = 0.0, p = rho;
    for (double c : g_coeffs) {
        acc += c * p;
        p *= rho;
    }
    return acc;
}

double NseProblem::U_tilde(double rho) const {
    double acc = 0.0, p = rho * rho;
    for (std::size_t j = 0; j < g_coeffs.size(); ++j) {
        acc += g_coeffs[j] * p / static_cast<double>(j + 2);
        p *= rho;
    }
    return acc;
}

RealField nonlinearity_W(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                         double t) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    RealField dw(n), w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = p.diffusion.value(t, g.x[i]) * grad_sigma[i] / p.mass;
    }
    deriv1_into(g, w.data(), dw.data());  // div(D w)

    RealField out(n);
    const bool drift_term = !linear_drift(p.model);
    const double floor = p.model.rho_floor();
    for (int i = 0; i < n; ++i) {
        double r = clamp0(rho[i]);
        double val = p.mass * p.model.f(std::max(r, floor)) * dw[i] + p.G(r);
        if (drift_term) {
            double ws = grad_sigma[i] / p.mass;
            val += 0.5 * p.mass * (p.model.dgamma(r) - 1.0) * ws * ws;
        }
        out[i] = val;
    }
    return out;
}

RealField nonlinearity_Wcal(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                            double t) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    const double floor = p.model.rho_floor();
    RealField out(n, 0.0);
    RealField tmp(n), div(n);

    if (!linear_drift(p.model)) {
        // gamma - rho = kappa rho^2 for the inclusion/exclusion drift: form it
        // directly instead of subtracting near-equal fields.
        const double kap = p.model.param_kappa();
        for (int i = 0; i < n; ++i) {
            double r = clamp0(rho[i]);
            tmp[i] = kap * r * r * grad_sigma[i] / p.mass;
        }
        deriv1_into(g, tmp.data(), div.data());
        for (int i = 0; i < n; ++i) {
            out[i] = -0.5 * p.hbar * div[i] / (clamp0(rho[i]) + floor);
        }
    }

    if (p.diffusion.max_value() > 0.0) {
        RealField drho(n);
        deriv1_into(g, rho.data(), drho.data());
        for (int i = 0; i < n; ++i) {
            tmp[i] = p.diffusion.value(t, g.x[i]) * p.model.f(clamp0(rho[i])) * drho[i];
        }
        deriv1_into(g, tmp.data(), div.data());
        for (int i = 0; i < n; ++i) {
            out[i] += 0.5 * p.hbar * div[i] / (clamp0(rho[i]) + floor);
        }
    }
    return out;
}

ComplexField nse_rhs_psi(const NseProblem& p, const ComplexField& psi, double t) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    if (static_cast<int>(psi.size()) != n) {
        throw ConfigError("nse_rhs_psi: field size does not match grid");
    }
    ComplexField dpsi(n), lap(n);
    deriv1_into(g, psi.data(), dpsi.data());
    deriv2_into(g, psi.data(), lap.data());

    RealField rho(n), gs(n);
    const double floor = p.model.rho_floor();
    for (int i = 0; i < n; ++i) {
        rho[i] = std::norm(psi[i]);
        gs[i] = p.hbar * std::imag(std::conj(psi[i]) * dpsi[i]) / (rho[i] + floor);
    }

    RealField W = nonlinearity_W(p, rho, gs, t);
    RealField Wc = nonlinearity_Wcal(p, rho, gs, t);

    ComplexField out(n);
    const double kin = -0.5 * p.hbar * p.hbar / p.mass;
    const std::complex<double> minus_i_over_hbar(0.0, -1.0 / p.hbar);
    for (int i = 0; i < n; ++i) {
        std::complex<double> H = kin * lap[i] +
                                 std::complex<double>(W[i] + p.potential.value(g.x[i]), Wc[i]) *
                                     psi[i];
        out[i] = minus_i_over_hbar * H;
    }
    return out;
}

void hydro_rhs(const NseProblem& p, const RealField& rho, const RealField& sigma, double t,
               RealField& drho, RealField& dsigma) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    drho.resize(n);
    dsigma.resize(n);

    RealField gs(n), grho(n), flux(n), dw(n), amp(n), lap_amp(n);
    deriv1_into(g, sigma.data(), gs.data());
    deriv1_into(g, rho.data(), grho.data());

    for (int i = 0; i < n; ++i) {
        double r = clamp0(rho[i]);
        double D = p.diffusion.value(t, g.x[i]);
        flux[i] = p.model.gamma(r) * gs[i] / p.mass - D * p.model.f(r) * grho[i];
        dw[i] = D * gs[i] / p.mass;
        amp[i] = std::sqrt(r);
    }
    deriv1_into(g, flux.data(), drho.data());
    for (int i = 0; i < n; ++i) drho[i] = -drho[i];

    RealField divdw(n);
    deriv1_into(g, dw.data(), divdw.data());
    deriv2_into(g, amp.data(), lap_amp.data());
    const double amp_floor = std::sqrt(p.model.rho_floor());
    const double uq_c = -0.5 * p.hbar * p.hbar / p.mass;
    for (int i = 0; i < n; ++i) {
        double r = clamp0(rho[i]);
        double uq = uq_c * lap_amp[i] / std::max(amp[i], amp_floor);
        dsigma[i] = -(0.5 * p.model.dgamma(r) * gs[i] * gs[i] / p.mass + uq +
                      p.mass * p.model.f(r) * divdw[i] + p.G(r) + p.potential.value(g.x[i]));
    }
}

double hamiltonian_energy(const NseProblem& p, const RealField& rho, const RealField& grad_sigma,
                          double t) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    RealField grho(n);
    deriv1_into(g, rho.data(), grho.data());
    const double floor = p.model.rho_floor();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = clamp0(rho[i]);
        double D = p.diffusion.value(t, g.x[i]);
        double kinetic = 0.5 * grad_sigma[i] * grad_sigma[i] * p.model.gamma(r) / p.mass;
        double fisher = p.hbar * p.hbar * grho[i] * grho[i] / (8.0 * p.mass * (r + floor));
        double cross = -D * p.model.f(r) * grho[i] * grad_sigma[i];
        acc += kinetic + fisher + cross + p.U_tilde(r) + p.potential.value(g.x[i]) * r;
    }
    return acc * g.spacing;
}

double nse_stable_dt(const NseProblem& p, double rho_lo, double rho_hi) {
    double dt = 0.2 * p.mass * p.grid.spacing * p.grid.spacing / p.hbar;
    double dmax = p.diffusion.max_value();
    if (dmax > 0.0) {
        double fmax = 0.0;
        rho_lo = std::max(rho_lo, p.model.rho_floor());
        rho_hi = std::max(rho_hi, rho_lo * 1.0000001);
        for (int k = 0; k <= 64; ++k) {
            double r = rho_lo * std::pow(rho_hi / rho_lo, k / 64.0);
            fmax = std::max(fmax, p.model.f(r));
        }
        if (fmax > 0.0) {
            dt = std::min(dt, 0.2 * p.grid.spacing * p.grid.spacing / (dmax * fmax));
        }
    }
    return dt;
}

namespace {

void density_range(const RealField& rho, double floor, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (double r : rho) {
        if (r > floor) lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (!std::isfinite(lo)) lo = floor;
}

// Record assembly shared by both representations.
NseRecord make_record(const NseProblem& p, double t, const RealField& rho, const RealField& gs,
                      double energy) {
    const Grid1D& g = p.grid;
    NseRecord rec;
    rec.t = t;
    rec.energy = energy;
    double norm = 0.0, xm = 0.0, pm = 0.0, drift = 0.0, fext = 0.0, diff = 0.0;
    double adt = 0.0, adx = 0.0;
    RealField grho(g.n);
    deriv1_into(g, rho.data(), grho.data());
    for (int i = 0; i < g.n; ++i) {
        double r = clamp0(rho[i]);
        double D = p.diffusion.value(t, g.x[i]);
        double f = p.model.f(r);
        norm += r;
        xm += g.x[i] * r;
        pm += r * gs[i];
        drift += p.model.gamma(r) * gs[i] / p.mass;
        fext -= r * p.potential.grad(g.x[i]);
        diff += D * f * grho[i];
        adt += f * grho[i] * gs[i] * p.diffusion.ddt(t, g.x[i]);
        adx += f * grho[i] * gs[i] * p.diffusion.ddx(t, g.x[i]);
    }
    double h = g.spacing;
    rec.norm = norm * h;
    rec.x_mean = xm * h;
    rec.p_mean = pm * h;
    rec.drift_mean = drift * h;
    rec.fext_mean = fext * h;
    rec.diff_mean = diff * h;
    rec.a_dt_mean = adt * h;
    rec.a_dx_mean = adx * h;
    rec.boundary_density = std::max(rho.front(), rho.back());
    return rec;
}

void check_record(const NseProblem& p, const NseRecord& rec, const RealField& rho, double norm0,
                  long step, double dt, bool check_nodes) {
    if (!std::isfinite(rec.norm) || !std::isfinite(rec.energy)) {
        throw IntegrationError("nse: non-finite state at step " + std::to_string(step) +
                               " (t=" + std::to_string(rec.t) + ")");
    }
    if (std::fabs(rec.norm - norm0) > 1e-4 * std::fabs(norm0)) {
        throw IntegrationError("nse: norm drift " + std::to_string(rec.norm - norm0) +
                               " exceeds 1e-4 of the initial norm at step " +
                               std::to_string(step) + " (t=" + std::to_string(rec.t) + ")");
    }
    if (check_nodes && support_transitions(rho, kNodeThreshold) > 2) {
        throw DecompositionError("nse: node formed inside the support at step " +
                                 std::to_string(step) + " (t=" + std::to_string(rec.t) + ")");
    }
    if (p.diffusion.max_value() > 0.0) {
        double lo, hi;
        density_range(rho, p.model.rho_floor(), lo, hi);
        double bound = nse_stable_dt(p, lo, hi);
        if (dt > bound * 1.0000001) {
            throw IntegrationError("nse: dt=" + std::to_string(dt) +
                                   " exceeds the stability bound " + std::to_string(bound) +
                                   " reached at t=" + std::to_string(rec.t) + "; reduce dt");
        }
    }
}

}  // namespace

NseResult evolve_psi_with(const NseProblem& p, const Wavefunction& psi0, const NseRunOptions& opt,
                          const PsiRhs& rhs, const EnergyFn& energy) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    if (static_cast<int>(psi0.psi.size()) != n) {
        throw ConfigError("evolve_nse: field size does not match grid");
    }
    if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0)) {
        throw ConfigError("evolve_nse: need dt > 0 and t_end >= 0");
    }
    RealField rho(n), gs(n);
    ComplexField dpsi(n);
    auto fill_rho_gs = [&](const ComplexField& w) {
        deriv1_into(g, w.data(), dpsi.data());
        const double floor = p.model.rho_floor();
        for (int i = 0; i < n; ++i) {
            rho[i] = std::norm(w[i]);
            gs[i] = p.hbar * std::imag(std::conj(w[i]) * dpsi[i]) / (rho[i] + floor);
        }
    };

    fill_rho_gs(psi0.psi);
    double lo, hi;
    density_range(rho, p.model.rho_floor(), lo, hi);
    double bound = nse_stable_dt(p, lo, hi);
    if (opt.dt > bound) {
        throw ConfigError("evolve_nse: dt=" + std::to_string(opt.dt) +
                          " violates the stability bound; need dt <= " + std::to_string(bound));
    }

    ComplexField psi = psi0.psi;
    ComplexField k1(n), k2(n), k3(n), k4(n), tmp(n);
    const long nsteps = static_cast<long>(std::ceil(opt.t_end / opt.dt - 1e-12));
    const int cadence = std::max(opt.cadence, 1);

    NseResult result;
    result.records.reserve(nsteps / cadence + 2);
    double norm0 = 0.0;

    auto record = [&](double t, long step) {
        fill_rho_gs(psi);
        NseRecord rec = make_record(p, t, rho, gs, energy(t, rho, gs));
        if (opt.probe_node >= 0 && opt.probe_node < n) rec.psi_probe = psi[opt.probe_node];
        if (step == 0) norm0 = rec.norm;
        check_record(p, rec, rho, norm0, step, opt.dt, opt.check_nodes);
        result.records.push_back(rec);
        if (opt.store_density) result.density_frames.push_back(rho);
    };

    record(0.0, 0);
    double t = 0.0;
    for (long step = 1; step <= nsteps; ++step) {
        double hdt = std::min(opt.dt, opt.t_end - t);
        rhs(t, psi, k1);
        for (int i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * hdt * k1[i];
        rhs(t + 0.5 * hdt, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * hdt * k2[i];
        rhs(t + 0.5 * hdt, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = psi[i] + hdt * k3[i];
        rhs(t + hdt, tmp, k4);
        for (int i = 0; i < n; ++i) {
            psi[i] += hdt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += hdt;
        if (step % cadence == 0 || step == nsteps) record(t, step);
    }

    fill_rho_gs(psi);
    result.psi = std::move(psi);
    result.rho = rho;
    result.steps = nsteps;
    return result;
}

NseResult evolve_nse(const NseProblem& p, const Wavefunction& psi0, const NseRunOptions& opt) {
    if (opt.representation == Representation::Hydro) {
        HydroPair h0 = polar_decompose(psi0, p.model.rho_floor());
        return evolve_nse_hydro(p, h0, opt);
    }
    PsiRhs rhs = [&p](double t, const ComplexField& w, ComplexField& out) {
        out = nse_rhs_psi(p, w, t);
    };
    EnergyFn energy = [&p](double t, const RealField& rho, const RealField& gs) {
        return hamiltonian_energy(p, rho, gs, t);
    };
    return evolve_psi_with(p, psi0, opt, rhs, energy);
}

NseResult evolve_nse_hydro(const NseProblem& p, const HydroPair& h0, const NseRunOptions& opt) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    if (static_cast<int>(h0.rho.size()) != n || static_cast<int>(h0.sigma.size()) != n) {
        throw ConfigError("evolve_nse_hydro: field sizes do not match grid");
    }
    if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0)) {
        throw ConfigError("evolve_nse_hydro: need dt > 0 and t_end >= 0");
    }
    double lo, hi;
    density_range(h0.rho, p.model.rho_floor(), lo, hi);
    double bound = nse_stable_dt(p, lo, hi);
    if (opt.dt > bound) {
        throw ConfigError("evolve_nse_hydro: dt=" + std::to_string(opt.dt) +
                          " violates the stability bound; need dt <= " + std::to_string(bound));
    }

    RealField rho = h0.rho, sigma = h0.sigma;
    RealField kr1(n), kr2(n), kr3(n), kr4(n), ks1(n), ks2(n), ks3(n), ks4(n);
    RealField tr(n), ts(n), gs(n);
    const long nsteps = static_cast<long>(std::ceil(opt.t_end / opt.dt - 1e-12));
    const int cadence = std::max(opt.cadence, 1);

    NseResult result;
    result.records.reserve(nsteps / cadence + 2);
    double norm0 = 0.0;

    auto record = [&](double t, long step) {
        deriv1_into(g, sigma.data(), gs.data());
        NseRecord rec = make_record(p, t, rho, gs, hamiltonian_energy(p, rho, gs, t));
        if (opt.probe_node >= 0 && opt.probe_node < n) {
            int i = opt.probe_node;
            rec.psi_probe = std::polar(std::sqrt(clamp0(rho[i])), sigma[i] / p.hbar);
        }
        if (step == 0) norm0 = rec.norm;
        check_record(p, rec, rho, norm0, step, opt.dt, opt.check_nodes);
        result.records.push_back(rec);
        if (opt.store_density) result.density_frames.push_back(rho);
    };

    record(0.0, 0);
    double t = 0.0;
    for (long step = 1; step <= nsteps; ++step) {
        double hdt = std::min(opt.dt, opt.t_end - t);
        hydro_rhs(p, rho, sigma, t, kr1, ks1);
        for (int i = 0; i < n; ++i) {
            tr[i] = rho[i] + 0.5 * hdt * kr1[i];
            ts[i] = sigma[i] + 0.5 * hdt * ks1[i];
        }
        hydro_rhs(p, tr, ts, t + 0.5 * hdt, kr2, ks2);
        for (int i = 0; i < n; ++i) {
            tr[i] = rho[i] + 0.5 * hdt * kr2[i];
            ts[i] = sigma[i] + 0.5 * hdt * ks2[i];
        }
        hydro_rhs(p, tr, ts, t + 0.5 * hdt, kr3, ks3);
        for (int i = 0; i < n; ++i) {
            tr[i] = rho[i] + hdt * kr3[i];
            ts[i] = sigma[i] + hdt * ks3[i];
        }
        hydro_rhs(p, tr, ts, t + hdt, kr4, ks4);
        for (int i = 0; i < n; ++i) {
            rho[i] += hdt / 6.0 * (kr1[i] + 2.0 * kr2[i] + 2.0 * kr3[i] + kr4[i]);
            sigma[i] += hdt / 6.0 * (ks1[i] + 2.0 * ks2[i] + 2.0 * ks3[i] + ks4[i]);
        }
        t += hdt;
        if (step % cadence == 0 || step == nsteps) record(t, step);
    }

    HydroPair hf;
    hf.grid = g;
    hf.hbar = p.hbar;
    hf.mass = p.mass;
    hf.rho.resize(n);
    for (int i = 0; i < n; ++i) hf.rho[i] = clamp0(rho[i]);
    hf.sigma = sigma;
    Wavefunction wf = polar_compose(hf);
    result.psi = std::move(wf.psi);
    result.rho = std::move(rho);
    result.sigma = std::move(sigma);
    result.steps = nsteps;
    return result;
}

}  // namespace kipsim
