#include "kipsim/nfpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kipsim {

namespace {

constexpr double kFrontThreshold = 1e-9;  // faces touching near-vacuum switch to donor form
constexpr double kStabilityFactor = 0.2;

// beta * (V at the right node - V at the left node) for every face.  Face i
// sits between nodes i and i+1; the last face wraps the seam.  Drift enters
// the flux only through these differences, so the kappa-inverse equilibrium
// (where ln kappa(rho_i) + beta V_i is constant) zeroes every face exactly.
RealField face_dv(const NfpeProblem& p) {
    const Grid1D& g = p.grid;
    RealField dv(g.n);
    for (int i = 0; i < g.n; ++i) {
        const int ip1 = i + 1 < g.n ? i + 1 : 0;
        dv[i] = p.beta * (p.potential.value(g.x[ip1]) - p.potential.value(g.x[i]));
    }
    return dv;
}

// Face flux J = -(D/dx) * G * B with B = beta dV + d(ln kappa) across the face
// and G a nonnegative average of gamma:
//   - chord mean dF/d(ln kappa) (F = f antiderivative), which reduces the
//     diffusive part to the exact two-point gradient flux -D dF/dx and the
//     drift part to u * gamma with u = -D beta dV/dx;
//   - midpoint gamma when the entropic difference degenerates;
//   - donor-cell gamma when a cell sits at/below the front threshold, so no
//     flux ever leaves an empty cell and compact-support equilibria are exact
//     fixed points.  Sub-threshold entropic differences are evaluated with
//     densities clamped at the threshold: that caps the d(ln kappa) stiffness
//     of near-vacuum faces at the same level the dt bound already monitors.
// Since G >= 0, summation by parts gives dF/dt = -(D/dx) sum G * B^2 <= 0 in
// semi-discrete time: the free energy decreases by construction.
void compute_rhs(const NfpeProblem& p, const RealField& dv, const RealField& rho,
                 RealField& out) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    const double dx = g.spacing;
    const double D = p.diffusion;
    const EntropyModel& m = p.model;

    static thread_local RealField flux;
    flux.resize(n);

    for (int i = 0; i < n; ++i) {
        const int ip1 = i + 1 < n ? i + 1 : 0;
        const double b = std::max(rho[i], 0.0);
        const double c = std::max(rho[ip1], 0.0);
        double G;
        double B;
        if (b <= kFrontThreshold || c <= kFrontThreshold) {
            B = dv[i] + m.ln_kappa(std::max(c, kFrontThreshold)) -
                m.ln_kappa(std::max(b, kFrontThreshold));
            G = m.gamma(B > 0.0 ? c : b);  // donor cell: the one the flux drains
        } else {
            const double sb = m.ln_kappa(b);
            const double sc = m.ln_kappa(c);
            const double ds = sc - sb;
            B = dv[i] + ds;
            if (std::fabs(ds) > 1e-12 * (1.0 + std::fabs(sb) + std::fabs(sc))) {
                G = std::max((m.f_antiderivative(c) - m.f_antiderivative(b)) / ds, 0.0);
            } else {
                G = m.gamma(0.5 * (b + c));
            }
        }
        flux[i] = -(D / dx) * G * B;
    }
    for (int i = 0; i < n; ++i) {
        const int im1 = i - 1 >= 0 ? i - 1 : n - 1;
        out[i] = -(flux[i] - flux[im1]) / dx;
    }
}

double adaptive_simpson(const EntropyModel& m, double ua, double ub, double fa, double fmid,
                        double fb, double whole, double tol, int depth) {
    double um = 0.5 * (ua + ub);
    double ulm = 0.5 * (ua + um), urm = 0.5 * (um + ub);
    auto eval = [&m](double u) {
        double r = std::exp(u);
        return r * m.ln_kappa(r);  // integrand after rho = e^u substitution
    };
    double flm = eval(ulm), frm = eval(urm);
    double left = (um - ua) / 6.0 * (fa + 4.0 * flm + fmid);
    double right = (ub - um) / 6.0 * (fmid + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(m, ua, um, fa, flm, fmid, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(m, um, ub, fmid, frm, fb, right, 0.5 * tol, depth - 1);
}

// int_floor^rho ln kappa(r) dr via adaptive Simpson in u = ln r.
double entropy_cell(const EntropyModel& m, double rho, double tol) {
    const double floor = m.rho_floor();
    if (!(rho > floor)) return 0.0;
    double ua = std::log(floor), ub = std::log(rho);
    auto eval = [&m](double u) {
        double r = std::exp(u);
        return r * m.ln_kappa(r);
    };
    double fa = eval(ua), fb = eval(ub), fmid = eval(0.5 * (ua + ub));
    double whole = (ub - ua) / 6.0 * (fa + 4.0 * fmid + fb);
    return adaptive_simpson(m, ua, ub, fa, fmid, fb, whole, tol, 48);
}

}  // namespace

RealField nfpe_rhs(const NfpeProblem& p, const RealField& rho) {
    if (static_cast<int>(rho.size()) != p.grid.n) {
        throw ConfigError("nfpe_rhs: field size does not match grid");
    }
    RealField out(p.grid.n);
    RealField dv = face_dv(p);
    compute_rhs(p, dv, rho, out);
    return out;
}

double free_energy(const NfpeProblem& p, const RealField& rho) {
    if (static_cast<int>(rho.size()) != p.grid.n) {
        throw ConfigError("free_energy: field size does not match grid");
    }
    double entropy_part = 0.0, potential_part = 0.0;
    for (int i = 0; i < p.grid.n; ++i) {
        double r = std::max(rho[i], 0.0);
        entropy_part += entropy_cell(p.model, r, 1e-14);
        potential_part += p.potential.value(p.grid.x[i]) * r;
    }
    return (entropy_part + p.beta * potential_part) * p.grid.spacing;
}

double density_from_log_weight(const EntropyModel& model, double logy) {
    const auto [range_lo, range_hi] = model.ln_kappa_range();
    if (logy <= range_lo) return 0.0;  // below the attainable range: vacuum
    if (logy >= range_hi) return std::numeric_limits<double>::infinity();  // diverging branch
    return model.kappa_inverse(std::exp(logy));
}

RealField equilibrium_density(const EntropyModel& model, const Grid1D& grid,
                              const Potential& potential, double beta,
                              double* beta_prime_out) {
    const double inf = std::numeric_limits<double>::infinity();

    auto mass_at = [&](double bp) -> double {
        double mass = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            double rho = density_from_log_weight(model, -beta * potential.value(grid.x[i]) - bp);
            if (!std::isfinite(rho)) return inf;
            mass += rho;
        }
        return mass * grid.spacing;
    };

    double lo = -50.0, hi = 50.0;
    int guard = 0;
    while (mass_at(hi) > 1.0 && guard++ < 40) hi += 50.0;
    guard = 0;
    while (mass_at(lo) < 1.0 && guard++ < 40) lo -= 50.0;
    if (!(mass_at(lo) >= 1.0) || !(mass_at(hi) <= 1.0)) {
        throw NumericError("equilibrium_density: no normalizable equilibrium for model " +
                           model.name() + " in the beta_prime bracket");
    }
    double bp = 0.0;
    for (int it = 0; it < 200; ++it) {
        bp = 0.5 * (lo + hi);
        double mass = mass_at(bp);
        if (std::fabs(mass - 1.0) < 1e-12) break;
        if (mass > 1.0) {
            lo = bp;
        } else {
            hi = bp;
        }
    }
    RealField rho(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        rho[i] = density_from_log_weight(model, -beta * potential.value(grid.x[i]) - bp);
    }
    if (beta_prime_out) *beta_prime_out = bp;
    return rho;
}

double nfpe_stable_dt(const NfpeProblem& p, double rho_lo, double rho_hi) {
    double fmax = 0.0;
    // Faces touching a cell below kFrontThreshold evaluate entropic differences
    // at the threshold and carry the donor cell's (tiny) mobility, so densities
    // below it never expose the raw f(rho) divergence to the scheme. Scanning
    // from the threshold keeps the bound tied to the operator actually applied.
    rho_lo = std::max({rho_lo, p.model.rho_floor(), kFrontThreshold});
    rho_hi = std::max(rho_hi, rho_lo * 1.0000001);
    for (int k = 0; k <= 64; ++k) {
        double r = rho_lo * std::pow(rho_hi / rho_lo, k / 64.0);
        fmax = std::max(fmax, p.model.f(r));
    }
    double dx = p.grid.spacing;
    if (!(fmax > 0.0) || !(p.diffusion > 0.0)) return std::numeric_limits<double>::infinity();
    return kStabilityFactor * dx * dx / (p.diffusion * fmax);
}

NfpeResult evolve_nfpe(const NfpeProblem& p, const RealField& rho0, const NfpeRunOptions& opt) {
    const Grid1D& g = p.grid;
    const int n = g.n;
    if (static_cast<int>(rho0.size()) != n) {
        throw ConfigError("evolve_nfpe: field size does not match grid");
    }
    if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0)) {
        throw ConfigError("evolve_nfpe: need dt > 0 and t_end >= 0");
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double r : rho0) {
        if (r > p.model.rho_floor()) lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (!(hi > 0.0)) throw ConfigError("evolve_nfpe: initial density is empty");
    double bound = nfpe_stable_dt(p, lo, hi);
    if (opt.dt > bound) {
        throw ConfigError("evolve_nfpe: dt=" + std::to_string(opt.dt) +
                          " violates the diffusive stability bound; need dt <= " +
                          std::to_string(bound));
    }

    RealField dv = face_dv(p);
    RealField rho = rho0;
    RealField k1(n), k2(n), k3(n), k4(n), tmp(n);

    const long nsteps = static_cast<long>(std::ceil(opt.t_end / opt.dt - 1e-12));
    NfpeResult result;
    result.records.reserve(nsteps / std::max(opt.cadence, 1) + 2);

    auto record = [&](double t, long step) {
        NfpeRecord rec;
        rec.t = t;
        rec.mass = integrate(g, rho);
        rec.free_energy = opt.record_free_energy ? free_energy(p, rho) : 0.0;
        rec.min_rho = *std::min_element(rho.begin(), rho.end());
        rec.boundary_density = std::max(rho.front(), rho.back());
        if (opt.reference) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = rho[i] - (*opt.reference)[i];
                acc += d * d;
            }
            rec.l2_to_reference = std::sqrt(acc * g.spacing);
        }
        if (!std::isfinite(rec.mass) || rec.min_rho < -1e-8) {
            throw IntegrationError("evolve_nfpe: integration failure at step " +
                                   std::to_string(step) + " (t=" + std::to_string(t) +
                                   "): mass=" + std::to_string(rec.mass) +
                                   ", min rho=" + std::to_string(rec.min_rho));
        }
        // Re-monitor the diffusive bound on the evolving density range.
        double cur_lo = std::numeric_limits<double>::infinity(), cur_hi = 0.0;
        for (double r : rho) {
            if (r > p.model.rho_floor()) cur_lo = std::min(cur_lo, r);
            cur_hi = std::max(cur_hi, r);
        }
        double cur_bound = nfpe_stable_dt(p, cur_lo, cur_hi);
        if (opt.dt > cur_bound * 1.0000001) {
            throw IntegrationError("evolve_nfpe: dt=" + std::to_string(opt.dt) +
                                   " exceeds the diffusive stability bound " +
                                   std::to_string(cur_bound) + " reached at t=" +
                                   std::to_string(t) + "; reduce dt");
        }
        result.records.push_back(rec);
    };

    record(0.0, 0);
    double t = 0.0;
    const int cadence = std::max(opt.cadence, 1);
    for (long step = 1; step <= nsteps; ++step) {
        double h = std::min(opt.dt, opt.t_end - t);
        compute_rhs(p, dv, rho, k1);
        for (int i = 0; i < n; ++i) tmp[i] = rho[i] + 0.5 * h * k1[i];
        compute_rhs(p, dv, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = rho[i] + 0.5 * h * k2[i];
        compute_rhs(p, dv, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = rho[i] + h * k3[i];
        compute_rhs(p, dv, tmp, k4);
        for (int i = 0; i < n; ++i) {
            rho[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
        if (step % cadence == 0 || step == nsteps) record(t, step);
    }
    result.rho = std::move(rho);
    result.steps = nsteps;
    return result;
}

}  // namespace kipsim
