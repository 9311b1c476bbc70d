#include "kipsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "kipsim/fields.hpp"
#include "kipsim/nfpe.hpp"

namespace kipsim {

namespace {

// Length of the longest uniformly spaced prefix of the record times.  The
// final record can sit a partial step after the last cadence point; the
// residual window just stops before it.
std::size_t uniform_prefix(const std::vector<NseRecord>& rec) {
    if (rec.size() < 2) return rec.size();
    const double h = rec[1].t - rec[0].t;
    std::size_t m = 2;
    while (m < rec.size()) {
        const double gap = rec[m].t - rec[m - 1].t;
        if (std::fabs(gap - h) > 1e-9 * std::fabs(h)) break;
        ++m;
    }
    return m;
}

double cdiff4(const std::vector<double>& y, std::size_t i, double h) {
    return (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
}

double cdiff2(const std::vector<double>& y, std::size_t i, double h) {
    return (y[i + 1] - y[i - 1]) / (2.0 * h);
}

ResidualSeries residual_core(const std::vector<NseRecord>& rec, bool variable_d) {
    const std::size_t m = uniform_prefix(rec);
    if (m < 3)
        throw ConfigError("residual differences need at least three uniformly spaced records");
    const double h = rec[1].t - rec[0].t;
    if (h <= 0.0) throw ConfigError("record times must be strictly increasing");

    std::vector<double> xs(m), ps(m), es(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = rec[i].x_mean;
        ps[i] = rec[i].p_mean;
        es[i] = rec[i].energy;
    }

    const bool fourth = m >= 5;
    const std::size_t lo = fourth ? 2 : 1;
    const std::size_t hi = fourth ? m - 3 : m - 2;  // inclusive

    ResidualSeries out;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double dx_dt = fourth ? cdiff4(xs, i, h) : cdiff2(xs, i, h);
        const double dp_dt = fourth ? cdiff4(ps, i, h) : cdiff2(ps, i, h);
        const double de_dt = fourth ? cdiff4(es, i, h) : cdiff2(es, i, h);

        double transport, force, power;
        if (variable_d) {
            transport = rec[i].drift_mean - rec[i].diff_mean;
            force = rec[i].fext_mean - rec[i].a_dx_mean;
            power = -rec[i].a_dt_mean;
            out.x_scale = std::max({out.x_scale, std::fabs(rec[i].drift_mean),
                                    std::fabs(rec[i].diff_mean)});
            out.p_scale = std::max({out.p_scale, std::fabs(rec[i].fext_mean),
                                    std::fabs(rec[i].a_dx_mean)});
            out.e_scale = std::max(out.e_scale, std::fabs(rec[i].a_dt_mean));
        } else {
            transport = rec[i].drift_mean;
            force = rec[i].fext_mean;
            power = 0.0;
            out.x_scale = std::max(out.x_scale, std::fabs(rec[i].drift_mean));
            out.p_scale = std::max(out.p_scale, std::fabs(rec[i].fext_mean));
            out.e_scale = std::max(out.e_scale, std::fabs(rec[i].energy));
        }

        out.t.push_back(rec[i].t);
        out.x_residual.push_back(dx_dt - transport);
        out.p_residual.push_back(dp_dt - force);
        out.e_residual.push_back(de_dt - power);
        out.max_x_residual = std::max(out.max_x_residual, std::fabs(out.x_residual.back()));
        out.max_p_residual = std::max(out.max_p_residual, std::fabs(out.p_residual.back()));
        out.max_e_residual = std::max(out.max_e_residual, std::fabs(out.e_residual.back()));
    }
    return out;
}

}  // namespace

ResidualSeries ehrenfest_residuals(const std::vector<NseRecord>& records) {
    return residual_core(records, false);
}

ResidualSeries variable_diffusion_residuals(const std::vector<NseRecord>& records) {
    return residual_core(records, true);
}

DispersionResult dispersion_check(const NseProblem& p, double amplitude, int mode, double dt,
                                  double t_end, int cadence) {
    if (p.potential.kind != Potential::Kind::None)
        throw ConfigError("dispersion check runs in free flight; remove the external potential");
    for (double c : p.g_coeffs)
        if (c != 0.0) throw ConfigError("dispersion check needs zero bulk couplings");
    if (!p.diffusion.is_constant())
        throw ConfigError("dispersion check needs constant diffusion");
    if (mode == 0) throw ConfigError("plane-wave mode must be nonzero");
    if (amplitude <= 0.0) throw ConfigError("plane-wave amplitude must be positive");

    const double k = p.grid.wavenumber(mode);
    Wavefunction w{p.grid, ComplexField(p.grid.n), p.hbar, p.mass};
    for (int i = 0; i < p.grid.n; ++i) w.psi[i] = std::polar(amplitude, k * p.grid.x[i]);

    NseRunOptions opt;
    opt.dt = dt;
    opt.t_end = t_end;
    opt.cadence = cadence;
    opt.probe_node = 0;
    const NseResult res = evolve_nse(p, w, opt);
    if (res.records.size() < 3)
        throw ConfigError("dispersion fit needs at least three records; lower the cadence");

    // Unwrap the probe phase by accumulating nearest-branch increments, then
    // fit theta(t) = a + b t by least squares; the wave rotates as exp(-i
    // omega t), so omega = -b.
    const double rho0 = amplitude * amplitude;
    DispersionResult out;
    out.k = k;
    out.amplitude = amplitude;

    std::vector<double> ts, th;
    ts.reserve(res.records.size());
    th.reserve(res.records.size());
    double prev = std::arg(res.records.front().psi_probe);
    double acc = prev;
    for (const NseRecord& r : res.records) {
        const double a = std::arg(r.psi_probe);
        double d = a - prev;
        while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
        while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
        acc += d;
        prev = a;
        ts.push_back(r.t);
        th.push_back(acc);
        out.max_amplitude_drift =
            std::max(out.max_amplitude_drift, std::fabs(std::norm(r.psi_probe) - rho0) / rho0);
    }
    // The loop above added a zero increment for the first record, so acc
    // starts exactly at its phase.
    const std::size_t n = ts.size();
    double tbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tbar += ts[i];
        ybar += th[i];
    }
    tbar /= double(n);
    ybar /= double(n);
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (ts[i] - tbar) * (ts[i] - tbar);
        sty += (ts[i] - tbar) * (th[i] - ybar);
    }
    out.omega_measured = -sty / stt;
    out.omega_predicted = (p.hbar * k * k / (2.0 * p.mass)) * p.model.dgamma(rho0);
    out.rel_error =
        std::fabs(out.omega_measured - out.omega_predicted) / std::fabs(out.omega_predicted);
    out.amplitude_warning = out.max_amplitude_drift > 1e-6;
    return out;
}

StationaryCheck stationary_residual(const NseProblem& p, const RealField& sigma_s,
                                    double beta_prime) {
    if (!p.diffusion.is_constant())
        throw ConfigError("stationary construction assumes constant diffusion");
    const double d0 = p.diffusion.value(0.0, 0.0);
    if (d0 <= 0.0) throw ConfigError("stationary construction needs positive diffusion");
    if (static_cast<int>(sigma_s.size()) != p.grid.n)
        throw ConfigError("phase profile size does not match the grid");

    StationaryCheck out;
    out.rho.resize(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i) {
        const double rho = density_from_log_weight(p.model, sigma_s[i] / (p.mass * d0) - beta_prime);
        if (!std::isfinite(rho))
            throw RangeError("phase profile maps above the attainable density range");
        out.rho[i] = rho;
    }

    RealField drho(p.grid.n), dsigma(p.grid.n);
    hydro_rhs(p, out.rho, sigma_s, 0.0, drho, dsigma);
    for (double v : drho) out.max_residual = std::max(out.max_residual, std::fabs(v));
    return out;
}

namespace {

void check_2d_sizes(const Grid2D& g, const RealField& a, const RealField& b) {
    if (a.size() != g.size() || b.size() != g.size())
        throw ConfigError("2D field size does not match the grid");
}

}  // namespace

RealField vorticity_2d(const Grid2D& g, const RealField& rho, const RealField& sigma,
                       const EntropyModel& model, double mass) {
    check_2d_sizes(g, rho, sigma);
    RealField ratio(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        ratio[i] = model.gamma(rho[i]) / std::max(rho[i], model.rho_floor());
    const RealField rx = partial_x(g, ratio), ry = partial_y(g, ratio);
    const RealField sx = partial_x(g, sigma), sy = partial_y(g, sigma);
    RealField out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = (rx[i] * sy[i] - ry[i] * sx[i]) / mass;
    return out;
}

RealField vorticity_2d_eip(const Grid2D& g, const RealField& rho, const RealField& sigma,
                           double kappa_e, double mass) {
    check_2d_sizes(g, rho, sigma);
    const RealField rx = partial_x(g, rho), ry = partial_y(g, rho);
    const RealField sx = partial_x(g, sigma), sy = partial_y(g, sigma);
    RealField out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = kappa_e * (rx[i] * sy[i] - ry[i] * sx[i]) / mass;
    return out;
}

double angular_momentum_2d(const Grid2D& g, const RealField& rho, const RealField& sigma) {
    check_2d_sizes(g, rho, sigma);
    const RealField sx = partial_x(g, sigma), sy = partial_y(g, sigma);
    RealField integrand(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * g.nx + ix;
            integrand[i] = rho[i] * (g.x[ix] * sy[i] - g.y[iy] * sx[i]);
        }
    return integrate(g, integrand);
}

RealField gauge_condition_curl_2d(const Grid2D& g, const RealField& diffusion,
                                  const RealField& rho, const EntropyModel& model) {
    check_2d_sizes(g, diffusion, rho);
    RealField s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = model.ln_kappa(rho[i]);
    const RealField sx = partial_x(g, s), sy = partial_y(g, s);
    RealField tx(g.size()), ty(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        tx[i] = diffusion[i] * sx[i];
        ty[i] = diffusion[i] * sy[i];
    }
    const RealField a = partial_x(g, ty);
    const RealField b = partial_y(g, tx);
    RealField out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

RealField random_smooth_field(const Grid1D& g, std::uint64_t seed, int n_modes, double amplitude,
                              double offset) {
    if (n_modes < 1) throw ConfigError("smooth random field needs at least one mode");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    RealField out(g.n, offset);
    for (int j = 1; j <= n_modes; ++j) {
        const double ca = unit(rng);
        const double sa = unit(rng);
        const double kj = g.wavenumber(j);
        const double w = amplitude / double(j * j);
        for (int i = 0; i < g.n; ++i)
            out[i] += w * (ca * std::cos(kj * g.x[i]) + sa * std::sin(kj * g.x[i]));
    }
    return out;
}

RealField random_smooth_field(const Grid2D& g, std::uint64_t seed, int n_modes, double amplitude,
                              double offset) {
    if (n_modes < 1) throw ConfigError("smooth random field needs at least one mode");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    RealField out(g.size(), offset);
    const double two_pi = 2.0 * std::numbers::pi;
    // One conjugate representative per mode pair: jx > 0 with any jy, plus
    // jx = 0 with jy > 0.
    for (int jx = 0; jx <= n_modes; ++jx) {
        for (int jy = (jx == 0 ? 1 : -n_modes); jy <= n_modes; ++jy) {
            const double ca = unit(rng);
            const double sa = unit(rng);
            const double w = amplitude / double(jx * jx + jy * jy);
            const double kx = two_pi * jx / g.length_x;
            const double ky = two_pi * jy / g.length_y;
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix) {
                    const double phase = kx * g.x[ix] + ky * g.y[iy];
                    out[static_cast<std::size_t>(iy) * g.nx + ix] +=
                        w * (ca * std::cos(phase) + sa * std::sin(phase));
                }
        }
    }
    return out;
}

}  // namespace kipsim
