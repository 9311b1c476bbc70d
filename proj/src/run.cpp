#include "kipsim/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "kipsim/diagnostics.hpp"
#include "kipsim/entropy.hpp"
#include "kipsim/errors.hpp"
#include "kipsim/fields.hpp"
#include "kipsim/gauge.hpp"
#include "kipsim/nfpe.hpp"
#include "kipsim/nse.hpp"

namespace kipsim {

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso_now() {
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Collects the data files of one run so the manifest can list them at the end.
struct Artifacts {
    std::filesystem::path dir;
    std::string prefix;
    std::vector<std::string> names;

    std::ofstream open(const std::string& suffix) {
        std::filesystem::create_directories(dir);
        std::filesystem::path p = dir / (prefix + suffix);
        std::ofstream out(p);
        if (!out) throw ConfigError("cannot open output file " + p.string());
        names.push_back(p.filename().string());
        return out;
    }

    void write_manifest(const std::string& subcommand, const Scenario* sc,
                        const RunFlags& flags, const std::string& started,
                        json summary, const json* acceptance = nullptr) const {
        json j;
        j["subcommand"] = subcommand;
        if (sc) j["scenario_hash"] = hash_hex(scenario_hash(*sc));
        j["started"] = started;
        j["finished"] = iso_now();
        j["seed"] = flags.seed;
        j["tolerance_scale"] = flags.tolerance_scale;
        j["outputs"] = names;
        j["summary"] = std::move(summary);
        if (acceptance) j["acceptance"] = *acceptance;
        std::filesystem::create_directories(dir);
        std::ofstream out(dir / (prefix + "_manifest.json"));
        out << j.dump(2) << "\n";
    }
};

void write_row(std::ofstream& out, const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out << ',';
        out << fmt17(vals[i]);
    }
    out << '\n';
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumeric;
    }
}

double boundary_max(const std::vector<NfpeRecord>& recs) {
    double m = 0.0;
    for (const auto& r : recs) m = std::max(m, r.boundary_density);
    return m;
}

double boundary_max(const std::vector<NseRecord>& recs) {
    double m = 0.0;
    for (const auto& r : recs) m = std::max(m, r.boundary_density);
    return m;
}

}  // namespace

int run_nfpe_relax(const Scenario& sc, const RunFlags& flags) {
    return guarded([&] {
        const std::string started = iso_now();
        Artifacts art{flags.out_dir, sc.prefix, {}};

        NfpeProblem p = sc.make_nfpe_problem();
        double beta_prime = 0.0;
        RealField rho_eq = equilibrium_density(p.model, p.grid, p.potential, p.beta, &beta_prime);
        RealField rho0 = sc.initial_density();

        NfpeRunOptions opt;
        opt.dt = sc.dt;
        opt.t_end = sc.t_end;
        opt.cadence = sc.cadence;
        opt.reference = &rho_eq;
        NfpeResult res = evolve_nfpe(p, rho0, opt);

        {
            std::ofstream out = art.open("_records.csv");
            out << "t,mass,free_energy,min_rho,boundary_density,l2_to_equilibrium\n";
            for (const auto& r : res.records)
                write_row(out, {r.t, r.mass, r.free_energy, r.min_rho,
                                r.boundary_density, r.l2_to_reference});
        }
        {
            std::ofstream out = art.open("_final.csv");
            out << "x,rho,rho_equilibrium\n";
            for (int i = 0; i < p.grid.n; ++i)
                write_row(out, {p.grid.x[i], res.rho[i], rho_eq[i]});
        }

        const NfpeRecord& last = res.records.back();
        const NfpeRecord& first = res.records.front();
        double bmax = boundary_max(res.records);
        json summary;
        summary["model"] = p.model.name();
        summary["steps"] = res.steps;
        summary["beta_prime"] = beta_prime;
        summary["final_l2_to_equilibrium"] = last.l2_to_reference;
        summary["final_free_energy"] = last.free_energy;
        summary["free_energy_drop"] = first.free_energy - last.free_energy;
        summary["mass_drift"] = last.mass - first.mass;
        summary["final_min_rho"] = last.min_rho;
        summary["max_boundary_density"] = bmax;
        summary["boundary_ok"] = bmax < 1e-10;
        art.write_manifest("nfpe-relax", &sc, flags, started, std::move(summary));
        return kExitOk;
    });
}

int run_nse_evolve(const Scenario& sc, const RunFlags& flags) {
    return guarded([&] {
        const std::string started = iso_now();
        Artifacts art{flags.out_dir, sc.prefix, {}};

        NseProblem p = sc.make_nse_problem();
        NseRunOptions opt;
        opt.dt = sc.dt;
        opt.t_end = sc.t_end;
        opt.cadence = sc.cadence;
        opt.representation = sc.representation;

        NseResult res;
        if (sc.representation == Representation::Hydro) {
            res = evolve_nse_hydro(p, sc.initial_hydro(), opt);
        } else {
            res = evolve_nse(p, sc.initial_wavefunction(), opt);
        }

        const bool const_d = p.diffusion.is_constant();
        ResidualSeries rs = const_d ? ehrenfest_residuals(res.records)
                                    : variable_diffusion_residuals(res.records);

        {
            std::ofstream out = art.open("_records.csv");
            out << "t,norm,energy,x_mean,p_mean,boundary_density,"
                   "x_residual,p_residual,e_residual\n";
            const double nan = std::numeric_limits<double>::quiet_NaN();
            std::size_t j = 0;
            for (const auto& r : res.records) {
                double xr = nan, pr = nan, er = nan;
                if (j < rs.t.size() &&
                    std::abs(rs.t[j] - r.t) <= 1e-9 * std::max(1.0, std::abs(r.t))) {
                    xr = rs.x_residual[j];
                    pr = rs.p_residual[j];
                    er = rs.e_residual[j];
                    ++j;
                }
                write_row(out, {r.t, r.norm, r.energy, r.x_mean, r.p_mean,
                                r.boundary_density, xr, pr, er});
            }
        }
        {
            std::ofstream out = art.open("_snapshot.csv");
            if (sc.representation == Representation::Hydro) {
                HydroPair h{p.grid, res.rho, res.sigma, p.hbar, p.mass};
                out << snapshot_csv(h);
            } else {
                Wavefunction w{p.grid, res.psi, p.hbar, p.mass};
                out << snapshot_csv(w);
            }
        }

        const NseRecord& last = res.records.back();
        const NseRecord& first = res.records.front();
        double bmax = boundary_max(res.records);
        json summary;
        summary["model"] = p.model.name();
        summary["representation"] =
            sc.representation == Representation::Hydro ? "hydro" : "psi";
        summary["steps"] = res.steps;
        summary["norm_drift"] = last.norm - first.norm;
        summary["energy_drift_rel"] =
            (last.energy - first.energy) / std::max(1e-300, std::abs(first.energy));
        summary["final_x_mean"] = last.x_mean;
        summary["final_p_mean"] = last.p_mean;
        summary["balance"] = const_d ? "constant-diffusion" : "variable-diffusion";
        summary["max_x_residual"] = rs.max_x_residual;
        summary["max_p_residual"] = rs.max_p_residual;
        summary["max_e_residual"] = rs.max_e_residual;
        summary["x_scale"] = rs.x_scale;
        summary["p_scale"] = rs.p_scale;
        summary["e_scale"] = rs.e_scale;
        summary["max_boundary_density"] = bmax;
        summary["boundary_ok"] = bmax < 1e-10;
        art.write_manifest("nse-evolve", &sc, flags, started, std::move(summary));
        return kExitOk;
    });
}

int run_gauge_check(const Scenario& sc, const RunFlags& flags) {
    return guarded([&] {
        const std::string started = iso_now();
        Artifacts art{flags.out_dir, sc.prefix, {}};

        NseProblem p = sc.make_nse_problem();
        NseRunOptions opt;
        opt.dt = sc.dt;
        opt.t_end = sc.t_end;
        opt.cadence = sc.cadence;
        GaugeCheckResult res = gauge_check(p, sc.initial_wavefunction(), opt);

        {
            std::ofstream out = art.open("_gauge.csv");
            out << "t,linf_density_gap\n";
            for (std::size_t i = 0; i < res.t.size(); ++i)
                write_row(out, {res.t[i], res.linf[i]});
        }

        json summary;
        summary["model"] = p.model.name();
        summary["max_density_gap"] = res.max_linf;
        summary["records"] = res.t.size();
        art.write_manifest("gauge-check", &sc, flags, started, std::move(summary));
        return kExitOk;
    });
}

int run_dg_linearize(const Scenario& sc, const RunFlags& flags) {
    return guarded([&] {
        const std::string started = iso_now();
        Artifacts art{flags.out_dir, sc.prefix, {}};

        if (sc.variant != EntropyVariant::BoltzmannGibbs) {
            throw ConfigError(
                "dg-linearize applies to the logarithmic model only; the "
                "rescaled linear equation absorbs a log nonlinearity, not " +
                sc.make_model().name());
        }
        NseProblem p = sc.make_nse_problem();
        NseRunOptions opt;
        opt.dt = sc.dt;
        opt.t_end = sc.t_end;
        opt.cadence = sc.cadence;
        DgChainResult res = dg_chain(p, sc.initial_wavefunction(), opt);

        {
            std::ofstream out = art.open("_dg.csv");
            out << "t,linf_canonical_vs_transformed,linf_transformed_vs_linear\n";
            for (std::size_t i = 0; i < res.t.size(); ++i)
                write_row(out, {res.t[i], res.linf_ab[i], res.linf_bc[i]});
        }

        json summary;
        summary["kbar"] = dg_kbar(p.hbar, p.mass, p.diffusion.d0);
        summary["l2_transformed_vs_linear_final"] = res.l2_bc_final;
        double worst_ab = 0.0;
        for (double v : res.linf_ab) worst_ab = std::max(worst_ab, v);
        summary["max_linf_canonical_vs_transformed"] = worst_ab;
        art.write_manifest("dg-linearize", &sc, flags, started, std::move(summary));
        return kExitOk;
    });
}

int run_dispersion(const Scenario& sc, const RunFlags& flags) {
    return guarded([&] {
        const std::string started = iso_now();
        Artifacts art{flags.out_dir, sc.prefix, {}};

        NseProblem p = sc.make_nse_problem();
        const double base = 2.0 * std::numbers::pi / sc.length;

        std::vector<DispersionResult> rows;
        for (double k : sc.k_list) {
            int mode = static_cast<int>(std::lround(k / base));
            rows.push_back(dispersion_check(p, sc.amplitude, mode, sc.dt, sc.t_end,
                                            std::max(sc.cadence, 1)));
        }

        {
            std::ofstream out = art.open("_dispersion.csv");
            out << "k,amplitude,omega_measured,omega_predicted,rel_error,"
                   "amplitude_drift\n";
            for (const auto& r : rows)
                write_row(out, {r.k, r.amplitude, r.omega_measured, r.omega_predicted,
                                r.rel_error, r.max_amplitude_drift});
        }

        double worst = 0.0;
        bool warn = false;
        for (const auto& r : rows) {
            worst = std::max(worst, r.rel_error);
            warn = warn || r.amplitude_warning;
        }
        json summary;
        summary["model"] = p.model.name();
        summary["wavenumbers"] = rows.size();
        summary["worst_rel_error"] = worst;
        summary["amplitude_warning"] = warn;
        art.write_manifest("dispersion", &sc, flags, started, std::move(summary));
        return kExitOk;
    });
}

int run_catalog(const Scenario& sc, const RunFlags& flags) {
    return guarded([&] {
        const std::string started = iso_now();
        Artifacts art{flags.out_dir, sc.prefix, {}};

        EntropyModel m = sc.make_model();
        if (!(sc.rho_min > m.rho_valid_lo()) || !(sc.rho_max < m.rho_valid_hi())) {
            throw ConfigError("catalog grid [" + fmt17(sc.rho_min) + ", " +
                              fmt17(sc.rho_max) + "] leaves the model's valid "
                              "density interval (" + fmt17(m.rho_valid_lo()) +
                              ", " + fmt17(m.rho_valid_hi()) + ")");
        }

        std::vector<double> grid(sc.points);
        for (int i = 0; i < sc.points; ++i) {
            double s = sc.points == 1 ? 0.0 : static_cast<double>(i) / (sc.points - 1);
            grid[i] = sc.log_spacing
                          ? sc.rho_min * std::pow(sc.rho_max / sc.rho_min, s)
                          : sc.rho_min + s * (sc.rho_max - sc.rho_min);
        }

        {
            std::ofstream out = art.open("_catalog.csv");
            out << "rho,ln_kappa,dln_kappa,gamma,dgamma,f,f_tilde,f1,f2,"
                   "f1_tilde,f2_tilde\n";
            for (double rho : grid)
                write_row(out, {rho, m.ln_kappa(rho), m.dln_kappa(rho), m.gamma(rho),
                                m.dgamma(rho), m.f(rho), m.f_tilde(rho), m.f1(rho),
                                m.f2(rho), m.f1_tilde(rho), m.f2_tilde(rho)});
        }

        json summary;
        summary["model"] = m.name();
        summary["points"] = sc.points;
        summary["rho_min"] = sc.rho_min;
        summary["rho_max"] = sc.rho_max;
        art.write_manifest("catalog", &sc, flags, started, std::move(summary));
        return kExitOk;
    });
}

int run_verify(const Scenario* sc, const RunFlags& flags) {
    const std::string started = iso_now();
    if (sc != nullptr) {
        // Constructing the model surfaces parameter problems (monotonicity,
        // positivity) with the offending density interval in the message.
        try {
            (void)sc->make_model();
        } catch (const ConfigError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitValidation;
        } catch (const NumericError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitValidation;
        }
    }

    std::vector<AcceptanceItem> items;
    try {
        items = run_acceptance(0, flags.tolerance_scale, flags.seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumeric;
    }

    bool all_pass = true;
    json acc = json::array();
    for (const auto& it : items) {
        all_pass = all_pass && it.pass;
        std::printf("[%2d] %s %s: %s\n", it.id, it.pass ? "PASS" : "FAIL",
                    it.label.c_str(), it.detail.c_str());
        json row;
        row["id"] = it.id;
        row["label"] = it.label;
        row["pass"] = it.pass;
        row["detail"] = it.detail;
        acc.push_back(std::move(row));
    }
    std::printf("%s: %zu/%zu items passed\n", all_pass ? "OK" : "FAILED",
                static_cast<std::size_t>(
                    std::count_if(items.begin(), items.end(),
                                  [](const AcceptanceItem& it) { return it.pass; })),
                items.size());

    Artifacts art{flags.out_dir, "verify", {}};
    json summary;
    summary["items"] = items.size();
    summary["all_pass"] = all_pass;
    art.write_manifest("verify", sc, flags, started, std::move(summary), &acc);
    return all_pass ? kExitOk : kExitAcceptance;
}

}  // namespace kipsim
