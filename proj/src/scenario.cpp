#include "kipsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace kipsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool str_to_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

bool str_to_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) return false;
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) return false;
    out = static_cast<int>(v);
    return true;
}

bool str_to_list(const std::string& s, std::vector<double>& out) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    out.clear();
    std::string tok;
    while (in >> tok) {
        double v;
        if (!str_to_double(tok, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

const char* kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Nfpe: return "nfpe";
        case ScenarioKind::Nse: return "nse";
        case ScenarioKind::GaugeCheck: return "gauge_check";
        case ScenarioKind::Dispersion: return "dispersion";
        case ScenarioKind::CatalogDump: return "catalog_dump";
    }
    return "?";
}

const char* variant_name(EntropyVariant v) {
    switch (v) {
        case EntropyVariant::BoltzmannGibbs: return "boltzmann_gibbs";
        case EntropyVariant::TwoParam: return "two_param";
        case EntropyVariant::Tsallis: return "tsallis";
        case EntropyVariant::Kaniadakis: return "kaniadakis";
        case EntropyVariant::Eip: return "eip";
    }
    return "?";
}

const char* initial_name(InitialKind k) {
    switch (k) {
        case InitialKind::Gaussian: return "gaussian";
        case InitialKind::PlaneWave: return "plane_wave";
        case InitialKind::Equilibrium: return "equilibrium";
        case InitialKind::Uniform: return "uniform";
    }
    return "?";
}

const char* diffusion_name(Diffusion::Kind k) {
    switch (k) {
        case Diffusion::Kind::Constant: return "constant";
        case Diffusion::Kind::SinT: return "sin_t";
        case Diffusion::Kind::TanhX: return "tanh_x";
    }
    return "?";
}

const char* potential_name(Potential::Kind k) {
    switch (k) {
        case Potential::Kind::None: return "none";
        case Potential::Kind::Harmonic: return "harmonic";
        case Potential::Kind::Polynomial: return "polynomial";
    }
    return "?";
}

// Every key the format knows, as "section.key"; anything else is a typo, and
// a known key showing up where it does not apply gets its own message.
const std::set<std::string>& vocabulary() {
    static const std::set<std::string> v = {
        "model.kind",         "model.variant",      "model.kappa_d",
        "model.r",            "model.q",            "model.kappa_e",
        "model.drift",        "grid.n",             "grid.length",
        "grid.rho_min",       "grid.rho_max",       "grid.points",
        "grid.log_spacing",   "physics.hbar",       "physics.mass",
        "physics.beta",       "physics.diffusion",  "physics.d0",
        "physics.epsilon",    "physics.omega",      "physics.g_coeffs",
        "potential.kind",     "potential.omega0",   "potential.coeffs",
        "initial.kind",       "initial.center",     "initial.width",
        "initial.boost",      "initial.chirp",      "initial.amplitude",
        "initial.k",          "initial.k_list",     "initial.pedestal",
        "integrator.dt",      "integrator.t_end",   "integrator.cadence",
        "integrator.representation",                "output.prefix",
        "output.tolerance_scale",
    };
    return v;
}

const std::set<std::string>& section_names() {
    static const std::set<std::string> v = {"model",   "grid",       "physics", "potential",
                                            "initial", "integrator", "output"};
    return v;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct Extractor {
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::vector<ScenarioError>* errors = nullptr;

    void fail(const std::string& where, const std::string& message) {
        errors->push_back({where, message});
    }

    Entry* find(const std::string& sec, const std::string& key) {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto e = s->second.find(key);
        if (e == s->second.end()) return nullptr;
        e->second.used = true;
        return &e->second;
    }

    // Optional typed getters: leave `out` untouched when the key is absent,
    // record an error when it is present but malformed.
    bool get_double(const std::string& sec, const std::string& key, double& out) {
        Entry* e = find(sec, key);
        if (!e) return false;
        double v;
        if (!str_to_double(e->value, v)) {
            fail(sec + "." + key, "expected a finite number, got '" + e->value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool get_int(const std::string& sec, const std::string& key, int& out) {
        Entry* e = find(sec, key);
        if (!e) return false;
        int v;
        if (!str_to_int(e->value, v)) {
            fail(sec + "." + key, "expected an integer, got '" + e->value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool get_bool(const std::string& sec, const std::string& key, bool& out) {
        Entry* e = find(sec, key);
        if (!e) return false;
        if (e->value == "true") {
            out = true;
        } else if (e->value == "false") {
            out = false;
        } else {
            fail(sec + "." + key, "expected true or false, got '" + e->value + "'");
            return false;
        }
        return true;
    }

    bool get_list(const std::string& sec, const std::string& key, std::vector<double>& out) {
        Entry* e = find(sec, key);
        if (!e) return false;
        std::vector<double> v;
        if (!str_to_list(e->value, v)) {
            fail(sec + "." + key, "expected a list of numbers, got '" + e->value + "'");
            return false;
        }
        out = std::move(v);
        return true;
    }

    bool get_string(const std::string& sec, const std::string& key, std::string& out) {
        Entry* e = find(sec, key);
        if (!e) return false;
        out = e->value;
        return true;
    }

    void require(const std::string& sec, const std::string& key, bool present) {
        if (!present && !find(sec, key)) fail(sec + "." + key, "required key is missing");
    }

    // After extraction: everything not consumed is either unknown or known
    // but inapplicable to this scenario's kind/variant.
    void report_leftovers() {
        for (const auto& [sec, keys] : sections)
            for (const auto& [key, e] : keys) {
                if (e.used) continue;
                const std::string where = sec + "." + key;
                if (vocabulary().count(where))
                    fail(where, "key does not apply to this scenario");
                else
                    fail(where, "unknown key");
            }
    }
};

bool snap_wavenumber(double length, double k_in, double& k_out, std::string& msg) {
    const double base = 2.0 * std::acos(-1.0) / length;
    const long j = std::lround(k_in / base);
    const double k_adm = base * static_cast<double>(j);
    if (std::fabs(k_in - k_adm) > 1e-9 * std::max(base, std::fabs(k_in))) {
        msg = "k = " + fmtg(k_in) + " is not on the periodic wavenumber lattice; nearest admissible k = " +
              fmt17(k_adm);
        return false;
    }
    if (j == 0) {
        msg = "plane-wave mode must be nonzero";
        return false;
    }
    k_out = k_adm;
    return true;
}

}  // namespace

ScenarioParse parse_scenario(const std::string& text) {
    ScenarioParse result;
    std::vector<ScenarioError>& errors = result.errors;

    Extractor ex;
    ex.errors = &errors;

    // Raw pass: sections, key = value lines, duplicates.
    {
        std::istringstream in(text);
        std::string line, current;
        bool skipping = false;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') {
                    errors.push_back({"line " + std::to_string(lineno), "malformed section header"});
                    skipping = true;
                    continue;
                }
                const std::string name = trim(t.substr(1, t.size() - 2));
                if (!section_names().count(name)) {
                    errors.push_back(
                        {"line " + std::to_string(lineno), "unknown section [" + name + "]"});
                    skipping = true;
                    continue;
                }
                current = name;
                skipping = false;
                ex.sections[current];  // materialize even if empty
                continue;
            }
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos) {
                errors.push_back({"line " + std::to_string(lineno), "expected 'key = value'"});
                continue;
            }
            if (skipping) continue;
            if (current.empty()) {
                errors.push_back({"line " + std::to_string(lineno), "key outside any section"});
                continue;
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) {
                errors.push_back({"line " + std::to_string(lineno), "empty key"});
                continue;
            }
            auto [it, inserted] = ex.sections[current].insert({key, Entry{value, lineno, false}});
            if (!inserted)
                errors.push_back({current + "." + key, "duplicate key (first set on line " +
                                                           std::to_string(it->second.line) + ")"});
        }
    }

    Scenario sc;

    // The kind gates every applicability judgment; without it the rest of the
    // file cannot be classified, so syntax errors are all that gets reported.
    std::string kind_str;
    if (!ex.get_string("model", "kind", kind_str)) {
        errors.push_back({"model.kind", "required key is missing"});
        return result;
    }
    if (kind_str == "nfpe") {
        sc.kind = ScenarioKind::Nfpe;
    } else if (kind_str == "nse") {
        sc.kind = ScenarioKind::Nse;
    } else if (kind_str == "gauge_check") {
        sc.kind = ScenarioKind::GaugeCheck;
    } else if (kind_str == "dispersion") {
        sc.kind = ScenarioKind::Dispersion;
    } else if (kind_str == "catalog_dump") {
        sc.kind = ScenarioKind::CatalogDump;
    } else {
        errors.push_back({"model.kind", "unknown scenario kind '" + kind_str + "'"});
        return result;
    }
    const bool catalog = sc.kind == ScenarioKind::CatalogDump;
    const bool evolving = !catalog;

    // [model] variant + parameters.
    std::string variant_str;
    if (!ex.get_string("model", "variant", variant_str)) {
        errors.push_back({"model.variant", "required key is missing"});
    } else if (variant_str == "boltzmann_gibbs") {
        sc.variant = EntropyVariant::BoltzmannGibbs;
    } else if (variant_str == "two_param") {
        sc.variant = EntropyVariant::TwoParam;
        ex.require("model", "kappa_d", ex.get_double("model", "kappa_d", sc.kappa_d));
        ex.require("model", "r", ex.get_double("model", "r", sc.r));
    } else if (variant_str == "tsallis") {
        sc.variant = EntropyVariant::Tsallis;
        ex.require("model", "q", ex.get_double("model", "q", sc.q));
    } else if (variant_str == "kaniadakis") {
        sc.variant = EntropyVariant::Kaniadakis;
        ex.require("model", "kappa_d", ex.get_double("model", "kappa_d", sc.kappa_d));
    } else if (variant_str == "eip") {
        sc.variant = EntropyVariant::Eip;
        ex.require("model", "kappa_e", ex.get_double("model", "kappa_e", sc.kappa_e));
        std::string drift_str;
        if (ex.get_string("model", "drift", drift_str)) {
            if (drift_str == "linear") {
                sc.drift = EipDrift::Linear;
            } else if (drift_str == "nonlinear") {
                sc.drift = EipDrift::Nonlinear;
            } else {
                errors.push_back({"model.drift", "expected linear or nonlinear"});
            }
        }
    } else {
        errors.push_back({"model.variant", "unknown model variant '" + variant_str + "'"});
    }

    // [grid]
    if (catalog) {
        ex.get_double("grid", "rho_min", sc.rho_min);
        ex.get_double("grid", "rho_max", sc.rho_max);
        ex.get_int("grid", "points", sc.points);
        ex.get_bool("grid", "log_spacing", sc.log_spacing);
        if (sc.points < 2) errors.push_back({"grid.points", "need at least 2 points"});
        if (!(sc.rho_max > sc.rho_min))
            errors.push_back({"grid.rho_max", "need rho_max > rho_min"});
        if (sc.log_spacing && !(sc.rho_min > 0.0))
            errors.push_back({"grid.rho_min", "log spacing needs rho_min > 0"});
        else if (!(sc.rho_min >= 0.0))
            errors.push_back({"grid.rho_min", "need rho_min >= 0"});
    } else {
        const bool have_n = ex.get_int("grid", "n", sc.n);
        const bool have_len = ex.get_double("grid", "length", sc.length);
        ex.require("grid", "n", have_n);
        ex.require("grid", "length", have_len);
        if (have_n && sc.n < 8) errors.push_back({"grid.n", "need at least 8 nodes"});
        if (have_len && !(sc.length > 0.0)) errors.push_back({"grid.length", "need length > 0"});
    }

    if (evolving) {
        // [physics]
        ex.get_double("physics", "hbar", sc.hbar);
        ex.get_double("physics", "mass", sc.mass);
        ex.get_double("physics", "beta", sc.beta);
        if (!(sc.hbar > 0.0)) errors.push_back({"physics.hbar", "need hbar > 0"});
        if (!(sc.mass > 0.0)) errors.push_back({"physics.mass", "need mass > 0"});
        if (!(sc.beta > 0.0)) errors.push_back({"physics.beta", "need beta > 0"});

        std::string diff_str = "constant";
        ex.get_string("physics", "diffusion", diff_str);
        double d0 = 0.1, epsilon = 0.0, omega = 1.0;
        const bool have_eps = ex.get_double("physics", "epsilon", epsilon);
        const bool have_omega = ex.get_double("physics", "omega", omega);
        ex.get_double("physics", "d0", d0);
        if (diff_str == "constant") {
            sc.diffusion = Diffusion::constant(d0);
            if (have_eps)
                errors.push_back({"physics.epsilon", "key does not apply to constant diffusion"});
            if (have_omega)
                errors.push_back({"physics.omega", "key does not apply to constant diffusion"});
        } else if (diff_str == "sin_t") {
            sc.diffusion = Diffusion::sin_t(d0, epsilon, omega);
        } else if (diff_str == "tanh_x") {
            sc.diffusion = Diffusion::tanh_x(d0, epsilon);
            if (have_omega)
                errors.push_back({"physics.omega", "key does not apply to tanh_x diffusion"});
        } else {
            errors.push_back({"physics.diffusion", "expected constant, sin_t, or tanh_x"});
        }
        if (!(d0 >= 0.0)) errors.push_back({"physics.d0", "need d0 >= 0"});
        if (sc.kind == ScenarioKind::Nfpe && !(d0 > 0.0))
            errors.push_back({"physics.d0", "relaxation needs d0 > 0"});
        if (!sc.diffusion.is_constant() && sc.kind != ScenarioKind::Nse)
            errors.push_back(
                {"physics.diffusion", "time/space-dependent diffusion applies to nse runs only"});
        if (std::fabs(epsilon) >= 1.0 && diff_str != "constant")
            errors.push_back({"physics.epsilon", "need |epsilon| < 1 to keep diffusion positive"});

        if (sc.kind == ScenarioKind::Nse || sc.kind == ScenarioKind::GaugeCheck) {
            ex.get_list("physics", "g_coeffs", sc.g_coeffs);
        } else if (ex.find("physics", "g_coeffs")) {
            errors.push_back(
                {"physics.g_coeffs", "bulk couplings apply to nse and gauge_check runs only"});
        }

        // [potential]
        std::string pot_str = "none";
        ex.get_string("potential", "kind", pot_str);
        if (pot_str == "none") {
            sc.potential = Potential::none();
            if (ex.find("potential", "omega0"))
                errors.push_back({"potential.omega0", "key does not apply to kind none"});
            if (ex.find("potential", "coeffs"))
                errors.push_back({"potential.coeffs", "key does not apply to kind none"});
        } else if (pot_str == "harmonic") {
            double omega0 = 1.0;
            ex.get_double("potential", "omega0", omega0);
            if (!(omega0 > 0.0)) errors.push_back({"potential.omega0", "need omega0 > 0"});
            sc.potential = Potential::harmonic(omega0);
        } else if (pot_str == "polynomial") {
            std::vector<double> coeffs;
            if (!ex.get_list("potential", "coeffs", coeffs))
                errors.push_back({"potential.coeffs", "polynomial potential needs coeffs"});
            sc.potential = Potential::polynomial(std::move(coeffs));
        } else {
            errors.push_back({"potential.kind", "expected none, harmonic, or polynomial"});
        }
        if (sc.kind == ScenarioKind::Dispersion && sc.potential.kind != Potential::Kind::None)
            errors.push_back({"potential.kind", "dispersion runs require no external potential"});

        // [initial]
        std::string init_str;
        if (!ex.get_string("initial", "kind", init_str)) {
            errors.push_back({"initial.kind", "required key is missing"});
            init_str = "";
        }
        if (init_str == "gaussian") {
            sc.initial = InitialKind::Gaussian;
            ex.get_double("initial", "center", sc.center);
            ex.require("initial", "width", ex.get_double("initial", "width", sc.width));
            ex.get_double("initial", "boost", sc.boost);
            ex.get_double("initial", "chirp", sc.chirp);
            ex.get_double("initial", "pedestal", sc.pedestal);
            if (!(sc.width > 0.0)) errors.push_back({"initial.width", "need width > 0"});
            if (!(sc.pedestal >= 0.0)) errors.push_back({"initial.pedestal", "need pedestal >= 0"});
        } else if (init_str == "plane_wave") {
            sc.initial = InitialKind::PlaneWave;
            ex.get_double("initial", "amplitude", sc.amplitude);
            if (!(sc.amplitude > 0.0)) errors.push_back({"initial.amplitude", "need amplitude > 0"});
            if (sc.kind == ScenarioKind::Dispersion) {
                if (!ex.get_list("initial", "k_list", sc.k_list))
                    errors.push_back({"initial.k_list", "dispersion runs need a k_list"});
            } else {
                ex.require("initial", "k", ex.get_double("initial", "k", sc.k));
            }
        } else if (init_str == "equilibrium") {
            sc.initial = InitialKind::Equilibrium;
            ex.get_double("initial", "pedestal", sc.pedestal);
            if (!(sc.pedestal >= 0.0)) errors.push_back({"initial.pedestal", "need pedestal >= 0"});
        } else if (init_str == "uniform") {
            sc.initial = InitialKind::Uniform;
        } else if (!init_str.empty()) {
            errors.push_back({"initial.kind",
                              "expected gaussian, plane_wave, equilibrium, or uniform"});
        }
        if (sc.kind == ScenarioKind::Nfpe && sc.initial == InitialKind::PlaneWave)
            errors.push_back({"initial.kind", "relaxation runs evolve densities, not plane waves"});
        if (sc.kind == ScenarioKind::Dispersion && sc.initial != InitialKind::PlaneWave)
            errors.push_back({"initial.kind", "dispersion runs need plane_wave initial states"});

        // Wavenumber admissibility on the periodic grid.
        if (sc.length > 0.0) {
            std::string msg;
            if (sc.initial == InitialKind::PlaneWave && sc.kind != ScenarioKind::Dispersion) {
                if (!snap_wavenumber(sc.length, sc.k, sc.k, msg))
                    errors.push_back({"initial.k", msg});
            }
            for (double& kv : sc.k_list) {
                if (!snap_wavenumber(sc.length, kv, kv, msg))
                    errors.push_back({"initial.k_list", msg});
            }
        }

        // [integrator]
        ex.get_double("integrator", "dt", sc.dt);
        ex.get_double("integrator", "t_end", sc.t_end);
        ex.get_int("integrator", "cadence", sc.cadence);
        if (!(sc.dt > 0.0)) errors.push_back({"integrator.dt", "need dt > 0"});
        if (!(sc.t_end >= 0.0)) errors.push_back({"integrator.t_end", "need t_end >= 0"});
        if (sc.cadence < 1) errors.push_back({"integrator.cadence", "need cadence >= 1"});
        std::string rep_str;
        if (ex.get_string("integrator", "representation", rep_str)) {
            if (sc.kind != ScenarioKind::Nse) {
                errors.push_back(
                    {"integrator.representation", "representation applies to nse runs only"});
            } else if (rep_str == "psi") {
                sc.representation = Representation::Psi;
            } else if (rep_str == "hydro") {
                sc.representation = Representation::Hydro;
            } else {
                errors.push_back({"integrator.representation", "expected psi or hydro"});
            }
        }
        if (sc.representation == Representation::Hydro) {
            // A winding phase is not single-valued on the periodic grid; the
            // hydro stepper differentiates sigma directly and would see the
            // seam. The psi path has no such restriction.
            if (sc.initial == InitialKind::PlaneWave)
                errors.push_back({"initial.kind", "plane waves wind; use the psi representation"});
            if (sc.boost != 0.0)
                errors.push_back({"initial.boost", "boosted phases wind; use the psi representation"});
            if (sc.chirp != 0.0)
                errors.push_back(
                    {"initial.chirp", "chirped phases are not periodic; use the psi representation"});
        }
    }

    // [output]
    ex.get_string("output", "prefix", sc.prefix);
    ex.get_double("output", "tolerance_scale", sc.tolerance_scale);
    if (sc.prefix.empty() ||
        sc.prefix.find_first_not_of(
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
            std::string::npos)
        errors.push_back({"output.prefix", "prefix must be nonempty [A-Za-z0-9_.-]"});
    if (!(sc.tolerance_scale > 0.0))
        errors.push_back({"output.tolerance_scale", "need tolerance_scale > 0"});

    ex.report_leftovers();

    // Model construction and the stability bound only mean anything once the
    // pieces above are individually sound.
    if (errors.empty()) {
        try {
            const EntropyModel model = sc.make_model();
            (void)model;
            switch (sc.kind) {
                case ScenarioKind::Nfpe: {
                    const NfpeProblem prob = sc.make_nfpe_problem();
                    const RealField rho0 = sc.initial_density();
                    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                    for (double rv : rho0) {
                        if (rv > prob.model.rho_floor()) lo = std::min(lo, rv);
                        hi = std::max(hi, rv);
                    }
                    const double bound = nfpe_stable_dt(prob, lo, hi);
                    if (sc.dt > bound)
                        errors.push_back({"integrator.dt",
                                          "dt = " + fmtg(sc.dt) +
                                              " exceeds the diffusive stability bound " +
                                              fmtg(bound) + "; suggested dt = " + fmtg(0.9 * bound)});
                    break;
                }
                case ScenarioKind::Nse:
                case ScenarioKind::GaugeCheck: {
                    const NseProblem prob = sc.make_nse_problem();
                    const Wavefunction w = sc.initial_wavefunction();
                    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                    for (const std::complex<double>& a : w.psi) {
                        const double rv = std::norm(a);
                        if (rv > prob.model.rho_floor()) lo = std::min(lo, rv);
                        hi = std::max(hi, rv);
                    }
                    const double bound = nse_stable_dt(prob, lo, hi);
                    if (sc.dt > bound)
                        errors.push_back({"integrator.dt",
                                          "dt = " + fmtg(sc.dt) + " exceeds the stability bound " +
                                              fmtg(bound) + "; suggested dt = " + fmtg(0.9 * bound)});
                    break;
                }
                case ScenarioKind::Dispersion: {
                    const NseProblem prob = sc.make_nse_problem();
                    const double rho0 = sc.amplitude * sc.amplitude;
                    const double bound = nse_stable_dt(prob, rho0, rho0);
                    if (sc.dt > bound)
                        errors.push_back({"integrator.dt",
                                          "dt = " + fmtg(sc.dt) + " exceeds the stability bound " +
                                              fmtg(bound) + "; suggested dt = " + fmtg(0.9 * bound)});
                    break;
                }
                case ScenarioKind::CatalogDump:
                    break;
            }
        } catch (const std::exception& e) {
            errors.push_back({"scenario", e.what()});
        }
    }

    if (errors.empty()) result.scenario = std::move(sc);
    return result;
}

Scenario parse_scenario_or_throw(const std::string& text) {
    ScenarioParse p = parse_scenario(text);
    if (p.ok()) return *std::move(p.scenario);
    std::string msg = "scenario validation failed:";
    for (const ScenarioError& e : p.errors) msg += "\n  " + e.where + ": " + e.message;
    throw ConfigError(msg);
}

EntropyModel Scenario::make_model() const {
    switch (variant) {
        case EntropyVariant::BoltzmannGibbs: return EntropyModel::boltzmann_gibbs();
        case EntropyVariant::TwoParam: return EntropyModel::two_param(kappa_d, r);
        case EntropyVariant::Tsallis: return EntropyModel::tsallis(q);
        case EntropyVariant::Kaniadakis: return EntropyModel::kaniadakis(kappa_d);
        case EntropyVariant::Eip: return EntropyModel::eip(kappa_e, drift);
    }
    throw ConfigError("unrecognized model variant");
}

NfpeProblem Scenario::make_nfpe_problem() const {
    return NfpeProblem{Grid1D::make(n, length), make_model(), potential, diffusion.value(0.0, 0.0),
                       beta};
}

NseProblem Scenario::make_nse_problem() const {
    return NseProblem{Grid1D::make(n, length), make_model(), potential, diffusion, g_coeffs, hbar,
                      mass};
}

RealField Scenario::initial_density() const {
    const Grid1D g = Grid1D::make(n, length);
    RealField rho(g.n);
    switch (initial) {
        case InitialKind::Gaussian: {
            const double norm = 1.0 / (width * std::sqrt(2.0 * std::acos(-1.0)));
            for (int i = 0; i < g.n; ++i) {
                const double u = (g.x[i] - center) / width;
                rho[i] = norm * std::exp(-0.5 * u * u);
            }
            break;
        }
        case InitialKind::Uniform:
            std::fill(rho.begin(), rho.end(), 1.0 / length);
            break;
        case InitialKind::Equilibrium:
            rho = equilibrium_density(make_model(), g, potential, beta);
            break;
        case InitialKind::PlaneWave:
            throw ConfigError("plane waves have no normalized density profile");
    }
    // Additive, so the floored profile stays smooth; a hard max() would put a
    // derivative kink where the tail meets the floor.
    if (pedestal > 0.0)
        for (double& rv : rho) rv += pedestal;
    const double mass_total = integrate(g, rho);
    if (!(mass_total > 0.0)) throw NumericError("initial density has no mass");
    for (double& rv : rho) rv /= mass_total;
    return rho;
}

Wavefunction Scenario::initial_wavefunction() const {
    const Grid1D g = Grid1D::make(n, length);
    Wavefunction w{g, ComplexField(g.n), hbar, mass};
    if (initial == InitialKind::PlaneWave) {
        for (int i = 0; i < g.n; ++i) w.psi[i] = std::polar(amplitude, k * g.x[i]);
        return w;
    }
    const RealField rho = initial_density();
    for (int i = 0; i < g.n; ++i) {
        const double dxc = g.x[i] - center;
        const double phase =
            initial == InitialKind::Gaussian ? boost * g.x[i] + chirp * dxc * dxc : 0.0;
        w.psi[i] = std::polar(std::sqrt(rho[i]), phase);
    }
    return w;
}

HydroPair Scenario::initial_hydro() const {
    const Grid1D g = Grid1D::make(n, length);
    HydroPair h{g, RealField(g.n), RealField(g.n, 0.0), hbar, mass};
    if (initial == InitialKind::PlaneWave) {
        std::fill(h.rho.begin(), h.rho.end(), amplitude * amplitude);
        for (int i = 0; i < g.n; ++i) h.sigma[i] = hbar * k * g.x[i];
        return h;
    }
    h.rho = initial_density();
    if (initial == InitialKind::Gaussian)
        for (int i = 0; i < g.n; ++i) {
            const double dxc = g.x[i] - center;
            h.sigma[i] = hbar * (boost * g.x[i] + chirp * dxc * dxc);
        }
    return h;
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream o;
    o << "[model]\n";
    o << "kind = " << kind_name(s.kind) << "\n";
    o << "variant = " << variant_name(s.variant) << "\n";
    switch (s.variant) {
        case EntropyVariant::BoltzmannGibbs: break;
        case EntropyVariant::TwoParam:
            o << "kappa_d = " << fmt17(s.kappa_d) << "\n";
            o << "r = " << fmt17(s.r) << "\n";
            break;
        case EntropyVariant::Tsallis: o << "q = " << fmt17(s.q) << "\n"; break;
        case EntropyVariant::Kaniadakis: o << "kappa_d = " << fmt17(s.kappa_d) << "\n"; break;
        case EntropyVariant::Eip:
            o << "kappa_e = " << fmt17(s.kappa_e) << "\n";
            o << "drift = " << (s.drift == EipDrift::Linear ? "linear" : "nonlinear") << "\n";
            break;
    }

    o << "\n[grid]\n";
    if (s.kind == ScenarioKind::CatalogDump) {
        o << "rho_min = " << fmt17(s.rho_min) << "\n";
        o << "rho_max = " << fmt17(s.rho_max) << "\n";
        o << "points = " << s.points << "\n";
        o << "log_spacing = " << (s.log_spacing ? "true" : "false") << "\n";
    } else {
        o << "n = " << s.n << "\n";
        o << "length = " << fmt17(s.length) << "\n";

        o << "\n[physics]\n";
        o << "hbar = " << fmt17(s.hbar) << "\n";
        o << "mass = " << fmt17(s.mass) << "\n";
        o << "beta = " << fmt17(s.beta) << "\n";
        o << "diffusion = " << diffusion_name(s.diffusion.kind) << "\n";
        o << "d0 = " << fmt17(s.diffusion.d0) << "\n";
        if (s.diffusion.kind == Diffusion::Kind::SinT) {
            o << "epsilon = " << fmt17(s.diffusion.epsilon) << "\n";
            o << "omega = " << fmt17(s.diffusion.omega) << "\n";
        } else if (s.diffusion.kind == Diffusion::Kind::TanhX) {
            o << "epsilon = " << fmt17(s.diffusion.epsilon) << "\n";
        }
        if (!s.g_coeffs.empty()) {
            o << "g_coeffs =";
            for (double c : s.g_coeffs) o << " " << fmt17(c);
            o << "\n";
        }

        o << "\n[potential]\n";
        o << "kind = " << potential_name(s.potential.kind) << "\n";
        if (s.potential.kind == Potential::Kind::Harmonic)
            o << "omega0 = " << fmt17(s.potential.omega0) << "\n";
        if (s.potential.kind == Potential::Kind::Polynomial) {
            o << "coeffs =";
            for (double c : s.potential.coeffs) o << " " << fmt17(c);
            o << "\n";
        }

        o << "\n[initial]\n";
        o << "kind = " << initial_name(s.initial) << "\n";
        switch (s.initial) {
            case InitialKind::Gaussian:
                o << "center = " << fmt17(s.center) << "\n";
                o << "width = " << fmt17(s.width) << "\n";
                o << "boost = " << fmt17(s.boost) << "\n";
                o << "chirp = " << fmt17(s.chirp) << "\n";
                o << "pedestal = " << fmt17(s.pedestal) << "\n";
                break;
            case InitialKind::PlaneWave:
                o << "amplitude = " << fmt17(s.amplitude) << "\n";
                if (s.kind == ScenarioKind::Dispersion) {
                    o << "k_list =";
                    for (double kv : s.k_list) o << " " << fmt17(kv);
                    o << "\n";
                } else {
                    o << "k = " << fmt17(s.k) << "\n";
                }
                break;
            case InitialKind::Equilibrium:
                o << "pedestal = " << fmt17(s.pedestal) << "\n";
                break;
            case InitialKind::Uniform: break;
        }

        o << "\n[integrator]\n";
        o << "dt = " << fmt17(s.dt) << "\n";
        o << "t_end = " << fmt17(s.t_end) << "\n";
        o << "cadence = " << s.cadence << "\n";
        if (s.kind == ScenarioKind::Nse)
            o << "representation = "
              << (s.representation == Representation::Hydro ? "hydro" : "psi") << "\n";
    }

    o << "\n[output]\n";
    o << "prefix = " << s.prefix << "\n";
    o << "tolerance_scale = " << fmt17(s.tolerance_scale) << "\n";
    return o.str();
}

std::uint64_t scenario_hash(const Scenario& s) {
    const std::string text = serialize_scenario(s);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace kipsim
