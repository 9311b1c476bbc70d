#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kipsim/nfpe.hpp"
#include "kipsim/nse.hpp"

namespace kipsim {

// Declarative run descriptions: one INI-style text file binds a model, grid,
// physical constants, potential, initial state, integrator settings, and
// output naming.  Sections: [model] [grid] [physics] [potential] [initial]
// [integrator] [output]; `key = value` lines; '#' or ';' comment lines.
// Unknown sections and keys are errors, as are known keys that do not apply
// to the configured kind or variant (a q for the exclusion-inclusion model is
// a typo, not an extension point).  Parsing is total: the result carries
// either a validated Scenario or the full list of what is wrong, never just
// the first complaint.

enum class ScenarioKind { Nfpe, Nse, GaugeCheck, Dispersion, CatalogDump };
enum class InitialKind { Gaussian, PlaneWave, Equilibrium, Uniform };

struct Scenario {
    // [model]
    ScenarioKind kind = ScenarioKind::Nse;
    EntropyVariant variant = EntropyVariant::BoltzmannGibbs;
    double kappa_d = 0.0;  // two_param / kaniadakis
    double r = 0.0;        // two_param
    double q = 1.0;        // tsallis
    double kappa_e = 0.0;  // eip
    EipDrift drift = EipDrift::Linear;

    // [grid] - spatial for evolving kinds, a density grid for catalog dumps
    int n = 0;
    double length = 0.0;
    double rho_min = 1e-3;
    double rho_max = 1.0;
    int points = 200;
    bool log_spacing = true;

    // [physics]
    double hbar = 1.0;
    double mass = 1.0;
    double beta = 1.0;
    Diffusion diffusion = Diffusion::constant(0.1);
    std::vector<double> g_coeffs;

    // [potential]
    Potential potential = Potential::none();

    // [initial]
    InitialKind initial = InitialKind::Gaussian;
    double center = 0.0;
    double width = 1.0;
    double boost = 0.0;  // phase wavenumber of a gaussian packet
    double chirp = 0.0;  // quadratic phase coefficient
    double amplitude = 1.0;
    double k = 0.0;              // plane-wave wavenumber (snapped to the lattice)
    std::vector<double> k_list;  // dispersion kind: the scanned wavenumbers
    double pedestal = 0.0;       // uniform density added before renormalizing

    // [integrator]
    double dt = 1e-3;
    double t_end = 1.0;
    int cadence = 10;
    Representation representation = Representation::Psi;  // nse kind only

    // [output]
    std::string prefix = "run";
    double tolerance_scale = 1.0;

    // Constructors for the validated pieces.  These assume a Scenario that
    // came out of parse_scenario (or equivalent hand-filled state); they throw
    // the underlying ConfigError/NumericError otherwise.
    EntropyModel make_model() const;
    NfpeProblem make_nfpe_problem() const;
    NseProblem make_nse_problem() const;
    RealField initial_density() const;          // unit mass on the grid
    Wavefunction initial_wavefunction() const;  // density as above, phase from boost/chirp
    HydroPair initial_hydro() const;
};

struct ScenarioError {
    std::string where;  // "section.key" or "line N"
    std::string message;
};

struct ScenarioParse {
    std::optional<Scenario> scenario;
    std::vector<ScenarioError> errors;
    bool ok() const { return scenario.has_value(); }
};

ScenarioParse parse_scenario(const std::string& text);

// Joins the error list into one ConfigError for callers without error-list
// plumbing of their own.
Scenario parse_scenario_or_throw(const std::string& text);

// Canonical form: fixed section and key order, every applicable default
// written out, %.17g numbers.  parse(serialize(s)) reproduces s exactly, and
// serializing again reproduces the same bytes.
std::string serialize_scenario(const Scenario& s);

// FNV-1a over the canonical serialization; identifies the scenario in run
// manifests independent of incidental file formatting.
std::uint64_t scenario_hash(const Scenario& s);

}  // namespace kipsim
