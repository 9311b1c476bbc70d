#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kipsim/run.hpp"
#include "kipsim/scenario.hpp"

namespace {

using kipsim::RunFlags;
using kipsim::Scenario;
using kipsim::ScenarioKind;

struct SubSpec {
    std::string name;
    std::string help;
    ScenarioKind kind;
    int (*runner)(const Scenario&, const RunFlags&);
};

const SubSpec kSubs[] = {
    {"nfpe-relax", "evolve a density toward its equilibrium and compare",
     ScenarioKind::Nfpe, kipsim::run_nfpe_relax},
    {"nse-evolve", "evolve a wavefunction (or its hydrodynamic pair) and report moments",
     ScenarioKind::Nse, kipsim::run_nse_evolve},
    {"gauge-check", "evolve the phase-shifted pair and report the density gap",
     ScenarioKind::GaugeCheck, kipsim::run_gauge_check},
    {"dg-linearize", "run the canonical/transformed/linear chain for the log model",
     ScenarioKind::Nse, kipsim::run_dg_linearize},
    {"dispersion", "scan plane-wave frequencies over the configured wavenumbers",
     ScenarioKind::Dispersion, kipsim::run_dispersion},
    {"catalog", "dump the model's transport functionals over a density grid",
     ScenarioKind::CatalogDump, kipsim::run_catalog},
};

const char* kind_label(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Nfpe: return "nfpe";
        case ScenarioKind::Nse: return "nse";
        case ScenarioKind::GaugeCheck: return "gauge_check";
        case ScenarioKind::Dispersion: return "dispersion";
        case ScenarioKind::CatalogDump: return "catalog";
    }
    return "?";
}

// Returns false (with errors already printed) when the file cannot be read or
// does not validate.
bool load_scenario(const std::string& path, Scenario& out) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "error: cannot read scenario file %s\n", path.c_str());
        return false;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    kipsim::ScenarioParse parsed = kipsim::parse_scenario(buf.str());
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors)
            std::fprintf(stderr, "%s: %s\n", e.where.c_str(), e.message.c_str());
        return false;
    }
    out = *parsed.scenario;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropic diffusion and wave simulator"};
    app.require_subcommand(1);

    struct SubState {
        CLI::App* cmd = nullptr;
        std::string scenario_path;
        RunFlags flags;
    };
    std::map<std::string, SubState> states;

    auto add_common = [](CLI::App* cmd, SubState& st, bool scenario_required) {
        auto* opt = cmd->add_option("--scenario", st.scenario_path, "scenario file (INI)");
        if (scenario_required) opt->required();
        cmd->add_option("--out", st.flags.out_dir, "output directory")
            ->capture_default_str();
        cmd->add_option("--seed", st.flags.seed, "seed for randomized checks")
            ->capture_default_str();
        cmd->add_option("--tolerance-scale", st.flags.tolerance_scale,
                        "multiplier applied to acceptance thresholds")
            ->capture_default_str();
    };

    for (const SubSpec& spec : kSubs) {
        SubState& st = states[spec.name];
        st.cmd = app.add_subcommand(spec.name, spec.help);
        add_common(st.cmd, st, true);
    }
    SubState& verify = states["verify"];
    verify.cmd = app.add_subcommand(
        "verify", "run the acceptance battery (optionally validating a scenario first)");
    add_common(verify.cmd, verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kipsim::kExitOk : kipsim::kExitValidation;
    }

    for (const SubSpec& spec : kSubs) {
        SubState& st = states[spec.name];
        if (!st.cmd->parsed()) continue;
        Scenario sc;
        if (!load_scenario(st.scenario_path, sc)) return kipsim::kExitValidation;
        if (sc.kind != spec.kind) {
            std::fprintf(stderr,
                         "error: scenario kind '%s' does not fit subcommand '%s' "
                         "(expects kind '%s')\n",
                         kind_label(sc.kind), spec.name.c_str(), kind_label(spec.kind));
            return kipsim::kExitValidation;
        }
        return spec.runner(sc, st.flags);
    }

    if (verify.cmd->parsed()) {
        if (!verify.scenario_path.empty()) {
            Scenario sc;
            if (!load_scenario(verify.scenario_path, sc)) return kipsim::kExitValidation;
            return kipsim::run_verify(&sc, verify.flags);
        }
        return kipsim::run_verify(nullptr, verify.flags);
    }
    return kipsim::kExitValidation;
}
