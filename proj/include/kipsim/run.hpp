#pragma once
// Subcommand drivers behind the command line tool, plus the acceptance battery
// they share with the test suite. Each runner consumes a validated scenario,
// writes its CSV artifacts into an output directory, and finishes with a JSON
// manifest listing the artifacts, the scenario hash, timestamps, and a summary
// of the final diagnostics. Data files never contain wall-clock values, so a
// given scenario and seed reproduce byte-identical CSVs; timestamps live only
// in the manifest.
//
// Exit code convention (shared with the command line tool):
//   0  run completed and all requested checks passed
//   1  validation failure (bad scenario, bad model parameters, bad flags)
//   2  numerical failure during evolution (stability, domain, decomposition)
//   3  acceptance battery ran but at least one item failed

#include <cstdint>
#include <string>
#include <vector>

#include "kipsim/scenario.hpp"

namespace kipsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitAcceptance = 3;

struct RunFlags {
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    double tolerance_scale = 1.0;
};

// Relaxation run: evolves the density, writes the trajectory records
// (<prefix>_records.csv) and the final density next to the computed
// equilibrium (<prefix>_final.csv).
int run_nfpe_relax(const Scenario& sc, const RunFlags& flags);

// Wave evolution run: writes the moment trajectory with balance-law residual
// columns (<prefix>_records.csv) and a final field snapshot
// (<prefix>_snapshot.csv). Residuals use the centered-difference window, so
// the first and last record rows carry nan in the residual columns.
int run_nse_evolve(const Scenario& sc, const RunFlags& flags);

// Paired canonical/transformed evolution: writes t vs max-density-discrepancy
// (<prefix>_gauge.csv) and reports the worst discrepancy in the manifest.
int run_gauge_check(const Scenario& sc, const RunFlags& flags);

// Three-way chain (canonical, transformed, linear): writes per-record
// discrepancies for both adjacent pairs (<prefix>_dg.csv).
int run_dg_linearize(const Scenario& sc, const RunFlags& flags);

// Plane-wave frequency scan over the configured wavenumber list:
// writes one row per wavenumber (<prefix>_dispersion.csv).
int run_dispersion(const Scenario& sc, const RunFlags& flags);

// Dumps the functional catalog of the model over a density grid
// (<prefix>_catalog.csv).
int run_catalog(const Scenario& sc, const RunFlags& flags);

struct AcceptanceItem {
    int id = 0;
    std::string label;
    bool pass = false;
    std::string detail;  // worst observed values vs their thresholds
};

// Runs the acceptance battery. only_id selects a single item (0 runs all).
// tolerance_scale multiplies every threshold; seed feeds the randomized
// field checks. Items are independent and run serially in id order.
std::vector<AcceptanceItem> run_acceptance(int only_id, double tolerance_scale,
                                           std::uint64_t seed);

// The verify subcommand: optionally validates a scenario first (a model whose
// construction fails validation exits with code 1 and the constructor's
// message naming the offending density interval), then runs the full battery,
// writes verify_manifest.json, and maps any failed item to exit code 3.
int run_verify(const Scenario* sc, const RunFlags& flags);

}  // namespace kipsim
