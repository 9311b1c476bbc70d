// Prints one pass/fail line per acceptance item and exits nonzero if any
// requested item fails. ctest registers each item as its own test via
// --criterion N; running with no arguments covers the whole battery.

#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "kipsim/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance battery"};
    int criterion = 0;
    double tolerance_scale = 1.0;
    std::uint64_t seed = 1;
    app.add_option("--criterion", criterion, "run a single item (1-11; 0 runs all)")
        ->capture_default_str();
    app.add_option("--tolerance-scale", tolerance_scale, "threshold multiplier")
        ->capture_default_str();
    app.add_option("--seed", seed, "seed for randomized checks")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kipsim::kExitOk : kipsim::kExitValidation;
    }

    std::vector<kipsim::AcceptanceItem> items;
    try {
        items = kipsim::run_acceptance(criterion, tolerance_scale, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kipsim::kExitValidation;
    }

    bool all_pass = true;
    for (const auto& it : items) {
        all_pass = all_pass && it.pass;
        std::printf("[%2d] %s %s: %s\n", it.id, it.pass ? "PASS" : "FAIL",
                    it.label.c_str(), it.detail.c_str());
    }
    return all_pass ? kipsim::kExitOk : kipsim::kExitAcceptance;
}
