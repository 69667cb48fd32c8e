#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pdcfock {

// Randomized equivalence run: low-rank joint amplitudes on coarse grids are
// evaluated through two fully independent routes — the mode-space closed
// forms and the brute-force binned Fock expansion — and every reported
// metric is compared relatively.
struct OracleSuiteConfig {
    int instances = 50;
    std::uint64_t seed = 20260816ULL;
    double tolerance = 1e-8;
    int min_bins = 8;
    int max_bins = 12;
};

struct OracleCaseResult {
    std::string label;        // instance parameters, human readable
    double max_rel_err = 0.0; // worst metric mismatch across both herald numbers
    bool pass = true;
};

struct OracleSuiteReport {
    std::vector<OracleCaseResult> cases;
    double max_rel_err = 0.0;
    int failures = 0;
    double tolerance = 0.0;
    // Two-photon g2 is pinned at 1/2 by the truncation; worst deviation seen
    // across every n=2 evaluation in the run (both routes).
    double max_g2_half_dev = 0.0;

    bool all_pass() const { return failures == 0; }
};

// Relative disagreement used by the suite; the floor keeps exact-zero vs
// rounding-noise comparisons meaningful.
double relative_error(double a, double b);

OracleSuiteReport run_oracle_suite(const OracleSuiteConfig& cfg);

}  // namespace pdcfock
