#pragma once

#include <string>
#include <vector>

#include "pdcfock/filtering.hpp"
#include "pdcfock/herald.hpp"
#include "pdcfock/schmidt.hpp"

namespace pdcfock {

// Metrics for one (chi, filter, herald photon number) configuration,
// dispatching to the matching closed form: unit-efficiency unfiltered,
// binary-efficiency unfiltered, or the spectral-overlap form.
HeraldReport evaluate_herald(double chi, const SchmidtDecomposition& dec,
                             const FilterSpec& filter, int herald_n);

// Same dispatch with the spectral overlap work shared across calls: `base`
// must come from make_overlap_base(dec, filter) for spectrally filtering
// kinds and may be null for FilterSpec::Kind::None. `eta` overrides the efficiency
// baked into `filter`.
HeraldReport evaluate_herald_prepared(double chi, const Eigen::VectorXd& b,
                                      const FilterSpec& filter, const FilterOverlapBase* base,
                                      double eta, int herald_n);

enum class SolveStatus {
    Solved,             // interior root: fidelity meets the target within 1e-6
    ChiIndependent,     // fidelity does not vary with chi; any chi qualifies
    AtChiBound,         // target still met at chi_max; reported at the bound
    TargetUnreachable,  // fidelity below target already in the chi -> 0 limit
    Failed,             // monotonicity probe or bisection failed; see detail
};

const char* to_string(SolveStatus status);

struct ChiSolution {
    SolveStatus status = SolveStatus::Failed;
    double chi = 0.0;      // meaningful for Solved / ChiIndependent / AtChiBound
    HeraldReport report;   // metrics evaluated at `chi` (at 0 for unreachable)
    std::string detail;    // human-readable note for non-Solved outcomes
};

// Largest chi in [0, chi_max] whose heralded fidelity stays at or above
// `target`. Fidelity is non-increasing in chi for every configuration this
// models; monotonicity is probed on an 8-point grid before bisecting (60
// iterations), and a violation returns Failed instead of a silent root.
ChiSolution solve_chi_for_fidelity(const SchmidtDecomposition& dec, const FilterSpec& filter,
                                   int herald_n, double target_fidelity, double chi_max);

struct SweepRow {
    FilterSpec filter;
    ChiSolution solution;
    double entropy = 0.0;  // entropy of entanglement of the source spectrum
};

// One solve per filter variant, in the given order; per-row failures are
// recorded in the row status and do not abort the sweep. Rows are computed
// concurrently when threads > 1 with output identical to the serial order.
std::vector<SweepRow> sweep_filter_width(const SchmidtDecomposition& dec,
                                         const std::vector<FilterSpec>& filters, int herald_n,
                                         double target_fidelity, double chi_max, int threads);

// Filter ladder for sweeps: Delta first (zero width), Gaussian widths
// ascending, unfiltered last. mu_f applies to the spectral kinds; eta to all.
std::vector<FilterSpec> filter_ladder(double mu_f, std::vector<double> sigma_fs, double eta,
                                      bool include_delta, bool include_unfiltered);

struct SurfaceCell {
    double chi = 0.0;
    double eta = 0.0;
    HeraldReport report;
};

// Dense metric table over a (chi, eta) grid at a fixed filter shape; the
// grid efficiencies override the one in `filter`. Cells are emitted row-major
// (chi outer, eta inner) and are deterministic for any thread count.
std::vector<SurfaceCell> metric_surface(const SchmidtDecomposition& dec, const FilterSpec& filter,
                                        const std::vector<double>& chis,
                                        const std::vector<double>& etas, int herald_n,
                                        int threads);

}  // namespace pdcfock
