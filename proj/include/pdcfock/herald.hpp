#pragma once

#include <Eigen/Core>
#include <optional>

#include "pdcfock/filtering.hpp"

namespace pdcfock {

// Conditional figures of merit of a heralded state. `no_click` marks the case
// where the heralding detector can never fire (blocked filter or eta = 0):
// probability is 0 and the conditional metrics are absent rather than NaN.
// mode_weights holds the diagonal mode spectrum d_m of filtered heralds
// (weights of |n; tau_m> in the heralded state), empty otherwise.
struct HeraldReport {
    double probability = 0.0;
    bool no_click = false;
    std::optional<double> g2;
    std::optional<double> purity;
    std::optional<double> fidelity;
    Eigen::VectorXd mode_weights;
};

// Global normalisation N of the second-order pair state:
// N = { |1+chi^2|^2 + chi^2 sum b^2 + chi^4 S2 }^(-1/2) with
// S2 = sum_{k<k'} b_k^2 b_k'^2 + sum_k b_k^4.
double norm_constant(double chi, const Eigen::VectorXd& b);

// Largest pump amplitude for which the second-order truncation is reported:
// higher-order contamination stays below the percent level up to 0.5 for
// single heralds and 0.25 for double heralds.
double max_reporting_chi(int herald_n);

// Herald on exactly one idler photon with a perfect, unfiltered detector.
HeraldReport herald_single_perfect(double chi, const Eigen::VectorXd& b);

// Same herald with a non-unit-efficiency bucket detector (no spectral
// filtering). eta = 0 reports no_click.
HeraldReport herald_single_inefficient(double chi, double eta, const Eigen::VectorXd& b);

// Herald through a spectral filter folded with the detector efficiency.
// For a Delta filter the transmitted flux is measure-zero: probability is
// reported as 0 while the conditional metrics are the exact narrow-filter
// limits.
HeraldReport herald_single_filtered(double chi, const Eigen::VectorXd& b,
                                    const OverlapMatrices& ov);

// Two-photon heralds (exactly two idler photons seen). g2 is exactly 1/2 for
// every double herald: the conditional state has no components outside the
// two-photon sector.
HeraldReport herald_double_perfect(double chi, const Eigen::VectorXd& b);
HeraldReport herald_double_inefficient(double chi, double eta, const Eigen::VectorXd& b);
HeraldReport herald_double_filtered(double chi, const Eigen::VectorXd& b,
                                    const OverlapMatrices& ov);

}  // namespace pdcfock
