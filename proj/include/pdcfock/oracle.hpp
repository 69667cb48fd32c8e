#pragma once

#include <Eigen/Core>

#include "pdcfock/filtering.hpp"
#include "pdcfock/source.hpp"

namespace pdcfock {

// Brute-force reference: the pair state expanded in an occupation basis over
// frequency bins, truncated at two photons per arm. The idler arm lives in an
// extended register of 2n modes: slots [0, n) are the transmitted detector
// port, slots [n, 2n) the reflected port; before the beamsplitter acts all
// idler amplitude sits in the transmitted slots.
//
//   vac            : vacuum amplitude
//   one(a, s)      : one idler photon in extended slot a, one signal photon
//                    in bin s (normalised occupation basis)
//   two            : symmetric tensor t[(a,b),(s,t)] of the two-pair sector,
//                    |psi_2> = sum t_{ab,st} a+_a a+_b b+_s b+_t |0>,
//                    stored dense over ordered indices (a + 2n b, s + n t);
//                    its norm^2 contribution is 4 sum |t|^2.
struct BinnedState {
    int n_bins = 0;
    std::complex<double> vac;
    Eigen::MatrixXcd one;  // 2n x n
    Eigen::MatrixXcd two;  // (2n)^2 x n^2
};

// Maximum bin count the oracle accepts (memory for `two` grows as n^4).
inline constexpr int oracle_max_bins = 32;

// Expand the discretised pair state to second order and normalise. The grid
// must be square (same idler/signal sample count) and at most oracle_max_bins
// wide.
BinnedState build_binned_state(const JsaGrid& jsa, double chi);

// Send each idler bin through its own beamsplitter (transmitted slot i,
// reflected slot n+i). For a delta fold the map is the linearised
// measure-zero tap produced by fold_detector: transmitted amplitudes are
// infinitesimal (scale cancels in conditional metrics) and reflection is
// unity, so the state norm is no longer meaningful for absolute rates.
void apply_binwise_beamsplitter(BinnedState& state, const FoldedFilter& fold);

// Occupation probabilities of seeing 0, 1 or 2 photons in the transmitted
// detector port.
Eigen::Vector3d herald_probabilities(const BinnedState& state);

// Conditional signal state after projecting the transmitted port onto exactly
// `herald_n` photons and tracing out both idler ports. Block diagonal over
// signal photon number: rho1 on bins, rho2 on the normalised pair basis
// (s <= t, index P(s,t) = t(t+1)/2 + s). Blocks are scaled so the total trace
// is 1; `probability` is the herald weight.
struct HeraldedSignal {
    double probability = 0.0;
    Eigen::MatrixXcd rho1;  // n x n
    Eigen::MatrixXcd rho2;  // P x P, P = n(n+1)/2
};

HeraldedSignal herald_and_reduce(const BinnedState& state, int herald_n);

// Metrics read off the conditional density matrix: mode-summed normally
// ordered g2, tr rho^2, and the best overlap with a single-mode Fock state
// (largest rho1 eigenvalue for n=1; for n=2 the maximum of <2;tau|rho|2;tau>
// over the one-body eigenbasis of the two-photon block).
struct OracleMetrics {
    double g2 = 0.0;
    double purity = 0.0;
    double fidelity = 0.0;
};

OracleMetrics metrics_from_density_matrix(const HeraldedSignal& sig, int herald_n);

}  // namespace pdcfock
