#pragma once

#include <Eigen/Core>

#include "pdcfock/source.hpp"

namespace pdcfock {

// Schmidt decomposition f(w_i, w_s) = sum_k b_k zeta_k(w_i) xi_k(w_s) of a
// sampled joint amplitude. zeta are the idler-side modes (the arm that is
// filtered and heralded on), xi the signal-side modes carrying the heralded
// state. Columns are mode index k; coefficients descend. Modes are
// orthonormal under the grid quadrature sum_j w |m_k(j)|^2 = 1.
struct SchmidtDecomposition {
    Eigen::VectorXd b;
    Eigen::MatrixXcd zeta;  // idler axis samples x modes
    Eigen::MatrixXcd xi;    // signal axis samples x modes
    Axis idler;
    Axis signal;
    double cutoff = 0.0;

    int mode_count() const { return static_cast<int>(b.size()); }
};

// SVD of the weight-scaled amplitude. Modes with b_k < cutoff are dropped and
// the retained coefficients are NOT renormalised. The phase of each mode pair
// is fixed by making the largest-magnitude sample of zeta_k real positive
// (first such sample on ties); xi_k absorbs the opposite phase so the product
// is unchanged. Near-degenerate coefficients (within 1e-12 relative) are
// ordered by the first moment of |zeta_k|^2, ascending.
SchmidtDecomposition schmidt_decompose(const JsaGrid& jsa, double cutoff = 0.0);

// E = -sum_k b_k^2 log2 b_k^2 over the retained coefficients.
double entropy_of_entanglement(const Eigen::VectorXd& b);

// Rebuild the joint amplitude from the retained modes (exact when nothing was
// truncated).
JsaGrid reconstruct_jsa(const SchmidtDecomposition& dec);

}  // namespace pdcfock
