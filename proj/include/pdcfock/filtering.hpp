#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "pdcfock/schmidt.hpp"

namespace pdcfock {

// Spectral filter in the heralding (idler) arm plus detector efficiency eta.
// The filter amplitude transmission T~(omega) lies in [0,1]; the detector
// efficiency is folded into the effective beamsplitter as
//   T(omega) = T~(omega) sqrt(eta),  R(omega) = sqrt(1 - |T~|^2 eta),
// so |T|^2 + |R|^2 = 1 pointwise.
struct FilterSpec {
    enum class Kind { None, Gaussian, Delta, Table };
    Kind kind = Kind::None;
    double mu_f = 0.0;     // centre frequency (Gaussian / Delta), rad/s
    double sigma_f = 0.0;  // amplitude sigma (Gaussian), rad/s
    double eta = 1.0;      // detector efficiency in [0,1]
    // Table kind: sorted sample points and amplitude transmissions in [0,1];
    // linearly interpolated, zero outside the tabulated range.
    std::vector<double> table_omega;
    std::vector<double> table_value;

    // Amplitude transmission T~ at a frequency. Not defined for Delta.
    double amplitude_at(double omega) const;
    void validate() const;  // throws std::invalid_argument on bad parameters
};

// Effective beamsplitter sampled on an axis. For the Delta kind the
// transmission is a measure-zero spike: `delta` is set, `delta_index` is the
// axis sample carrying it, and T/R hold the linearised limit (T nonzero only
// on that sample, R identically 1). Metrics computed from this limit are the
// exact narrow-filter limits; the transmitted probability itself vanishes.
struct FoldedFilter {
    Eigen::VectorXd T;
    Eigen::VectorXd R;
    bool delta = false;
    int delta_index = -1;
    double eta = 1.0;
};

FoldedFilter fold_detector(const FilterSpec& filter, const Axis& axis);

// Mode-space overlap matrices of the folded filter,
//   Tmat[k,k'] = integral |T|^2 zeta_k zeta_k'^*,
//   Rmat[k,k'] = integral |R|^2 zeta_k zeta_k'^*,
// computed by direct quadrature on the idler axis. t_zeta/r_zeta are the
// per-mode transmitted/reflected amplitudes sqrt(diagonal). For Delta, Tmat
// is the rank-1 limit eta * zeta(mu_f) zeta(mu_f)^H and Rmat the plain mode
// Gram matrix; `delta` records that the transmitted flux is measure-zero.
struct OverlapMatrices {
    Eigen::MatrixXcd Tmat;
    Eigen::MatrixXcd Rmat;
    Eigen::VectorXd t_zeta;
    Eigen::VectorXd r_zeta;
    bool delta = false;
};

// Precomputed eta-independent pieces: tmat_unit is the overlap of |T~|^2
// (efficiency 1), gram the quadrature Gram matrix of the modes. Because the
// folding is linear in eta (|T|^2 = eta |T~|^2, |R|^2 = 1 - eta |T~|^2) a
// surface over eta reuses the same integrals.
struct FilterOverlapBase {
    Eigen::MatrixXcd tmat_unit;
    Eigen::MatrixXcd gram;
    bool delta = false;

    OverlapMatrices at_eta(double eta) const;
};

FilterOverlapBase make_overlap_base(const SchmidtDecomposition& dec, const FilterSpec& filter);
OverlapMatrices overlap_matrices(const SchmidtDecomposition& dec, const FilterSpec& filter);

enum class FilterSide { Transmitted, Reflected };

// Modified Gram-Schmidt (with one re-orthogonalisation pass) of the filtered
// idler modes T(omega) zeta_k(omega), processed in order of descending
// Schmidt coefficient. Vectors whose residual drops below 1e-10 of the
// largest filtered-mode norm are dropped. phi columns are the orthonormal
// filtered modes; u(k, j) = <phi_j | T zeta_k> reproduces
// sum_j u(k,j) u(k',j)^* = Tmat[k,k']. Not defined for Delta filters.
struct OrthogonalizedModes {
    Eigen::MatrixXcd phi;  // axis samples x rank
    Eigen::MatrixXcd u;    // modes x rank
    int rank = 0;
};

OrthogonalizedModes orthogonalize_filtered_modes(const SchmidtDecomposition& dec,
                                                 const FilterSpec& filter,
                                                 FilterSide side = FilterSide::Transmitted);

// Eigen-decomposition of M = diag(b) Tmat diag(b): the heralded signal state
// is diagonal in the rotated modes tau_m = sum_k coeff(k, m) xi_k with
// non-negative weights lambda (descending; tiny negative rounding clamped).
struct DiagonalModeSpectrum {
    Eigen::VectorXd lambda;
    Eigen::MatrixXcd coeff;  // columns are eigenvectors
};

DiagonalModeSpectrum diagonalize_signal(const Eigen::VectorXd& b, const Eigen::MatrixXcd& tmat);

}  // namespace pdcfock
