#include "pdcfock/filtering.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdcfock {

void FilterSpec::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("detector efficiency must be in [0,1]");
    switch (kind) {
        case Kind::None:
        case Kind::Delta:
            break;
        case Kind::Gaussian:
            if (!(sigma_f > 0.0)) throw std::invalid_argument("gaussian filter width must be positive");
            break;
        case Kind::Table: {
            if (table_omega.size() != table_value.size() || table_omega.size() < 2)
                throw std::invalid_argument("table filter needs at least two samples");
            for (size_t j = 0; j + 1 < table_omega.size(); ++j)
                if (!(table_omega[j] < table_omega[j + 1]))
                    throw std::invalid_argument("table filter frequencies must be strictly increasing");
            for (double v : table_value)
                if (!(v >= 0.0 && v <= 1.0))
                    throw std::invalid_argument("table filter transmission must be in [0,1]");
            break;
        }
    }
}

double FilterSpec::amplitude_at(double omega) const {
    switch (kind) {
        case Kind::None:
            return 1.0;
        case Kind::Gaussian: {
            const double x = (omega - mu_f) / sigma_f;
            return std::exp(-0.5 * x * x);
        }
        case Kind::Table: {
            if (omega <= table_omega.front() || omega >= table_omega.back()) {
                // exact endpoint still counts; beyond the measured band blocks
                if (omega == table_omega.front()) return table_value.front();
                if (omega == table_omega.back()) return table_value.back();
                return 0.0;
            }
            const auto it = std::upper_bound(table_omega.begin(), table_omega.end(), omega);
            const size_t hi = static_cast<size_t>(it - table_omega.begin());
            const size_t lo = hi - 1;
            const double t = (omega - table_omega[lo]) / (table_omega[hi] - table_omega[lo]);
            return table_value[lo] + t * (table_value[hi] - table_value[lo]);
        }
        case Kind::Delta:
            throw std::logic_error("delta filter has no pointwise amplitude");
    }
    throw std::logic_error("unknown filter kind");
}

FoldedFilter fold_detector(const FilterSpec& filter, const Axis& axis) {
    filter.validate();
    FoldedFilter out;
    out.eta = filter.eta;
    const int n = axis.size();
    out.T.setZero(n);
    out.R.setOnes(n);
    if (filter.kind == FilterSpec::Kind::Delta) {
        out.delta = true;
        out.delta_index = axis.nearest_index(filter.mu_f);
        // Linearised measure-zero limit: an infinitesimal tap on one sample,
        // reflection left untouched. The overall tap scale cancels from every
        // conditional metric.
        out.T[out.delta_index] = std::sqrt(filter.eta);
        return out;
    }
    for (int j = 0; j < n; ++j) {
        const double t_amp = filter.amplitude_at(axis.omega[j]);
        const double t2 = t_amp * t_amp * filter.eta;
        out.T[j] = t_amp * std::sqrt(filter.eta);
        out.R[j] = std::sqrt(std::max(0.0, 1.0 - t2));
    }
    return out;
}

FilterOverlapBase make_overlap_base(const SchmidtDecomposition& dec, const FilterSpec& filter) {
    filter.validate();
    FilterOverlapBase base;
    const double w = dec.idler.weight();
    const Eigen::MatrixXcd& z = dec.zeta;
    base.gram = z.transpose() * (w * z.conjugate());

    if (filter.kind == FilterSpec::Kind::Delta) {
        base.delta = true;
        const int idx = dec.idler.nearest_index(filter.mu_f);
        Eigen::VectorXcd at_peak = z.row(idx).transpose();
        base.tmat_unit = at_peak * at_peak.adjoint();
        return base;
    }
    const int n = dec.idler.size();
    Eigen::VectorXd t2(n);
    for (int j = 0; j < n; ++j) {
        const double a = filter.amplitude_at(dec.idler.omega[j]);
        t2[j] = a * a * w;
    }
    base.tmat_unit = z.transpose() * t2.asDiagonal() * z.conjugate();
    return base;
}

OverlapMatrices FilterOverlapBase::at_eta(double eta) const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("detector efficiency must be in [0,1]");
    OverlapMatrices ov;
    ov.delta = delta;
    ov.Tmat = eta * tmat_unit;
    ov.Rmat = delta ? gram : (gram - ov.Tmat).eval();
    const int k = static_cast<int>(ov.Tmat.rows());
    ov.t_zeta.resize(k);
    ov.r_zeta.resize(k);
    for (int j = 0; j < k; ++j) {
        ov.t_zeta[j] = std::sqrt(std::max(0.0, ov.Tmat(j, j).real()));
        ov.r_zeta[j] = std::sqrt(std::max(0.0, ov.Rmat(j, j).real()));
    }
    return ov;
}

OverlapMatrices overlap_matrices(const SchmidtDecomposition& dec, const FilterSpec& filter) {
    return make_overlap_base(dec, filter).at_eta(filter.eta);
}

OrthogonalizedModes orthogonalize_filtered_modes(const SchmidtDecomposition& dec,
                                                 const FilterSpec& filter, FilterSide side) {
    if (filter.kind == FilterSpec::Kind::Delta)
        throw std::invalid_argument("delta filter modes are not square integrable");
    const FoldedFilter fold = fold_detector(filter, dec.idler);
    const Eigen::VectorXd& amp = (side == FilterSide::Transmitted) ? fold.T : fold.R;

    const int n = dec.idler.size();
    const int K = dec.mode_count();
    const double w = dec.idler.weight();

    Eigen::MatrixXcd g(n, K);
    for (int k = 0; k < K; ++k) g.col(k) = amp.cast<std::complex<double>>().cwiseProduct(dec.zeta.col(k));

    double scale = 0.0;
    for (int k = 0; k < K; ++k) scale = std::max(scale, std::sqrt(w) * g.col(k).norm());
    const double drop = 1e-10 * scale;

    OrthogonalizedModes out;
    out.phi.resize(n, K);
    auto dot = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
        return w * a.dot(b);  // Eigen dot conjugates the left argument
    };
    int rank = 0;
    for (int k = 0; k < K; ++k) {
        Eigen::VectorXcd v = g.col(k);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < rank; ++j) v -= out.phi.col(j) * dot(out.phi.col(j), v);
        const double nrm = std::sqrt(w) * v.norm();
        if (nrm <= drop || scale == 0.0) continue;
        out.phi.col(rank) = v / nrm;  // quadrature-normalised
        ++rank;
    }
    out.phi.conservativeResize(n, rank);
    out.rank = rank;
    out.u.resize(K, rank);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < rank; ++j) out.u(k, j) = dot(out.phi.col(j), g.col(k));
    return out;
}

DiagonalModeSpectrum diagonalize_signal(const Eigen::VectorXd& b, const Eigen::MatrixXcd& tmat) {
    if (b.size() != tmat.rows() || tmat.rows() != tmat.cols())
        throw std::invalid_argument("coefficients and overlap matrix sizes disagree");
    const Eigen::MatrixXcd m = b.asDiagonal() * tmat * b.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
    if (eig.info() != Eigen::Success) throw std::runtime_error("signal-mode eigensolve failed");

    const int K = static_cast<int>(b.size());
    DiagonalModeSpectrum spec;
    spec.lambda.resize(K);
    spec.coeff.resize(K, K);
    // Eigen returns ascending order; flip to descending and fix phases.
    for (int m2 = 0; m2 < K; ++m2) {
        const int src = K - 1 - m2;
        spec.lambda[m2] = std::max(0.0, eig.eigenvalues()[src]);
        Eigen::VectorXcd v = eig.eigenvectors().col(src);
        int arg = 0;
        double best = 0.0;
        for (int j = 0; j < K; ++j)
            if (std::abs(v[j]) > best) {
                best = std::abs(v[j]);
                arg = j;
            }
        if (best > 0.0) v *= std::conj(v[arg] / best);
        spec.coeff.col(m2) = v;
    }
    return spec;
}

}  // namespace pdcfock
