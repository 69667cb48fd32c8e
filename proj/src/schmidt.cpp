#include "pdcfock/schmidt.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pdcfock {

namespace {

// First moment of |zeta|^2 along the axis, used only to order degenerate
// coefficients deterministically.
double first_moment(const Eigen::VectorXcd& mode, const Axis& ax) {
    double m = 0.0;
    for (int j = 0; j < ax.size(); ++j) m += ax.weight() * ax.omega[j] * std::norm(mode[j]);
    return m;
}

void fix_phase(Eigen::Ref<Eigen::VectorXcd> zeta, Eigen::Ref<Eigen::VectorXcd> xi) {
    int arg = 0;
    double best = 0.0;
    for (int j = 0; j < zeta.size(); ++j) {
        const double a = std::abs(zeta[j]);
        if (a > best) {
            best = a;
            arg = j;
        }
    }
    if (best == 0.0) return;
    const std::complex<double> phase = zeta[arg] / best;  // unit modulus
    zeta *= std::conj(phase);
    xi *= phase;
}

}  // namespace

SchmidtDecomposition schmidt_decompose(const JsaGrid& jsa, double cutoff) {
    const double wi = jsa.idler.weight();
    const double ws = jsa.signal.weight();
    Eigen::MatrixXcd scaled = jsa.amplitude * std::sqrt(wi * ws);

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();

    int keep = 0;
    while (keep < sv.size() && sv[keep] >= cutoff && sv[keep] > 0.0) ++keep;
    if (keep == 0) throw std::runtime_error("schmidt truncation removed every mode");

    SchmidtDecomposition dec;
    dec.idler = jsa.idler;
    dec.signal = jsa.signal;
    dec.cutoff = cutoff;
    dec.b = sv.head(keep);
    dec.zeta = svd.matrixU().leftCols(keep) / std::sqrt(wi);
    dec.xi = svd.matrixV().leftCols(keep).conjugate() / std::sqrt(ws);

    for (int k = 0; k < keep; ++k) fix_phase(dec.zeta.col(k), dec.xi.col(k));

    // Order near-degenerate coefficients by the first moment of the idler
    // mode density, ascending, so ties do not depend on SVD internals.
    const double tie_tol = 1e-12 * dec.b[0];
    std::vector<int> order(keep);
    std::iota(order.begin(), order.end(), 0);
    int g0 = 0;
    while (g0 < keep) {
        int g1 = g0 + 1;
        while (g1 < keep && dec.b[g1 - 1] - dec.b[g1] <= tie_tol) ++g1;
        if (g1 - g0 > 1) {
            std::vector<double> moments(g1 - g0);
            for (int k = g0; k < g1; ++k) moments[k - g0] = first_moment(dec.zeta.col(k), dec.idler);
            std::stable_sort(order.begin() + g0, order.begin() + g1,
                             [&](int a, int b2) { return moments[a - g0] < moments[b2 - g0]; });
        }
        g0 = g1;
    }
    bool permuted = false;
    for (int k = 0; k < keep; ++k)
        if (order[k] != k) permuted = true;
    if (permuted) {
        Eigen::VectorXd b2(keep);
        Eigen::MatrixXcd z2(dec.zeta.rows(), keep), x2(dec.xi.rows(), keep);
        for (int k = 0; k < keep; ++k) {
            b2[k] = dec.b[order[k]];
            z2.col(k) = dec.zeta.col(order[k]);
            x2.col(k) = dec.xi.col(order[k]);
        }
        dec.b = std::move(b2);
        dec.zeta = std::move(z2);
        dec.xi = std::move(x2);
    }
    return dec;
}

double entropy_of_entanglement(const Eigen::VectorXd& b) {
    double e = 0.0;
    for (int k = 0; k < b.size(); ++k) {
        const double p = b[k] * b[k];
        if (p > 0.0) e -= p * std::log2(p);
    }
    return e;
}

JsaGrid reconstruct_jsa(const SchmidtDecomposition& dec) {
    JsaGrid jsa;
    jsa.idler = dec.idler;
    jsa.signal = dec.signal;
    jsa.amplitude = dec.zeta * dec.b.asDiagonal() * dec.xi.transpose();
    return jsa;
}

}  // namespace pdcfock
