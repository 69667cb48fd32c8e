#include "pdcfock/herald.hpp"

#include <cmath>
#include <stdexcept>

namespace pdcfock {

namespace {

double sum_pow(const Eigen::VectorXd& b, int power) {
    double s = 0.0;
    for (int k = 0; k < b.size(); ++k) s += std::pow(b[k], power);
    return s;
}

// sum_{k<k'} (b_k b_k')^power + sum_k b_k^(2 power): the pair sum entering the
// two-pair sector weights, written out as in the source expressions.
double pair_sum(const Eigen::VectorXd& b, int power) {
    double s = 0.0;
    for (int k = 0; k < b.size(); ++k) {
        s += std::pow(b[k], 2 * power);
        for (int k2 = k + 1; k2 < b.size(); ++k2) s += std::pow(b[k] * b[k2], power);
    }
    return s;
}

struct TraceSet {
    Eigen::MatrixXcd mt;
    Eigen::MatrixXcd mr;
    double t1, r1, t2, r2, trr, t4, t2r2;
};

TraceSet traces(const Eigen::VectorXd& b, const OverlapMatrices& ov) {
    if (b.size() != ov.Tmat.rows())
        throw std::invalid_argument("coefficient count does not match overlap matrices");
    TraceSet t;
    t.mt = b.asDiagonal() * ov.Tmat * b.asDiagonal();
    t.mr = b.asDiagonal() * ov.Rmat * b.asDiagonal();
    t.t1 = t.mt.trace().real();
    t.r1 = t.mr.trace().real();
    const Eigen::MatrixXcd mt2 = t.mt * t.mt;
    const Eigen::MatrixXcd mr2 = t.mr * t.mr;
    t.t2 = mt2.trace().real();
    t.r2 = mr2.trace().real();
    t.trr = (t.mt * t.mr).trace().real();
    t.t4 = (mt2 * mt2).trace().real();
    t.t2r2 = (mt2 * mr2).trace().real();
    return t;
}

constexpr double kTinyWeight = 1e-300;

}  // namespace

double norm_constant(double chi, const Eigen::VectorXd& b) {
    const double sb2 = sum_pow(b, 2);
    const double s2 = pair_sum(b, 2);
    const double c2 = chi * chi;
    const double inv2 = (1.0 + c2) * (1.0 + c2) + c2 * sb2 + c2 * c2 * s2;
    return 1.0 / std::sqrt(inv2);
}

double max_reporting_chi(int herald_n) {
    if (herald_n == 1) return 0.5;
    if (herald_n == 2) return 0.25;
    throw std::invalid_argument("herald photon number must be 1 or 2");
}

HeraldReport herald_single_perfect(double chi, const Eigen::VectorXd& b) {
    const double sb2 = sum_pow(b, 2);
    if (!(sb2 > 0.0)) throw std::invalid_argument("empty coefficient set");
    const double n = norm_constant(chi, b);
    HeraldReport rep;
    rep.probability = n * n * chi * chi * sb2;
    rep.g2 = 0.0;
    rep.purity = sum_pow(b, 4) / (sb2 * sb2);
    rep.fidelity = b[0] * b[0] / sb2;
    return rep;
}

HeraldReport herald_single_inefficient(double chi, double eta, const Eigen::VectorXd& b) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("detector efficiency must be in [0,1]");
    HeraldReport rep;
    if (eta == 0.0) {
        rep.no_click = true;
        return rep;
    }
    const double sb2 = sum_pow(b, 2);
    const double sb4 = sum_pow(b, 4);
    const double s2 = pair_sum(b, 2);
    const double s4 = pair_sum(b, 4);
    const double c2 = chi * chi;
    const double n = norm_constant(chi, b);

    const double gamma_i = 4.0 * c2 * (1.0 - eta) * s2;
    const double weight = sb2 + 2.0 * c2 * (1.0 - eta) * s2;  // 1/|N_1|^2
    rep.probability = n * n * c2 * eta * weight;
    rep.g2 = gamma_i * weight / ((sb2 + gamma_i) * (sb2 + gamma_i));
    const double contam = 4.0 * c2 * c2 * (1.0 - eta) * (1.0 - eta) * s4;
    rep.purity = (sb4 + contam) / (weight * weight);
    rep.fidelity = b[0] * b[0] / weight;
    return rep;
}

HeraldReport herald_single_filtered(double chi, const Eigen::VectorXd& b,
                                    const OverlapMatrices& ov) {
    const TraceSet t = traces(b, ov);
    const double c2 = chi * chi;
    const double gamma_f = 2.0 * c2 * (t.trr + t.t1 * t.r1);
    const double weight = t.t1 + 0.5 * gamma_f;  // 1/|N_1,filt|^2

    HeraldReport rep;
    if (!(weight > kTinyWeight)) {
        rep.no_click = true;
        return rep;
    }
    const double n = norm_constant(chi, b);
    rep.probability = ov.delta ? 0.0 : n * n * c2 * weight;
    rep.g2 = gamma_f * weight / ((t.t1 + gamma_f) * (t.t1 + gamma_f));
    const double purity_num =
        t.t2 + c2 * c2 * (t.t2 * t.r2 + 2.0 * t.t2r2 + t.trr * t.trr);
    rep.purity = purity_num / (weight * weight);

    const DiagonalModeSpectrum spec = diagonalize_signal(b, ov.Tmat);
    rep.mode_weights = spec.lambda / weight;
    rep.fidelity = rep.mode_weights[0];
    return rep;
}

HeraldReport herald_double_perfect(double chi, const Eigen::VectorXd& b) {
    const double s2 = pair_sum(b, 2);
    if (!(s2 > 0.0)) throw std::invalid_argument("empty coefficient set");
    const double s4 = pair_sum(b, 4);
    const double n = norm_constant(chi, b);
    HeraldReport rep;
    rep.probability = std::pow(n * chi * chi, 2) * s2;
    rep.g2 = 0.5;
    rep.purity = s4 / (s2 * s2);
    rep.fidelity = std::pow(b[0], 4) / s2;
    return rep;
}

HeraldReport herald_double_inefficient(double chi, double eta, const Eigen::VectorXd& b) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("detector efficiency must be in [0,1]");
    HeraldReport rep;
    if (eta == 0.0) {
        rep.no_click = true;
        return rep;
    }
    rep = herald_double_perfect(chi, b);
    rep.probability *= eta * eta;  // both idler photons must reach the detector
    return rep;
}

HeraldReport herald_double_filtered(double chi, const Eigen::VectorXd& b,
                                    const OverlapMatrices& ov) {
    const TraceSet t = traces(b, ov);
    const double weight = 0.5 * (t.t1 * t.t1 + t.t2);  // 1/|N_2,filt|^2

    HeraldReport rep;
    if (!(weight > kTinyWeight)) {
        rep.no_click = true;
        return rep;
    }
    const double n = norm_constant(chi, b);
    rep.probability = ov.delta ? 0.0 : std::pow(n * chi * chi, 2) * weight;
    rep.g2 = 0.5;
    rep.purity = 0.5 * (t.t2 * t.t2 + t.t4) / (weight * weight);

    const DiagonalModeSpectrum spec = diagonalize_signal(b, ov.Tmat);
    rep.mode_weights = spec.lambda / std::sqrt(weight);
    rep.fidelity = rep.mode_weights[0] * rep.mode_weights[0];
    return rep;
}

}  // namespace pdcfock
