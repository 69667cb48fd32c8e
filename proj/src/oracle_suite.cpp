#include "pdcfock/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <stdexcept>

#include <Eigen/Core>

#include "pdcfock/filtering.hpp"
#include "pdcfock/oracle.hpp"
#include "pdcfock/schmidt.hpp"
#include "pdcfock/solver.hpp"
#include "pdcfock/source.hpp"
#include "pdcfock/units.hpp"

namespace pdcfock {

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

namespace {

const char* kind_name(FilterSpec::Kind kind) {
    switch (kind) {
        case FilterSpec::Kind::None:
            return "none";
        case FilterSpec::Kind::Gaussian:
            return "gaussian";
        case FilterSpec::Kind::Delta:
            return "delta";
        case FilterSpec::Kind::Table:
            return "table";
    }
    return "?";
}

// Random rank-K joint amplitude on an n-bin square grid, normalised the same
// way build_jsa normalises physical amplitudes.
JsaGrid random_low_rank_jsa(int bins, int rank, double span, std::mt19937_64& rng) {
    const GridSpec spec{bins, span, 100.0};
    auto [idler, signal] = build_axes(spec);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.3, 1.0);

    Eigen::MatrixXcd left(bins, rank);
    Eigen::MatrixXcd right(bins, rank);
    for (int k = 0; k < rank; ++k) {
        for (int i = 0; i < bins; ++i) {
            left(i, k) = std::complex<double>(gauss(rng), gauss(rng));
        }
        for (int i = 0; i < bins; ++i) {
            right(i, k) = std::complex<double>(gauss(rng), gauss(rng));
        }
    }
    Eigen::VectorXd scales(rank);
    for (int k = 0; k < rank; ++k) {
        scales(k) = weight(rng);
    }
    std::sort(scales.data(), scales.data() + rank, std::greater<double>());

    JsaGrid jsa;
    jsa.idler = idler;
    jsa.signal = signal;
    jsa.amplitude = left * scales.asDiagonal() * right.transpose();
    const double norm2 =
        jsa.amplitude.cwiseAbs2().sum() * jsa.idler.weight() * jsa.signal.weight();
    jsa.amplitude /= std::sqrt(norm2);
    return jsa;
}

}  // namespace

OracleSuiteReport run_oracle_suite(const OracleSuiteConfig& cfg) {
    if (cfg.instances < 1) {
        throw std::invalid_argument("oracle suite: need at least one instance");
    }
    if (cfg.min_bins < 2 || cfg.max_bins > oracle_max_bins || cfg.min_bins > cfg.max_bins) {
        throw std::invalid_argument("oracle suite: bin range must lie in [2, 32]");
    }
    if (!(cfg.tolerance > 0.0)) {
        throw std::invalid_argument("oracle suite: tolerance must be positive");
    }

    constexpr double kEtas[] = {0.3, 0.7, 1.0};
    constexpr double kChis[] = {0.05, 0.2, 0.4};
    constexpr FilterSpec::Kind kKinds[] = {FilterSpec::Kind::None, FilterSpec::Kind::Gaussian,
                                           FilterSpec::Kind::Delta};

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> bins_dist(cfg.min_bins, cfg.max_bins);
    std::uniform_int_distribution<int> rank_dist(1, 3);
    std::uniform_real_distribution<double> span_dist(4.0, 12.0);
    std::uniform_real_distribution<double> centre_shift(-1.0 / 6.0, 1.0 / 6.0);
    std::uniform_real_distribution<double> width_frac(1.0 / 30.0, 0.25);

    OracleSuiteReport report;
    report.tolerance = cfg.tolerance;

    for (int inst = 0; inst < cfg.instances; ++inst) {
        const int bins = bins_dist(rng);
        const int rank = rank_dist(rng);
        const double span = span_dist(rng);
        const JsaGrid jsa = random_low_rank_jsa(bins, rank, span, rng);

        FilterSpec filter;
        filter.kind = kKinds[inst % 3];
        filter.eta = kEtas[(inst / 3) % 3];
        filter.mu_f = 100.0 + span * centre_shift(rng);
        filter.sigma_f = filter.kind == FilterSpec::Kind::Gaussian ? span * width_frac(rng) : 0.0;
        const double chi = kChis[(inst / 9) % 3];

        OracleCaseResult result;
        char label[128];
        std::snprintf(label, sizeof(label), "case %02d: bins=%d rank=%d %s eta=%.1f chi=%.2f",
                      inst, bins, rank, kind_name(filter.kind), filter.eta, chi);
        result.label = label;

        const SchmidtDecomposition dec = schmidt_decompose(jsa, 1e-12);

        BinnedState state = build_binned_state(jsa, chi);
        apply_binwise_beamsplitter(state, fold_detector(filter, jsa.idler));

        double err = 0.0;
        if (filter.kind != FilterSpec::Kind::Delta) {
            // The fold is unitary, so occupation probabilities are complete.
            err = std::max(err, std::abs(herald_probabilities(state).sum() - 1.0));
        }

        bool metrics_present = true;
        for (int herald_n : {1, 2}) {
            const HeraldReport closed = evaluate_herald(chi, dec, filter, herald_n);
            const HeraldedSignal reduced = herald_and_reduce(state, herald_n);
            const OracleMetrics brute = metrics_from_density_matrix(reduced, herald_n);

            if (closed.no_click || !closed.g2 || !closed.purity || !closed.fidelity) {
                metrics_present = false;
                break;
            }
            if (filter.kind != FilterSpec::Kind::Delta) {
                err = std::max(err, relative_error(closed.probability, reduced.probability));
            }
            err = std::max(err, relative_error(*closed.g2, brute.g2));
            err = std::max(err, relative_error(*closed.purity, brute.purity));
            err = std::max(err, relative_error(*closed.fidelity, brute.fidelity));
            if (herald_n == 2) {
                report.max_g2_half_dev = std::max(report.max_g2_half_dev,
                                                  std::abs(*closed.g2 - 0.5));
                report.max_g2_half_dev = std::max(report.max_g2_half_dev,
                                                  std::abs(brute.g2 - 0.5));
            }
        }

        result.max_rel_err = err;
        result.pass = metrics_present && err <= cfg.tolerance;
        if (!metrics_present) {
            result.label += " [metrics unexpectedly absent]";
        }

        report.max_rel_err = std::max(report.max_rel_err, err);
        if (!result.pass) {
            ++report.failures;
        }
        report.cases.push_back(std::move(result));
    }
    return report;
}

}  // namespace pdcfock
