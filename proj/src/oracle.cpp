#include "pdcfock/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace pdcfock {

namespace {

// Dense index of the ordered idler pair (a, b) in the extended register.
inline int ext2(int a, int b, int n) { return a + 2 * n * b; }

// Dense index of the ordered signal pair (s, t).
inline int sig2(int s, int t, int n) { return s + n * t; }

// Index of the unordered pair s <= t in the normalised two-photon basis.
inline int pair_index(int s, int t) { return t * (t + 1) / 2 + s; }

// Factor mapping a symmetric-tensor entry to the amplitude on the normalised
// occupation state: 2 for distinct modes, sqrt(2) for a doubly occupied one.
inline double pair_factor(int x, int y) { return x == y ? std::numbers::sqrt2 : 2.0; }

}  // namespace

BinnedState build_binned_state(const JsaGrid& jsa, double chi) {
    const int n = jsa.signal.size();
    if (jsa.idler.size() != n) {
        throw std::invalid_argument("build_binned_state: grid must be square");
    }
    if (n < 1 || n > oracle_max_bins) {
        throw std::invalid_argument("build_binned_state: bin count out of range");
    }
    if (!(chi >= 0.0)) {
        throw std::invalid_argument("build_binned_state: chi must be non-negative");
    }

    // One-pair amplitude per bin pair; unit Frobenius norm by construction.
    const double w = std::sqrt(jsa.idler.weight() * jsa.signal.weight());
    const Eigen::MatrixXcd g = jsa.amplitude * w;

    BinnedState st;
    st.n_bins = n;
    st.vac = std::complex<double>(1.0 + chi * chi, 0.0);
    st.one = Eigen::MatrixXcd::Zero(2 * n, n);
    st.one.topRows(n) = chi * g;

    st.two = Eigen::MatrixXcd::Zero(4 * n * n, n * n);
    const double quarter = 0.25 * chi * chi;
    for (int t = 0; t < n; ++t) {
        for (int s = 0; s < n; ++s) {
            const int col = sig2(s, t, n);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    st.two(ext2(i, j, n), col) =
                        quarter * (g(i, s) * g(j, t) + g(i, t) * g(j, s));
                }
            }
        }
    }

    const double norm2 = std::norm(st.vac) + st.one.squaredNorm() + 4.0 * st.two.squaredNorm();
    const double norm = std::sqrt(norm2);
    st.vac /= norm;
    st.one /= norm;
    st.two /= norm;
    return st;
}

void apply_binwise_beamsplitter(BinnedState& state, const FoldedFilter& fold) {
    const int n = state.n_bins;
    if (fold.T.size() != n || fold.R.size() != n) {
        throw std::invalid_argument("apply_binwise_beamsplitter: fold/grid size mismatch");
    }

    // Per-bin rotation [T -R; R T] between the transmitted slot i and the
    // reflected slot n+i. The freshly built state has no amplitude in the
    // reflected slots, so the second column block only fixes the completion.
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        M(i, i) = fold.T(i);
        M(n + i, i) = fold.R(i);
        M(i, n + i) = -fold.R(i);
        M(n + i, n + i) = fold.T(i);
    }

    state.one = (M * state.one).eval();
    for (int c = 0; c < n * n; ++c) {
        Eigen::Map<Eigen::MatrixXcd> A(state.two.col(c).data(), 2 * n, 2 * n);
        A = (M * A * M.transpose()).eval();
    }
}

Eigen::Vector3d herald_probabilities(const BinnedState& state) {
    const int n = state.n_bins;
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    p(0) += std::norm(state.vac);

    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < 2 * n; ++a) {
            p(a < n ? 1 : 0) += std::norm(state.one(a, s));
        }
    }

    for (int t = 0; t < n; ++t) {
        for (int s = 0; s <= t; ++s) {
            const int col = sig2(s, t, n);
            const double ms2 = pair_factor(s, t) * pair_factor(s, t);
            for (int b = 0; b < 2 * n; ++b) {
                for (int a = 0; a <= b; ++a) {
                    const int clicks = (a < n ? 1 : 0) + (b < n ? 1 : 0);
                    const double ma2 = pair_factor(a, b) * pair_factor(a, b);
                    p(clicks) += ms2 * ma2 * std::norm(state.two(ext2(a, b, n), col));
                }
            }
        }
    }
    return p;
}

HeraldedSignal herald_and_reduce(const BinnedState& state, int herald_n) {
    const int n = state.n_bins;
    if (herald_n != 1 && herald_n != 2) {
        throw std::invalid_argument("herald_and_reduce: herald_n must be 1 or 2");
    }
    const int npair = n * (n + 1) / 2;

    HeraldedSignal out;
    out.rho1 = Eigen::MatrixXcd::Zero(n, n);
    out.rho2 = Eigen::MatrixXcd::Zero(npair, npair);

    if (herald_n == 1) {
        // One-pair sector: the heralding photon sits in transmitted slot a
        // with the reflected port empty; environments are orthogonal per a.
        const Eigen::MatrixXcd psi1 = state.one.topRows(n);
        out.rho1 = psi1.transpose() * psi1.conjugate();

        // Two-pair sector with one photon per idler port: environment
        // (a transmitted, j reflected), signal pair {s <= t} normalised.
        Eigen::MatrixXcd psi2(n * n, npair);
        for (int t = 0; t < n; ++t) {
            for (int s = 0; s <= t; ++s) {
                const int col = pair_index(s, t);
                const double ms = pair_factor(s, t);
                const int sigcol = sig2(s, t, n);
                for (int j = 0; j < n; ++j) {
                    for (int a = 0; a < n; ++a) {
                        psi2(a + n * j, col) = 2.0 * ms * state.two(ext2(a, n + j, n), sigcol);
                    }
                }
            }
        }
        out.rho2 = psi2.transpose() * psi2.conjugate();
    } else {
        // Two-pair sector with both idler photons transmitted: environment is
        // the unordered transmitted pair {a <= b}, reflected port empty.
        Eigen::MatrixXcd psi2(npair, npair);
        for (int t = 0; t < n; ++t) {
            for (int s = 0; s <= t; ++s) {
                const int col = pair_index(s, t);
                const double ms = pair_factor(s, t);
                const int sigcol = sig2(s, t, n);
                for (int b = 0; b < n; ++b) {
                    for (int a = 0; a <= b; ++a) {
                        psi2(pair_index(a, b), col) =
                            pair_factor(a, b) * ms * state.two(ext2(a, b, n), sigcol);
                    }
                }
            }
        }
        out.rho2 = psi2.transpose() * psi2.conjugate();
    }

    const double weight = out.rho1.trace().real() + out.rho2.trace().real();
    out.probability = weight;
    if (weight > 1e-300) {
        out.rho1 /= weight;
        out.rho2 /= weight;
    } else {
        out.rho1.setZero();
        out.rho2.setZero();
    }
    return out;
}

OracleMetrics metrics_from_density_matrix(const HeraldedSignal& sig, int herald_n) {
    if (herald_n != 1 && herald_n != 2) {
        throw std::invalid_argument("metrics_from_density_matrix: herald_n must be 1 or 2");
    }
    const int n = static_cast<int>(sig.rho1.rows());
    const int npair = static_cast<int>(sig.rho2.rows());

    OracleMetrics m;
    const double w1 = sig.rho1.trace().real();
    const double w2 = sig.rho2.trace().real();
    const double mean_n = w1 + 2.0 * w2;
    m.g2 = mean_n > 0.0 ? 2.0 * w2 / (mean_n * mean_n) : 0.0;

    // Blocks are Hermitian, so tr(rho^2) is the squared Frobenius norm.
    m.purity = sig.rho1.squaredNorm() + sig.rho2.squaredNorm();

    if (herald_n == 1) {
        if (w1 <= 0.0) {
            m.fidelity = 0.0;
            return m;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sig.rho1);
        m.fidelity = es.eigenvalues().maxCoeff();
        return m;
    }

    if (w2 <= 0.0) {
        m.fidelity = 0.0;
        return m;
    }

    // Embed the pair block into the full two-photon tensor basis, take the
    // one-body reduced density matrix, and try each natural orbital as the
    // candidate mode of a two-photon Fock state.
    Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(n * n, npair);
    for (int t = 0; t < n; ++t) {
        for (int s = 0; s <= t; ++s) {
            const int col = pair_index(s, t);
            if (s == t) {
                theta(sig2(s, s, n), col) = 1.0;
            } else {
                theta(sig2(s, t, n), col) = 1.0 / std::numbers::sqrt2;
                theta(sig2(t, s, n), col) = 1.0 / std::numbers::sqrt2;
            }
        }
    }
    const Eigen::MatrixXcd full = theta * sig.rho2 * theta.adjoint();
    Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(n, n);
    for (int t = 0; t < n; ++t) {
        for (int sp = 0; sp < n; ++sp) {
            for (int s = 0; s < n; ++s) {
                reduced(s, sp) += 2.0 * full(sig2(s, t, n), sig2(sp, t, n));
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reduced);
    double best = 0.0;
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXcd tau = es.eigenvectors().col(k);
        Eigen::VectorXcd v(npair);
        for (int t = 0; t < n; ++t) {
            for (int s = 0; s <= t; ++s) {
                v(pair_index(s, t)) =
                    s == t ? tau(s) * tau(s) : std::numbers::sqrt2 * tau(s) * tau(t);
            }
        }
        const double overlap = (v.adjoint() * sig.rho2 * v).value().real();
        best = std::max(best, overlap);
    }
    m.fidelity = best;
    return m;
}

}  // namespace pdcfock
