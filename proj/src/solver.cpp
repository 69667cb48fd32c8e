#include "pdcfock/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace pdcfock {

namespace {

// Run task(0..count-1) on `threads` workers with a strided index split; each
// index is written by exactly one worker, so results match serial execution.
void parallel_for(int count, int threads, const std::function<void(int)>& task) {
    if (count <= 0) {
        return;
    }
    int workers = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
    workers = std::clamp(workers, 1, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int k = 0; k < workers; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (int i = k; i < count; i += workers) {
                    task(i);
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

HeraldReport dispatch(double chi, const Eigen::VectorXd& b, const FilterSpec& filter,
                      const FilterOverlapBase* base, double eta, int herald_n) {
    if (herald_n != 1 && herald_n != 2) {
        throw std::invalid_argument("evaluate_herald: herald photon number must be 1 or 2");
    }
    if (filter.kind == FilterSpec::Kind::None) {
        if (eta == 1.0) {
            return herald_n == 1 ? herald_single_perfect(chi, b) : herald_double_perfect(chi, b);
        }
        return herald_n == 1 ? herald_single_inefficient(chi, eta, b)
                             : herald_double_inefficient(chi, eta, b);
    }
    if (base == nullptr) {
        throw std::invalid_argument("evaluate_herald: overlap base required for spectral filters");
    }
    const OverlapMatrices ov = base->at_eta(eta);
    return herald_n == 1 ? herald_single_filtered(chi, b, ov) : herald_double_filtered(chi, b, ov);
}

}  // namespace

HeraldReport evaluate_herald_prepared(double chi, const Eigen::VectorXd& b,
                                      const FilterSpec& filter, const FilterOverlapBase* base,
                                      double eta, int herald_n) {
    return dispatch(chi, b, filter, base, eta, herald_n);
}

HeraldReport evaluate_herald(double chi, const SchmidtDecomposition& dec,
                             const FilterSpec& filter, int herald_n) {
    if (filter.kind == FilterSpec::Kind::None) {
        return dispatch(chi, dec.b, filter, nullptr, filter.eta, herald_n);
    }
    const FilterOverlapBase base = make_overlap_base(dec, filter);
    return dispatch(chi, dec.b, filter, &base, filter.eta, herald_n);
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Solved:
            return "solved";
        case SolveStatus::ChiIndependent:
            return "chi_independent";
        case SolveStatus::AtChiBound:
            return "at_chi_bound";
        case SolveStatus::TargetUnreachable:
            return "target_unreachable";
        case SolveStatus::Failed:
            return "failed";
    }
    return "failed";
}

ChiSolution solve_chi_for_fidelity(const SchmidtDecomposition& dec, const FilterSpec& filter,
                                   int herald_n, double target_fidelity, double chi_max) {
    if (!(target_fidelity > 0.0 && target_fidelity < 1.0)) {
        throw std::invalid_argument("solve_chi_for_fidelity: target must lie in (0, 1)");
    }
    if (!(chi_max > 0.0)) {
        throw std::invalid_argument("solve_chi_for_fidelity: chi_max must be positive");
    }

    std::optional<FilterOverlapBase> base;
    if (filter.kind != FilterSpec::Kind::None) {
        base = make_overlap_base(dec, filter);
    }
    const FilterOverlapBase* base_ptr = base ? &*base : nullptr;

    const auto eval = [&](double chi) {
        return dispatch(chi, dec.b, filter, base_ptr, filter.eta, herald_n);
    };

    ChiSolution sol;

    // Probe fidelity on a coarse grid (including both endpoints) to classify
    // the problem before trusting bisection.
    constexpr int kProbe = 8;
    std::array<double, kProbe + 1> fvals{};
    for (int i = 0; i <= kProbe; ++i) {
        const HeraldReport rep = eval(chi_max * i / kProbe);
        if (rep.no_click || !rep.fidelity) {
            sol.status = SolveStatus::Failed;
            sol.detail = "herald never fires for this filter/efficiency";
            sol.report = rep;
            return sol;
        }
        fvals[static_cast<std::size_t>(i)] = *rep.fidelity;
    }

    const double scale = std::max(1.0, std::abs(fvals[0]));
    bool flat = true;
    for (double f : fvals) {
        flat = flat && std::abs(f - fvals[0]) <= 1e-12 * scale;
    }
    if (flat) {
        if (fvals[0] >= target_fidelity) {
            sol.status = SolveStatus::ChiIndependent;
            sol.chi = chi_max;
            sol.report = eval(chi_max);
            sol.detail = "fidelity independent of chi; reported at chi_max";
        } else {
            sol.status = SolveStatus::TargetUnreachable;
            sol.chi = 0.0;
            sol.report = eval(0.0);
            sol.detail = "fidelity independent of chi and below target";
        }
        return sol;
    }

    for (int i = 0; i < kProbe; ++i) {
        if (fvals[static_cast<std::size_t>(i) + 1] > fvals[static_cast<std::size_t>(i)] + 1e-9 * scale) {
            sol.status = SolveStatus::Failed;
            sol.detail = "monotonicity probe failed: fidelity increases with chi";
            return sol;
        }
    }

    if (fvals[0] < target_fidelity) {
        sol.status = SolveStatus::TargetUnreachable;
        sol.chi = 0.0;
        sol.report = eval(0.0);
        sol.detail = "fidelity below target already in the chi -> 0 limit";
        return sol;
    }
    if (fvals[kProbe] >= target_fidelity) {
        sol.status = SolveStatus::AtChiBound;
        sol.chi = chi_max;
        sol.report = eval(chi_max);
        sol.detail = "target met over the whole chi range; reported at chi_max";
        return sol;
    }

    // Invariant: F(lo) >= target > F(hi).
    double lo = 0.0;
    double hi = chi_max;
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const HeraldReport rep = eval(mid);
        if (!rep.fidelity) {
            sol.status = SolveStatus::Failed;
            sol.detail = "herald stopped firing inside the bisection interval";
            return sol;
        }
        (*rep.fidelity >= target_fidelity ? lo : hi) = mid;
    }

    sol.report = eval(lo);
    if (!sol.report.fidelity || std::abs(*sol.report.fidelity - target_fidelity) > 1e-6) {
        sol.status = SolveStatus::Failed;
        sol.detail = "bisection did not localise the fidelity target";
        return sol;
    }
    sol.status = SolveStatus::Solved;
    sol.chi = lo;
    return sol;
}

std::vector<FilterSpec> filter_ladder(double mu_f, std::vector<double> sigma_fs, double eta,
                                      bool include_delta, bool include_unfiltered) {
    for (double s : sigma_fs) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("filter_ladder: Gaussian widths must be positive");
        }
    }
    std::sort(sigma_fs.begin(), sigma_fs.end());

    std::vector<FilterSpec> ladder;
    ladder.reserve(sigma_fs.size() + 2);
    if (include_delta) {
        FilterSpec f;
        f.kind = FilterSpec::Kind::Delta;
        f.mu_f = mu_f;
        f.sigma_f = 0.0;
        f.eta = eta;
        ladder.push_back(std::move(f));
    }
    for (double s : sigma_fs) {
        FilterSpec f;
        f.kind = FilterSpec::Kind::Gaussian;
        f.mu_f = mu_f;
        f.sigma_f = s;
        f.eta = eta;
        ladder.push_back(std::move(f));
    }
    if (include_unfiltered) {
        FilterSpec f;
        f.kind = FilterSpec::Kind::None;
        f.eta = eta;
        ladder.push_back(std::move(f));
    }
    return ladder;
}

std::vector<SweepRow> sweep_filter_width(const SchmidtDecomposition& dec,
                                         const std::vector<FilterSpec>& filters, int herald_n,
                                         double target_fidelity, double chi_max, int threads) {
    std::vector<SweepRow> rows(filters.size());
    const double entropy = entropy_of_entanglement(dec.b);
    parallel_for(static_cast<int>(filters.size()), threads, [&](int i) {
        rows[static_cast<std::size_t>(i)].filter = filters[static_cast<std::size_t>(i)];
        rows[static_cast<std::size_t>(i)].entropy = entropy;
        try {
            rows[static_cast<std::size_t>(i)].solution = solve_chi_for_fidelity(
                dec, filters[static_cast<std::size_t>(i)], herald_n, target_fidelity, chi_max);
        } catch (const std::exception& e) {
            rows[static_cast<std::size_t>(i)].solution = ChiSolution{};
            rows[static_cast<std::size_t>(i)].solution.detail = e.what();
        }
    });
    return rows;
}

std::vector<SurfaceCell> metric_surface(const SchmidtDecomposition& dec, const FilterSpec& filter,
                                        const std::vector<double>& chis,
                                        const std::vector<double>& etas, int herald_n,
                                        int threads) {
    if (chis.empty() || etas.empty()) {
        throw std::invalid_argument("metric_surface: chi and eta grids must be non-empty");
    }
    for (double chi : chis) {
        if (!(chi >= 0.0)) {
            throw std::invalid_argument("metric_surface: chi values must be non-negative");
        }
    }
    for (double eta : etas) {
        if (!(eta >= 0.0 && eta <= 1.0)) {
            throw std::invalid_argument("metric_surface: eta values must lie in [0, 1]");
        }
    }

    std::optional<FilterOverlapBase> base;
    if (filter.kind != FilterSpec::Kind::None) {
        base = make_overlap_base(dec, filter);
    }
    const FilterOverlapBase* base_ptr = base ? &*base : nullptr;

    const int ne = static_cast<int>(etas.size());
    std::vector<SurfaceCell> cells(chis.size() * etas.size());
    parallel_for(static_cast<int>(cells.size()), threads, [&](int idx) {
        const double chi = chis[static_cast<std::size_t>(idx / ne)];
        const double eta = etas[static_cast<std::size_t>(idx % ne)];
        cells[static_cast<std::size_t>(idx)] = SurfaceCell{
            chi, eta, dispatch(chi, dec.b, filter, base_ptr, eta, herald_n)};
    });
    return cells;
}

}  // namespace pdcfock
