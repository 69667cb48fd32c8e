#include <doctest.h>

#include <cmath>

#include "pdcfock/filtering.hpp"
#include "pdcfock/herald.hpp"
#include "pdcfock/oracle_suite.hpp"
#include "test_helpers.hpp"

using namespace pdcfock;

namespace {

Eigen::VectorXd two_modes() {
    Eigen::VectorXd b(2);
    b << std::sqrt(0.8), std::sqrt(0.2);
    return b;
}

FilterSpec flat_table_filter(const Axis& axis, double value, double eta) {
    FilterSpec filter;
    filter.kind = FilterSpec::Kind::Table;
    filter.eta = eta;
    filter.table_omega = {axis.omega[0] - 1.0, axis.omega[axis.size() - 1] + 1.0};
    filter.table_value = {value, value};
    return filter;
}

// Floored relative comparison (the floor makes zero-vs-rounding comparisons
// meaningful for metrics that are exactly zero on one side).
void check_reports_close(const HeraldReport& a, const HeraldReport& b, double tol) {
    REQUIRE(a.no_click == b.no_click);
    CHECK(relative_error(a.probability, b.probability) <= tol);
    REQUIRE(a.g2.has_value() == b.g2.has_value());
    REQUIRE(a.purity.has_value() == b.purity.has_value());
    REQUIRE(a.fidelity.has_value() == b.fidelity.has_value());
    if (a.g2) CHECK(relative_error(*a.g2, *b.g2) <= tol);
    if (a.purity) CHECK(relative_error(*a.purity, *b.purity) <= tol);
    if (a.fidelity) CHECK(relative_error(*a.fidelity, *b.fidelity) <= tol);
}

}  // namespace

TEST_CASE("global normalisation constant") {
    Eigen::VectorXd b(1);
    b << 1.0;
    // Frozen: (1.0201 + 0.01 + 0.0001)^(-1/2).
    CHECK(norm_constant(0.1, b) == doctest::Approx(0.9852336290568344).epsilon(1e-12));
}

TEST_CASE("reporting bounds for the pump amplitude") {
    CHECK(max_reporting_chi(1) == 0.5);
    CHECK(max_reporting_chi(2) == 0.25);
    CHECK_THROWS(max_reporting_chi(3));
}

TEST_CASE("single herald with a perfect detector") {
    const Eigen::VectorXd b = two_modes();
    const double chi = 0.2;
    const HeraldReport rep = herald_single_perfect(chi, b);

    const double n2 = 1.0 / ((1.04 * 1.04) + 0.04 * 1.0 + 0.0016 * 0.84);
    CHECK(rep.probability == doctest::Approx(n2 * 0.04).epsilon(1e-12));
    CHECK(*rep.g2 == 0.0);
    CHECK(*rep.purity == doctest::Approx(0.68).epsilon(1e-12));
    CHECK(*rep.fidelity == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_FALSE(rep.no_click);
}

TEST_CASE("single herald with an inefficient bucket detector") {
    Eigen::VectorXd b(1);
    b << 1.0;
    const HeraldReport rep = herald_single_inefficient(0.5, 0.5, b);
    CHECK(*rep.g2 == doctest::Approx(0.2777777777777778).epsilon(1e-12));
    CHECK(*rep.fidelity == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rep.probability == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

    SUBCASE("unit efficiency reduces to the perfect formulas") {
        const Eigen::VectorXd b2 = two_modes();
        check_reports_close(herald_single_inefficient(0.37, 1.0, b2),
                            herald_single_perfect(0.37, b2), 1e-14);
    }

    SUBCASE("dead detector never clicks") {
        const HeraldReport dead = herald_single_inefficient(0.3, 0.0, b);
        CHECK(dead.no_click);
        CHECK(dead.probability == 0.0);
        CHECK_FALSE(dead.g2.has_value());
    }
}

TEST_CASE("double herald closed forms") {
    const Eigen::VectorXd b = two_modes();
    const HeraldReport rep = herald_double_perfect(0.2, b);
    CHECK(*rep.g2 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*rep.fidelity == doctest::Approx(0.64 / 0.84).epsilon(1e-12));
    CHECK(*rep.purity == doctest::Approx(0.4368 / (0.84 * 0.84)).epsilon(1e-12));

    SUBCASE("bucket efficiency scales the rate quadratically") {
        const HeraldReport lossy = herald_double_inefficient(0.2, 0.6, b);
        CHECK(lossy.probability == doctest::Approx(rep.probability * 0.36).epsilon(1e-12));
        CHECK(*lossy.g2 == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(*lossy.purity == doctest::Approx(*rep.purity).epsilon(1e-15));
        CHECK(*lossy.fidelity == doctest::Approx(*rep.fidelity).epsilon(1e-15));
    }

    SUBCASE("dead detector never clicks") {
        CHECK(herald_double_inefficient(0.2, 0.0, b).no_click);
    }
}

TEST_CASE("spectrally flat filter reduces to the bucket detector") {
    std::mt19937_64 rng(23);
    const auto [axis, _] = build_axes(GridSpec{64, 12.0, 0.0});
    const Eigen::MatrixXcd zeta = testutil::orthonormal_modes(axis, 3, 1.0)
                                      .cast<std::complex<double>>() *
                                  testutil::random_unitary(rng, 3);
    const Eigen::VectorXd b = testutil::random_coefficients(rng, 3);
    const SchmidtDecomposition dec = testutil::fabricated_decomposition(axis, b, zeta, zeta);

    const double chi = 0.31;
    const double eta = 0.37;
    const OverlapMatrices ov = overlap_matrices(dec, flat_table_filter(axis, 1.0, eta));

    check_reports_close(herald_single_filtered(chi, b, ov),
                        herald_single_inefficient(chi, eta, b), 1e-10);
    check_reports_close(herald_double_filtered(chi, b, ov),
                        herald_double_inefficient(chi, eta, b), 1e-10);

    SUBCASE("fully blocked filter never clicks") {
        const OverlapMatrices blocked = overlap_matrices(dec, flat_table_filter(axis, 0.0, 0.9));
        CHECK(herald_single_filtered(chi, b, blocked).no_click);
        CHECK(herald_double_filtered(chi, b, blocked).no_click);
    }

    SUBCASE("filtered mode weights sum to one") {
        FilterSpec partial;
        partial.kind = FilterSpec::Kind::Gaussian;
        partial.mu_f = 0.4;
        partial.sigma_f = 1.2;
        partial.eta = 0.8;
        const OverlapMatrices pov = overlap_matrices(dec, partial);
        const HeraldReport rep = herald_single_filtered(chi, b, pov);
        REQUIRE(rep.mode_weights.size() > 0);
        // Single-herald diagonal weights sum to t1 / weight = p_exactly_one share.
        CHECK(rep.mode_weights.sum() <= 1.0 + 1e-12);
        CHECK(*rep.fidelity == doctest::Approx(rep.mode_weights[0]).epsilon(1e-15));
    }
}

TEST_CASE("narrow-filter limit heralds a pure single mode at small pump") {
    std::mt19937_64 rng(29);
    const auto [axis, _] = build_axes(GridSpec{65, 12.0, 0.0});
    const Eigen::MatrixXcd zeta =
        testutil::orthonormal_modes(axis, 3, 1.0).cast<std::complex<double>>();
    const Eigen::VectorXd b = testutil::random_coefficients(rng, 3);
    const SchmidtDecomposition dec = testutil::fabricated_decomposition(axis, b, zeta, zeta);

    FilterSpec spike;
    spike.kind = FilterSpec::Kind::Delta;
    spike.mu_f = 0.0;
    spike.eta = 0.6;
    const OverlapMatrices ov = overlap_matrices(dec, spike);
    REQUIRE(ov.delta);

    const HeraldReport rep = herald_single_filtered(1e-6, b, ov);
    CHECK(rep.probability == 0.0);  // measure-zero transmission
    CHECK(*rep.g2 < 1e-9);
    CHECK(*rep.purity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*rep.fidelity == doctest::Approx(1.0).epsilon(1e-9));

    const HeraldReport rep2 = herald_double_filtered(1e-6, b, ov);
    CHECK(rep2.probability == 0.0);
    CHECK(*rep2.g2 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*rep2.purity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*rep2.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}
