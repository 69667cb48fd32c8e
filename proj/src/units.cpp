#include "pdcfock/units.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pdcfock {

namespace {
constexpr double two_sqrt_2ln2 = 2.3548200450309493;  // 2 sqrt(2 ln 2)
}

double wavelength_nm_to_omega(double lambda_nm) {
    if (!(lambda_nm > 0.0)) throw std::invalid_argument("wavelength must be positive");
    return 2.0 * std::numbers::pi * speed_of_light / (lambda_nm * 1e-9);
}

double fwhm_nm_to_sigma(double center_wavelength_nm, double fwhm_nm) {
    if (!(center_wavelength_nm > 0.0) || !(fwhm_nm > 0.0))
        throw std::invalid_argument("wavelengths must be positive");
    const double lam = center_wavelength_nm * 1e-9;
    const double domega = 2.0 * std::numbers::pi * speed_of_light * (fwhm_nm * 1e-9) / (lam * lam);
    return domega / two_sqrt_2ln2;
}

double sigma_to_fwhm_nm(double center_wavelength_nm, double sigma) {
    if (!(center_wavelength_nm > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("arguments must be positive");
    const double lam = center_wavelength_nm * 1e-9;
    const double domega = sigma * two_sqrt_2ln2;
    return domega * lam * lam / (2.0 * std::numbers::pi * speed_of_light) * 1e9;
}

int Axis::nearest_index(double target) const {
    if (omega.size() == 0) throw std::logic_error("empty axis");
    int best = 0;
    double bestd = std::abs(omega[0] - target);
    for (int j = 1; j < omega.size(); ++j) {
        const double d = std::abs(omega[j] - target);
        if (d < bestd) {
            bestd = d;
            best = j;
        }
    }
    return best;
}

std::pair<Axis, Axis> build_axes(const GridSpec& spec) {
    if (spec.n_points < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (!(spec.span > 0.0)) throw std::invalid_argument("grid span must be positive");

    Axis ax;
    ax.center = spec.center;
    ax.step = spec.span / (spec.n_points - 1);
    ax.omega.resize(spec.n_points);
    // Offsets are (2j - (n-1)) * step/2: integer times a constant, so the axis
    // is symmetric about the centre to the last bit.
    for (int j = 0; j < spec.n_points; ++j)
        ax.omega[j] = spec.center + static_cast<double>(2 * j - (spec.n_points - 1)) * (0.5 * ax.step);
    return {ax, ax};
}

}  // namespace pdcfock
