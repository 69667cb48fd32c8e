#pragma once

#include <Eigen/Core>
#include <utility>

namespace pdcfock {

// Vacuum speed of light, m/s (exact by definition).
inline constexpr double speed_of_light = 2.99792458e8;

// Angular frequency of a vacuum wavelength given in nanometres, rad/s.
double wavelength_nm_to_omega(double lambda_nm);

// Convert an amplitude-FWHM quoted in wavelength terms (nm around a centre
// wavelength) into the Gaussian sigma of exp(-nu^2 / (2 sigma^2)) in angular
// frequency.  FWHM always refers to the amplitude function here, so
// sigma = (2 pi c dlambda / lambda^2) / (2 sqrt(2 ln 2)).
double fwhm_nm_to_sigma(double center_wavelength_nm, double fwhm_nm);

// Inverse of fwhm_nm_to_sigma at the same centre wavelength.
double sigma_to_fwhm_nm(double center_wavelength_nm, double sigma);

// Uniform frequency grid specification. span is the full width covered by the
// axis; samples are centred on `center`.
struct GridSpec {
    int n_points = 0;
    double span = 0.0;    // rad/s, full width
    double center = 0.0;  // rad/s
};

// Sampled frequency axis with a uniform trapezoid-free quadrature weight
// (plain Riemann weight step = span / (n-1) spacing; weight() applies to every
// sample equally).
struct Axis {
    Eigen::VectorXd omega;  // strictly increasing samples
    double step = 0.0;      // sample spacing = quadrature weight
    double center = 0.0;

    int size() const { return static_cast<int>(omega.size()); }
    double weight() const { return step; }
    // Index of the sample closest to a target frequency.
    int nearest_index(double target) const;
};

// Build the idler and signal axes for a joint grid. Both axes are identical:
// same sample count, span and centre, symmetric about the centre to machine
// precision.
std::pair<Axis, Axis> build_axes(const GridSpec& spec);

}  // namespace pdcfock
