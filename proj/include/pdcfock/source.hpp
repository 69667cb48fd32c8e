#pragma once

#include <Eigen/Core>

#include "pdcfock/units.hpp"

namespace pdcfock {

// Gaussian pump amplitude envelope, centred on the sum frequency 2*mu.
struct PumpSpec {
    double mu = 0.0;       // degenerate daughter centre frequency, rad/s
    double sigma_p = 0.0;  // amplitude sigma of the pump envelope, rad/s
};

// Crystal description entering the collinear phase mismatch. Group slownesses
// k' = dk/domega are taken at the pump / signal / idler carrier frequencies;
// the quasi-phase-matching grating is absorbed into delta0 so that delta0 is
// the residual zeroth-order mismatch (0 when the grating is tuned exactly).
struct CrystalSpec {
    double length = 0.0;    // m
    double kp_prime = 0.0;  // s/m
    double ks_prime = 0.0;  // s/m
    double ki_prime = 0.0;  // s/m
    double delta0 = 0.0;    // 1/m
    double gamma = 0.193;   // Gaussian approximation exp(-gamma L^2 dk^2 / 4)
};

enum class PmfKind { Sinc, Gaussian };

// Joint spectral amplitude sampled on a uniform grid; amplitude(i, s) is
// f(omega_i[i], omega_s[s]). Normalised so that
// sum |f|^2 * w_i * w_s = 1 within 1e-10.
struct JsaGrid {
    Axis idler;
    Axis signal;
    Eigen::MatrixXcd amplitude;
};

// Pump envelope evaluated at detunings nu_i + nu_s from the carrier:
// exp(-(nu_i+nu_s)^2 / (2 sigma_p^2)). The sigma^2 in the denominator is
// deliberate (amplitude-Gaussian convention).
double pump_envelope(double nu_sum, const PumpSpec& pump);

// First-order collinear phase mismatch
//   dk = (ks' - kp') nu_s + (ki' - kp') nu_i + delta0.
double phase_mismatch(double nu_i, double nu_s, const CrystalSpec& crystal);

// Phase-matching function of the mismatch: sinc(L dk / 2) or its Gaussian
// stand-in exp(-gamma L^2 dk^2 / 4).
double phase_matching(double delta_k, const CrystalSpec& crystal, PmfKind kind);

// Sample pump * phase-matching on the joint grid and normalise.
// Throws std::runtime_error if every sample underflows to zero.
JsaGrid build_jsa(const PumpSpec& pump, const CrystalSpec& crystal, const GridSpec& grid,
                  PmfKind kind);

// Crystal length making the sinc/Gaussian joint amplitude separable under the
// symmetric group-matching condition kp' = (ks' + ki')/2:
//   L = sqrt(8 / (gamma sigma_p^2 (ks' - ki')^2)).
double symmetric_length(double sigma_p, double ks_prime, double ki_prime, double gamma = 0.193);

// Left-hand side of the separability condition
//   2/sigma_p^2 + gamma L^2 (ks'-kp')(ki'-kp') = 0,
// normalised by 2/sigma_p^2 so that 0 means exactly separable and the value is
// dimensionless.
double separability_residual(const PumpSpec& pump, const CrystalSpec& crystal);

}  // namespace pdcfock
