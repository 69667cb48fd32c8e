#include "pdcfock/source.hpp"

#include <cmath>
#include <stdexcept>

namespace pdcfock {

double pump_envelope(double nu_sum, const PumpSpec& pump) {
    if (!(pump.sigma_p > 0.0)) throw std::invalid_argument("pump sigma must be positive");
    const double x = nu_sum / pump.sigma_p;
    return std::exp(-0.5 * x * x);
}

double phase_mismatch(double nu_i, double nu_s, const CrystalSpec& c) {
    return (c.ks_prime - c.kp_prime) * nu_s + (c.ki_prime - c.kp_prime) * nu_i + c.delta0;
}

namespace {
// sin(x)/x with a series fallback near zero; |x| < 1e-4 keeps the truncation
// error below 1e-17.
double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}
}  // namespace

double phase_matching(double delta_k, const CrystalSpec& c, PmfKind kind) {
    const double arg = c.length * delta_k / 2.0;
    if (kind == PmfKind::Sinc) return sinc(arg);
    return std::exp(-c.gamma * arg * arg);  // gamma (L dk)^2 / 4
}

JsaGrid build_jsa(const PumpSpec& pump, const CrystalSpec& crystal, const GridSpec& grid,
                  PmfKind kind) {
    if (!(crystal.length > 0.0)) throw std::invalid_argument("crystal length must be positive");

    JsaGrid jsa;
    auto axes = build_axes(grid);
    jsa.idler = std::move(axes.first);
    jsa.signal = std::move(axes.second);

    const int n_i = jsa.idler.size();
    const int n_s = jsa.signal.size();
    jsa.amplitude.resize(n_i, n_s);

    // Rows are independent; a parallel row schedule would write disjoint data
    // and produce the identical matrix.
    for (int i = 0; i < n_i; ++i) {
        const double nu_i = jsa.idler.omega[i] - jsa.idler.center;
        for (int s = 0; s < n_s; ++s) {
            const double nu_s = jsa.signal.omega[s] - jsa.signal.center;
            const double a = pump_envelope(nu_i + nu_s, pump);
            const double phi = phase_matching(phase_mismatch(nu_i, nu_s, crystal), crystal, kind);
            jsa.amplitude(i, s) = a * phi;
        }
    }

    const double w2 = jsa.idler.weight() * jsa.signal.weight();
    const double norm2 = jsa.amplitude.squaredNorm() * w2;
    if (!(norm2 > 0.0)) throw std::runtime_error("sampled joint amplitude is identically zero");
    jsa.amplitude /= std::sqrt(norm2);
    return jsa;
}

double symmetric_length(double sigma_p, double ks_prime, double ki_prime, double gamma) {
    const double d = ks_prime - ki_prime;
    if (!(sigma_p > 0.0) || d == 0.0 || !(gamma > 0.0))
        throw std::invalid_argument("symmetric length needs sigma_p > 0 and ks' != ki'");
    return std::sqrt(8.0 / (gamma * sigma_p * sigma_p * d * d));
}

double separability_residual(const PumpSpec& pump, const CrystalSpec& c) {
    if (!(pump.sigma_p > 0.0)) throw std::invalid_argument("pump sigma must be positive");
    const double a = c.ks_prime - c.kp_prime;
    const double b = c.ki_prime - c.kp_prime;
    const double lhs = 2.0 / (pump.sigma_p * pump.sigma_p) + c.gamma * c.length * c.length * a * b;
    return lhs * (pump.sigma_p * pump.sigma_p) / 2.0;
}

}  // namespace pdcfock
