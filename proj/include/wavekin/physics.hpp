#pragma once

// Scalar primitives of the three-wave kinetic model: dispersion law,
// viscous damping, interaction kernel, resonance-broadening width, and the
// Lorentzian density that replaces the sharp frequency delta.

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavekin {

struct PhysicalParams {
    double lambda1 = 1.0;  // dispersion offset, frequency^2, >= 0
    double lambda2 = 1.0;  // dispersion slope, > 0
    double nu = 0.0;       // viscosity coefficient, >= 0
    double c_v = 1.0;      // kernel constant in |V|^2 = c_v^2 * r * r1 * r2
    double c_gamma = 1.0;  // broadening constant in gamma_k = c_gamma * r^2 * mass

    void validate() const {
        if (!(lambda1 >= 0.0)) throw std::invalid_argument("physical.lambda1 must be >= 0");
        if (!(lambda2 > 0.0)) throw std::invalid_argument("physical.lambda2 must be > 0");
        if (!(nu >= 0.0)) throw std::invalid_argument("physical.nu must be >= 0");
        if (!(c_v > 0.0)) throw std::invalid_argument("physical.c_v must be > 0");
        if (!(c_gamma > 0.0)) throw std::invalid_argument("physical.c_gamma must be > 0");
    }
};

// Dispersion relation omega(r) = sqrt(lambda1 + lambda2 r^2).
inline double omega(double r, const PhysicalParams& p) {
    return std::sqrt(p.lambda1 + p.lambda2 * r * r);
}

// Viscous damping rate mu = 2 nu r^2.
inline double damping_rate(double r, const PhysicalParams& p) {
    return 2.0 * p.nu * r * r;
}

// Squared interaction kernel |V|^2 = c_v^2 * r * r1 * r2, symmetric and
// vanishing whenever any leg has zero wavenumber.
inline double kernel_v2(double r, double r1, double r2, const PhysicalParams& p) {
    return p.c_v * p.c_v * r * r1 * r2;
}

// Single-mode broadening rate gamma_k = c_gamma * r^2 * mass.
inline double gamma_k(double r, double mass, const PhysicalParams& p) {
    return p.c_gamma * r * r * mass;
}

// Triad broadening width Gamma = gamma_k(r) + gamma_k(r1) + gamma_k(r2),
// summed exactly in that form so the identity with gamma_k holds bitwise.
inline double gamma_broadening(double r, double r1, double r2, double mass,
                               const PhysicalParams& p) {
    return gamma_k(r, mass, p) + gamma_k(r1, mass, p) + gamma_k(r2, mass, p);
}

// Lorentzian density Gamma/(zeta^2 + Gamma^2). A zero width means a zero
// collision operator (only reachable at zero mass), so the degenerate value
// is 0 rather than a delta spike.
inline double lorentzian(double zeta, double gamma) {
    if (gamma == 0.0) return 0.0;
    return gamma / (zeta * zeta + gamma * gamma);
}

} // namespace wavekin
