#pragma once

// Concrete constants for the moment and continuity estimates. Every factor
// in the inequality chains is computed here as a named quantity, so a failed
// bound in the test suite localizes to the factor that broke. Nothing in
// this header is tuned: each value is either forced analytically or measured
// on the grid the estimate is used with.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <wavekin/collision.hpp>
#include <wavekin/physics.hpp>
#include <wavekin/spectrum.hpp>

namespace wavekin {

// Worst-case overshoot of the trapezoidal strip sums against the continuum
// identity int_{|r_j - r_l|}^{r_j + r_l} r dr = 2 r_j r_l. The maximum runs
// over all companion pairs and uses the same membership weights as the triad
// table, so the measured factor really dominates every row sum that appears
// in the estimates. On fine grids it approaches 1; the worst strips are the
// ones only a few nodes wide.
inline double strip_quadrature_factor(const RadialGrid& g) {
    const std::size_t n = g.size();
    double kappa = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double rj = g.nodes[j];
        if (rj <= 0.0) continue;
        for (std::size_t l = j; l < n; ++l) {
            const double rl = g.nodes[l];
            if (rl <= 0.0) continue;
            double strip = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                strip += detail::strip_weight_of(g.nodes[i], rj, rl) * g.nodes[i]
                       * g.line_weights[i];
            }
            kappa = std::max(kappa, strip / (2.0 * rj * rl));
        }
    }
    return kappa;
}

// Power-splitting constant in (w_j + w_l)^N <= c_N (w_j^N + w_l^N).
inline double omega_split_constant(double N) {
    if (!(N >= 0.0)) throw std::invalid_argument("moment order must be >= 0");
    return std::max(1.0, std::pow(2.0, 2.0 * N - 1.0));
}

// Bound for the frequency-weighted gain: sum_i wv_i w_i^N gain_i <= value *
// M_{N+1}. The chain per interaction bounds each Lorentzian by the
// reciprocal broadening, pulls one radius out of the strip sum with the
// triangle inequality, converts radii to frequencies, and regroups; the pair
// products need the frequency split (six terms), the products involving the
// output node do not (four terms).
struct GainMomentConstant {
    double omega_split;        // c_N
    double pair_terms;         // 6 c_N
    double output_terms;       // 4
    double kernel_over_width;  // c_v^2 / (c_gamma sqrt(lambda2))
    double strip_factor;       // kappa, measured on the grid
    double value;
};

inline GainMomentConstant gain_moment_constant(double N, const PhysicalParams& p, double kappa) {
    p.validate();
    GainMomentConstant c;
    c.omega_split = omega_split_constant(N);
    c.pair_terms = 6.0 * c.omega_split;
    c.output_terms = 4.0;
    c.kernel_over_width = p.c_v * p.c_v / (p.c_gamma * std::sqrt(p.lambda2));
    c.strip_factor = kappa;
    c.value = (c.pair_terms + c.output_terms) * c.kernel_over_width * c.strip_factor;
    return c;
}

// Growth rate of the exponential moment envelope M_N(t) <= M_N(0) e^{A t}
// along explicit Euler iterates: the gain bound contributes C_der * w per
// node, viscous damping takes away (2 nu / lambda2) w^2 up to the gap term.
// The maximum over grid nodes is what the per-step inequality actually uses.
inline double envelope_rate(double N, const PhysicalParams& p, const RadialGrid& g, double kappa) {
    const double cder = gain_moment_constant(N, p, kappa).value;
    double peak = 0.0;
    for (const double r : g.nodes) {
        const double w = omega(r, p);
        peak = std::max(peak, cder * w - (2.0 * p.nu / p.lambda2) * w * w);
    }
    return peak + 2.0 * p.nu * p.lambda1 / p.lambda2;
}

// Lipschitz constant for the collision operator between weighted-L1 norms:
// ||Q[g] - Q[h]||_{L1_N} <= value * ||g - h||_{L1_{N+1}} over the family
// with mass >= mass_floor and ||.||_{L1_{N+2}} <= norm_ceiling. The chain
// needs a positive dispersion gap: the frequency floor converts plain-mass
// factors into the (N+1)-weighted norm of the difference. The Holder form
// follows by moment interpolation, paying sqrt(2 * norm_ceiling).
struct LipschitzConstant {
    double omega_split;        // c_N
    double term_count;         // 18 bilinear difference terms
    double kernel_over_width;  // c_v^2 / (c_gamma sqrt(lambda2))
    double strip_factor;       // kappa
    double a0;                 // mass ceiling   norm_ceiling / w_floor^{N+2}
    double a1;                 // L1_{N+1} ceiling  norm_ceiling / w_floor
    double value;
    double holder;             // value * sqrt(2 * norm_ceiling)
};

inline LipschitzConstant lipschitz_constant(double N, double norm_ceiling, double mass_floor,
                                            const PhysicalParams& p, double kappa) {
    p.validate();
    if (!(p.lambda1 > 0.0)) {
        throw std::invalid_argument("continuity constants require a dispersion gap lambda1 > 0");
    }
    if (!(norm_ceiling > 0.0) || !(mass_floor > 0.0)) {
        throw std::invalid_argument("family bounds must be positive");
    }
    const double w_floor = std::sqrt(p.lambda1);
    LipschitzConstant c;
    c.omega_split = omega_split_constant(N);
    c.term_count = 18.0;
    c.kernel_over_width = p.c_v * p.c_v / (p.c_gamma * std::sqrt(p.lambda2));
    c.strip_factor = kappa;
    c.a0 = norm_ceiling / std::pow(w_floor, N + 2.0);
    c.a1 = norm_ceiling / w_floor;
    const double gap = std::pow(w_floor, -(N + 1.0));
    c.value = c.term_count * c.omega_split * c.kernel_over_width * c.strip_factor
            * ((c.a0 + c.a1 * gap) / mass_floor + c.a0 * c.a1 * gap / (mass_floor * mass_floor));
    c.holder = c.value * std::sqrt(2.0 * norm_ceiling);
    return c;
}

} // namespace wavekin
