#pragma once

// Radial discretization of isotropic wavenumber space in d=3 and the
// spectra, moments, and weighted-L1 norms built on it. Line weights are
// trapezoidal: positivity of the weights is what lets the continuum
// inequality proofs carry over to the discrete sums verbatim.

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <wavekin/physics.hpp>

namespace wavekin {

enum class GridSpacing { uniform, logarithmic };

struct RadialGrid {
    std::vector<double> nodes;           // r_i, strictly increasing, r_0 >= 0
    std::vector<double> line_weights;    // w_i with sum w_i phi(r_i) ~ int phi dr
    std::vector<double> volume_weights;  // wv_i = 4 pi r_i^2 w_i
    GridSpacing spacing = GridSpacing::uniform;

    std::size_t size() const { return nodes.size(); }
    double r_min() const { return nodes.front(); }
    double r_max() const { return nodes.back(); }

    // Constant spacing of a uniform grid (the exact-resonance mode needs it).
    double step() const {
        if (spacing != GridSpacing::uniform || nodes.size() < 2) {
            throw std::logic_error("step() requires a uniform grid");
        }
        return (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
    }
};

inline RadialGrid build_grid(double r_min, double r_max, std::size_t n, GridSpacing spacing) {
    if (!(r_min >= 0.0) || !(r_min < r_max)) {
        throw std::invalid_argument("grid bounds must satisfy 0 <= r_min < r_max");
    }
    if (n < 8) throw std::invalid_argument("grid needs at least 8 nodes");
    if (spacing == GridSpacing::logarithmic && r_min <= 0.0) {
        throw std::invalid_argument("logarithmic spacing requires r_min > 0");
    }

    RadialGrid g;
    g.spacing = spacing;
    g.nodes.resize(n);
    if (spacing == GridSpacing::uniform) {
        const double h = (r_max - r_min) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) g.nodes[i] = r_min + h * static_cast<double>(i);
    } else {
        const double ratio = std::pow(r_max / r_min, 1.0 / static_cast<double>(n - 1));
        for (std::size_t i = 0; i < n; ++i) g.nodes[i] = r_min * std::pow(ratio, static_cast<double>(i));
    }
    g.nodes.front() = r_min;
    g.nodes.back() = r_max;

    g.line_weights.resize(n);
    g.line_weights.front() = 0.5 * (g.nodes[1] - g.nodes[0]);
    g.line_weights.back() = 0.5 * (g.nodes[n - 1] - g.nodes[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        g.line_weights[i] = 0.5 * (g.nodes[i + 1] - g.nodes[i - 1]);
    }

    g.volume_weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.volume_weights[i] = 4.0 * std::numbers::pi * g.nodes[i] * g.nodes[i] * g.line_weights[i];
    }
    return g;
}

using GridPtr = std::shared_ptr<const RadialGrid>;

// Nonnegative isotropic wave-action density sampled at the grid nodes.
struct Spectrum {
    GridPtr grid;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

inline Spectrum make_spectrum(GridPtr grid, std::vector<double> values) {
    if (!grid) throw std::invalid_argument("spectrum requires a grid");
    if (values.size() != grid->size()) {
        throw std::invalid_argument("spectrum length does not match grid size");
    }
    for (const double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("spectrum values must be finite and >= 0");
        }
    }
    return Spectrum{std::move(grid), std::move(values)};
}

struct MomentVector {
    std::vector<double> orders;
    std::vector<double> moments;
};

// All reductions below sum in ascending node order so results are
// bit-reproducible run to run.

inline double mass(const Spectrum& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f.grid->volume_weights[i] * f.values[i];
    return acc;
}

inline double moment(const Spectrum& f, double n, const PhysicalParams& p) {
    if (!(n >= 0.0)) throw std::invalid_argument("moment order must be >= 0");
    if (n == 0.0) return mass(f);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        acc += f.grid->volume_weights[i] * std::pow(omega(f.grid->nodes[i], p), n) * f.values[i];
    }
    return acc;
}

inline MomentVector moments(const Spectrum& f, std::span<const double> orders,
                            const PhysicalParams& p) {
    MomentVector mv;
    mv.orders.assign(orders.begin(), orders.end());
    mv.moments.reserve(orders.size());
    for (const double n : orders) mv.moments.push_back(moment(f, n, p));
    return mv;
}

// Weighted L1 norm of raw (possibly signed) per-node data.
inline double l1n_norm(const RadialGrid& grid, std::span<const double> values, double N,
                       const PhysicalParams& p) {
    if (!(N >= 0.0)) throw std::invalid_argument("norm order must be >= 0");
    if (values.size() != grid.size()) {
        throw std::invalid_argument("value length does not match grid size");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        acc += grid.volume_weights[i] * std::pow(omega(grid.nodes[i], p), N) * std::abs(values[i]);
    }
    return acc;
}

inline double l1n_norm(const Spectrum& f, double N, const PhysicalParams& p) {
    return l1n_norm(*f.grid, f.values, N, p);
}

inline double restricted_mass(const Spectrum& f, double R0) {
    if (!(R0 > 0.0)) throw std::invalid_argument("restriction radius must be > 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size() && f.grid->nodes[i] <= R0; ++i) {
        acc += f.grid->volume_weights[i] * f.values[i];
    }
    return acc;
}

// Moment interpolation: returns (M_n, M_p^{(N-n)/(N-p)} * M_N^{(n-p)/(N-p)});
// the first component never exceeds the second beyond roundoff.
inline std::pair<double, double> interpolation_gap(const Spectrum& f, double p_ord, double n_ord,
                                                   double N_ord, const PhysicalParams& p) {
    if (!(p_ord >= 0.0 && p_ord < n_ord && n_ord < N_ord)) {
        throw std::invalid_argument("interpolation orders must satisfy 0 <= p < n < N");
    }
    if (mass(f) == 0.0) return {0.0, 0.0};
    const double mp = moment(f, p_ord, p);
    const double mn = moment(f, n_ord, p);
    const double mN = moment(f, N_ord, p);
    const double a = (N_ord - n_ord) / (N_ord - p_ord);
    const double b = (n_ord - p_ord) / (N_ord - p_ord);
    return {mn, std::pow(mp, a) * std::pow(mN, b)};
}

} // namespace wavekin
