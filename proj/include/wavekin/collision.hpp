#pragma once

// Near-resonance collision operator on the radial grid, plus the exact
// resonance limit for gapless dispersion. The angular degrees of freedom are
// already integrated out: each interaction couples radii (r_i, r_j, r_l)
// satisfying the triangle inequality, with the reduction measure
// (2 pi / r_i) r_j r_l w_j w_l per ordered companion pair.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <wavekin/physics.hpp>
#include <wavekin/spectrum.hpp>

namespace wavekin {

// Enumeration of interacting triples, stored row-wise per output node. Rows
// follow node order and pairs within a row are lexicographic in (j, l), so a
// sweep over the table is deterministic. The triangle predicate is evaluated
// on sorted radii, which makes membership invariant under permutations of a
// triple; that closure is what turns the strong/weak formulations into exact
// rearrangements of each other.
//
// Degenerate triples (largest radius equal to the sum of the other two) sit
// exactly on the cut of the triangle-shaped integration strip. A trapezoid
// rule restricted to the strip weights such samples by one half; without
// that factor the quadrature over-counts the cut systematically (first-order
// in the spacing, since on uniform grids the cut always lands on nodes).
// The half is kept separate from the prefactor, which stays the plain
// interior reduction measure, and it is a function of the sorted radii, so
// permutation symmetry of the total triple weight is preserved.
struct TriadTable {
    std::vector<std::size_t> row_begin;  // size n+1
    std::vector<std::uint32_t> j_idx;
    std::vector<std::uint32_t> l_idx;
    std::vector<double> prefactor;       // (2 pi / r_i) r_j r_l w_j w_l
    std::vector<double> strip_weight;    // 1 inside the strip, 1/2 on its cut

    std::size_t node_count() const { return row_begin.empty() ? 0 : row_begin.size() - 1; }
    std::size_t triad_count() const { return j_idx.size(); }

    std::tuple<std::size_t, std::size_t, std::size_t> triad(std::size_t t) const {
        const auto it = std::upper_bound(row_begin.begin(), row_begin.end(), t);
        const auto i = static_cast<std::size_t>(it - row_begin.begin()) - 1;
        return {i, j_idx[t], l_idx[t]};
    }

    bool has_triad(std::size_t i, std::size_t j, std::size_t l) const {
        if (i + 1 >= row_begin.size()) return false;
        for (std::size_t t = row_begin[i]; t < row_begin[i + 1]; ++t) {
            if (j_idx[t] == j && l_idx[t] == l) return true;
        }
        return false;
    }
};

namespace detail {

// Permutation-safe triangle test: comparing the largest radius against the
// sum of the other two in sorted order gives the same verdict no matter
// which of the three plays the output role. Returns the quadrature weight of
// the triple relative to the strip: 0 outside, 1/2 on the degenerate cut,
// 1 inside. The relative tolerance absorbs the rounding of computed grid
// nodes (a few ulps), so boundary triples are classified consistently.
inline double strip_weight_of(double a, double b, double c) {
    std::array<double, 3> r{a, b, c};
    std::sort(r.begin(), r.end());
    const double slack = 1e-12 * r[2];
    if (r[2] - (r[0] + r[1]) > slack) return 0.0;
    if (std::abs(r[2] - (r[0] + r[1])) <= slack) return 0.5;
    return 1.0;
}

inline bool closes_triangle(double a, double b, double c) {
    return strip_weight_of(a, b, c) > 0.0;
}

inline void require_nonnegative(const Spectrum& f) {
    for (const double v : f.values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("collision operator requires finite nonnegative spectra");
        }
    }
}

inline void require_match(const Spectrum& f, const TriadTable& table) {
    if (f.size() != table.node_count()) {
        throw std::invalid_argument("triad table was built for a different grid size");
    }
}

} // namespace detail

inline TriadTable build_triads(const RadialGrid& grid) {
    const std::size_t n = grid.size();
    TriadTable table;
    table.row_begin.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        table.row_begin[i] = table.j_idx.size();
        const double ri = grid.nodes[i];
        if (ri <= 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const double rj = grid.nodes[j];
            if (rj <= 0.0) continue;
            for (std::size_t l = 0; l < n; ++l) {
                const double rl = grid.nodes[l];
                if (rl <= 0.0) continue;
                const double sw = detail::strip_weight_of(ri, rj, rl);
                if (sw == 0.0) continue;
                table.j_idx.push_back(static_cast<std::uint32_t>(j));
                table.l_idx.push_back(static_cast<std::uint32_t>(l));
                table.prefactor.push_back((2.0 * std::numbers::pi / ri) * rj * rl
                                          * grid.line_weights[j] * grid.line_weights[l]);
                table.strip_weight.push_back(sw);
            }
        }
    }
    table.row_begin[n] = table.j_idx.size();
    return table;
}

// Gain, attenuation and their combination q = gain - f * theta. The two
// fields are assembled per ordered companion pair: the forward placement
// weights the pair product, the two mirrored placements weight the products
// that involve the output node, and every term carries the Lorentzian of its
// own frequency mismatch with the shared triple broadening.
struct CollisionResult {
    std::vector<double> gain;
    std::vector<double> theta;
    std::vector<double> q;
};

inline CollisionResult evaluate(const Spectrum& f, const PhysicalParams& p,
                                const TriadTable& table, double gamma_scale = 1.0) {
    p.validate();
    detail::require_match(f, table);
    detail::require_nonnegative(f);
    if (!(gamma_scale > 0.0) || !std::isfinite(gamma_scale)) {
        throw std::invalid_argument("broadening scale must be positive and finite");
    }

    const RadialGrid& g = *f.grid;
    const std::size_t n = g.size();
    CollisionResult out;
    out.gain.assign(n, 0.0);
    out.theta.assign(n, 0.0);
    out.q.assign(n, 0.0);

    const double m = mass(f);
    if (m == 0.0) return out;  // no broadening, hence no near-resonant transfer

    std::vector<double> om(n);
    for (std::size_t i = 0; i < n; ++i) om[i] = omega(g.nodes[i], p);

    for (std::size_t i = 0; i < n; ++i) {
        const double fi = f.values[i];
        double gain = 0.0;
        double theta = 0.0;
        for (std::size_t t = table.row_begin[i]; t < table.row_begin[i + 1]; ++t) {
            const std::size_t j = table.j_idx[t];
            const std::size_t l = table.l_idx[t];
            const double width =
                gamma_scale * gamma_broadening(g.nodes[i], g.nodes[j], g.nodes[l], m, p);
            const double pk = table.prefactor[t] * table.strip_weight[t]
                            * kernel_v2(g.nodes[i], g.nodes[j], g.nodes[l], p);
            const double l_fwd = lorentzian(om[i] - om[j] - om[l], width);
            const double l_mj = lorentzian(om[j] - om[i] - om[l], width);
            const double l_ml = lorentzian(om[l] - om[i] - om[j], width);
            assert(l_fwd * width <= 1.0 + 1e-12);
            assert(l_mj * width <= 1.0 + 1e-12);
            assert(l_ml * width <= 1.0 + 1e-12);
            const double fj = f.values[j];
            const double fl = f.values[l];
            gain += pk * (l_fwd * fj * fl + l_mj * (fi * fj + fj * fl) + l_ml * (fi * fl + fl * fj));
            theta += pk * (l_fwd * (fj + fl) + l_mj * fl + l_ml * fj);
        }
        out.gain[i] = gain;
        out.theta[i] = theta;
        out.q[i] = gain - fi * theta;
    }
    return out;
}

inline std::vector<double> attenuation(const Spectrum& f, const PhysicalParams& p,
                                       const TriadTable& table) {
    return evaluate(f, p, table).theta;
}

// Action of the operator against a test function, written as a single sum
// over triples of the forward-placement density times (phi_i - phi_j -
// phi_l). Because the combined triple weight is fully symmetric and the
// table is permutation-closed, this is an exact regrouping of
// sum_i wv_i q_i phi_i.
inline double weak_form(const Spectrum& f, std::span<const double> phi, const PhysicalParams& p,
                        const TriadTable& table) {
    p.validate();
    detail::require_match(f, table);
    detail::require_nonnegative(f);
    if (phi.size() != f.size()) {
        throw std::invalid_argument("test function length does not match grid size");
    }

    const RadialGrid& g = *f.grid;
    const double m = mass(f);
    if (m == 0.0) return 0.0;

    const std::size_t n = g.size();
    std::vector<double> om(n);
    for (std::size_t i = 0; i < n; ++i) om[i] = omega(g.nodes[i], p);

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = f.values[i];
        for (std::size_t t = table.row_begin[i]; t < table.row_begin[i + 1]; ++t) {
            const std::size_t j = table.j_idx[t];
            const std::size_t l = table.l_idx[t];
            const double width = gamma_broadening(g.nodes[i], g.nodes[j], g.nodes[l], m, p);
            const double pk = table.prefactor[t] * table.strip_weight[t]
                            * kernel_v2(g.nodes[i], g.nodes[j], g.nodes[l], p);
            const double l_fwd = lorentzian(om[i] - om[j] - om[l], width);
            const double fj = f.values[j];
            const double fl = f.values[l];
            const double density = fj * fl - fi * fj - fi * fl;
            acc += g.volume_weights[i] * pk * l_fwd * density * (phi[i] - phi[j] - phi[l]);
        }
    }
    return acc;
}

// Exact resonance limit. With no dispersion gap the resonant manifold is the
// colinear set r_a = r_b + r_c; on a uniform grid starting at zero those
// triples land on nodes (index sum), and the delta in frequency integrates
// out against the segment quadrature. The scatter below accumulates the
// volume-weighted fields and divides by the volume weight once at the end,
// so each triple's contribution to the quadratic energy cancels exactly.
inline CollisionResult evaluate_exact(const Spectrum& f, const PhysicalParams& p) {
    p.validate();
    if (p.lambda1 != 0.0) {
        throw std::invalid_argument(
            "empty resonant manifold: a dispersion gap admits no colinear resonances");
    }
    const RadialGrid& g = *f.grid;
    if (g.spacing != GridSpacing::uniform) {
        throw std::invalid_argument("exact resonance mode requires a uniform grid");
    }
    if (g.r_min() != 0.0) {
        throw std::invalid_argument("exact resonance mode requires the grid to start at r = 0");
    }
    detail::require_nonnegative(f);

    const std::size_t n = g.size();
    const double h = g.step();
    const double base = std::numbers::pi * std::numbers::pi * p.c_v * p.c_v
                      / std::sqrt(p.lambda2) * h;

    std::vector<double> gain_w(n, 0.0), theta_w(n, 0.0);
    for (std::size_t a = 2; a < n; ++a) {
        const double fa = f.values[a];
        for (std::size_t b = 1; b < a; ++b) {
            const std::size_t c = a - b;
            const double rb = g.nodes[b];
            const double rc = g.nodes[c];
            const double w = g.volume_weights[a] * base * rb * rb * rc * rc;
            const double fb = f.values[b];
            const double fc = f.values[c];
            gain_w[a] += w * fb * fc;
            theta_w[a] += w * (fb + fc);
            gain_w[b] += w * (fa * fb + fa * fc);
            theta_w[b] += w * fc;
            gain_w[c] += w * (fa * fc + fa * fb);
            theta_w[c] += w * fb;
        }
    }

    CollisionResult out;
    out.gain.assign(n, 0.0);
    out.theta.assign(n, 0.0);
    out.q.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (g.volume_weights[i] > 0.0) {
            out.gain[i] = gain_w[i] / g.volume_weights[i];
            out.theta[i] = theta_w[i] / g.volume_weights[i];
        }
        out.q[i] = out.gain[i] - f.values[i] * out.theta[i];
    }
    return out;
}

} // namespace wavekin
