#pragma once

// Reference evaluation of the three-wave collision operator by direct
// quadrature of the unreduced wavevector integrals. The momentum delta is
// resolved by substitution (companion wavevector k2 = k - k1 for the forward
// placement, k1 = k + k2 for the mirrored one) and the surviving integral is
// taken in spherical coordinates around the output wavevector, over the
// companion radius and the cosine of the enclosed angle. None of the
// triangle-domain reduction used by the production code appears here; the
// only shared ingredients are the dispersion, kernel and broadening formulas.
//
// The reference acts on the piecewise-linear interpolant of the grid data,
// extended by zero beyond the grid, and integrates companions over all of
// wavevector space; the compact support of the interpolant supplies every
// cutoff. Companion radii run to twice the grid radius, beyond which every
// term carries a vanished interpolant factor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct CollisionFields {
    std::vector<double> gain;
    std::vector<double> theta;
    std::vector<double> q;
};

namespace detail {

inline std::vector<double> simpson_weights(double a, double b, std::size_t panels) {
    // Composite Simpson rule on 2*panels+1 equispaced points.
    const std::size_t m = 2 * panels + 1;
    const double h = (b - a) / static_cast<double>(2 * panels);
    std::vector<double> w(m, 0.0);
    for (std::size_t p = 0; p < panels; ++p) {
        w[2 * p] += h / 3.0;
        w[2 * p + 1] += 4.0 * h / 3.0;
        w[2 * p + 2] += h / 3.0;
    }
    return w;
}

inline std::vector<double> simpson_nodes(double a, double b, std::size_t panels) {
    const std::size_t m = 2 * panels + 1;
    const double h = (b - a) / static_cast<double>(2 * panels);
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = a + h * static_cast<double>(i);
    x.back() = b;
    return x;
}

struct Interpolant {
    const std::vector<double>* nodes;
    const std::vector<double>* values;

    double operator()(double x) const {
        const auto& r = *nodes;
        if (x < r.front() || x > r.back()) return 0.0;
        const auto it = std::upper_bound(r.begin(), r.end(), x);
        if (it == r.begin()) return (*values).front();
        if (it == r.end()) return (*values).back();
        const std::size_t hi = static_cast<std::size_t>(it - r.begin());
        const std::size_t lo = hi - 1;
        const double t = (x - r[lo]) / (r[hi] - r[lo]);
        return (1.0 - t) * (*values)[lo] + t * (*values)[hi];
    }
};

} // namespace detail

// The off-node values of the spectrum come from `shape`, typically the
// analytic form the grid data was sampled from (falling back to linear
// interpolation keeps the oracle usable for arbitrary data). The broadening
// couples to the same discrete mass functional the production code uses.
template <typename Shape>
inline CollisionFields collision_reference(const std::vector<double>& nodes,
                                           const std::vector<double>& volume_weights,
                                           const std::vector<double>& f, Shape&& shape,
                                           double lambda1, double lambda2,
                                           double c_v, double c_gamma,
                                           std::size_t radial_panels,
                                           std::size_t angular_panels) {
    const std::size_t n = nodes.size();
    const double R = nodes.back();
    const double pi = 3.14159265358979323846;

    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += volume_weights[i] * f[i];

    const auto omega = [&](double r) { return std::sqrt(lambda1 + lambda2 * r * r); };
    const auto lorentzian = [](double zeta, double width) {
        if (width <= 0.0) return 0.0;
        return width / (zeta * zeta + width * width);
    };
    const auto interp = [&](double r) { return r <= R ? shape(r) : 0.0; };

    const auto rad_x = detail::simpson_nodes(0.0, 2.0 * R, radial_panels);
    const auto rad_w = detail::simpson_weights(0.0, 2.0 * R, radial_panels);
    const auto mu_x = detail::simpson_nodes(-1.0, 1.0, angular_panels);
    const auto mu_w = detail::simpson_weights(-1.0, 1.0, angular_panels);

    CollisionFields out;
    out.gain.assign(n, 0.0);
    out.theta.assign(n, 0.0);
    out.q.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const double r = nodes[i];
        if (r <= 0.0) continue;
        const double fi = f[i];
        const double wr = omega(r);
        double gain = 0.0;
        double theta = 0.0;

        for (std::size_t a = 0; a < rad_x.size(); ++a) {
            const double s = rad_x[a];        // companion radius being integrated
            const double ws = rad_w[a] * s * s;
            if (ws == 0.0) continue;
            const double fs = interp(s);
            const double wsfreq = omega(s);
            double g_dir = 0.0, t_dir = 0.0, g_mir = 0.0, t_mir = 0.0;

            for (std::size_t b = 0; b < mu_x.size(); ++b) {
                const double mu = mu_x[b];
                const double wmu = mu_w[b];

                // Forward placement: k = k1 + k2 with k1 = s, k2 determined.
                {
                    const double r2 = std::sqrt(std::max(0.0, r * r + s * s - 2.0 * r * s * mu));
                    const double f2 = interp(r2);
                    const double kern = c_v * c_v * r * s * r2;
                    const double width = c_gamma * (r * r + s * s + r2 * r2) * mass;
                    const double L = lorentzian(wr - wsfreq - omega(r2), width);
                    g_dir += wmu * kern * L * fs * f2;
                    t_dir += wmu * kern * L * (fs + f2);
                }
                // Mirrored placement: k1 = k + k2 with k2 = s, k1 determined.
                // The two mirrored terms are equal integrals after relabeling
                // the companions, hence the factor two on this placement.
                {
                    const double r1 = std::sqrt(std::max(0.0, r * r + s * s + 2.0 * r * s * mu));
                    const double f1 = interp(r1);
                    const double kern = c_v * c_v * r * r1 * s;
                    const double width = c_gamma * (r * r + r1 * r1 + s * s) * mass;
                    const double L = lorentzian(omega(r1) - wr - wsfreq, width);
                    g_mir += wmu * kern * L * f1 * (fi + fs);
                    t_mir += wmu * kern * L * fs;
                }
            }
            gain += ws * (g_dir + 2.0 * g_mir);
            theta += ws * (t_dir + 2.0 * t_mir);
        }

        out.gain[i] = 2.0 * pi * gain;
        out.theta[i] = 2.0 * pi * theta;
        out.q[i] = out.gain[i] - fi * out.theta[i];
    }
    return out;
}

inline CollisionFields collision_reference(const std::vector<double>& nodes,
                                           const std::vector<double>& volume_weights,
                                           const std::vector<double>& f,
                                           double lambda1, double lambda2,
                                           double c_v, double c_gamma,
                                           std::size_t radial_panels,
                                           std::size_t angular_panels) {
    return collision_reference(nodes, volume_weights, f, detail::Interpolant{&nodes, &f},
                               lambda1, lambda2, c_v, c_gamma, radial_panels, angular_panels);
}

} // namespace oracle
