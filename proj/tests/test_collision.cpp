#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <wavekin/collision.hpp>
#include <wavekin/derived.hpp>
#include <wavekin/spectrum.hpp>

using wavekin::GridSpacing;
using wavekin::PhysicalParams;
using wavekin::RadialGrid;
using wavekin::Spectrum;

namespace {

PhysicalParams params(double l1, double l2, double nu = 0.0) {
    PhysicalParams p;
    p.lambda1 = l1;
    p.lambda2 = l2;
    p.nu = nu;
    return p;
}

std::shared_ptr<const RadialGrid> grid(double a, double b, std::size_t n,
                                       GridSpacing s = GridSpacing::uniform) {
    return std::make_shared<const RadialGrid>(wavekin::build_grid(a, b, n, s));
}

// Tiny hand-rolled grid for the membership examples (build_grid enforces a
// minimum node count that the worked examples do not need).
std::shared_ptr<const RadialGrid> toy_grid(std::vector<double> nodes) {
    RadialGrid g;
    g.nodes = std::move(nodes);
    g.line_weights.assign(g.nodes.size(), 1.0);
    g.line_weights.front() = 0.5;
    g.line_weights.back() = 0.5;
    g.volume_weights.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        g.volume_weights[i] = 4.0 * std::numbers::pi * g.nodes[i] * g.nodes[i] * g.line_weights[i];
    }
    return std::make_shared<const RadialGrid>(std::move(g));
}

Spectrum gaussian_bump(std::shared_ptr<const RadialGrid> g, double A, double r0, double sigma) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = (g->nodes[i] - r0) / sigma;
        v[i] = A * std::exp(-d * d);
    }
    return wavekin::make_spectrum(g, std::move(v));
}

Spectrum random_spectrum(std::shared_ptr<const RadialGrid> g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(g->size());
    for (auto& x : v) x = u(rng);
    return wavekin::make_spectrum(g, std::move(v));
}

} // namespace

TEST_CASE("triad table membership", "[collision]") {
    const auto g = toy_grid({1.0, 2.0, 3.0});
    const auto table = wavekin::build_triads(*g);
    SECTION("triangle-inequality boundary cases from the worked examples") {
        CHECK(table.has_triad(2, 0, 1));   // radii (3,1,2): |1-2| <= 3 <= 3
        CHECK(table.has_triad(0, 2, 2));   // radii (1,3,3): 0 <= 1 <= 6
        CHECK(!table.has_triad(0, 0, 2));  // radii (1,1,3): 1 < |1-3|
    }
    SECTION("strip weights: half on the degenerate cut, one inside") {
        for (std::size_t t = 0; t < table.triad_count(); ++t) {
            const auto [i, j, l] = table.triad(t);
            double r[3] = {g->nodes[i], g->nodes[j], g->nodes[l]};
            std::sort(r, r + 3);
            const bool cut = r[2] == r[0] + r[1];
            CHECK(table.strip_weight[t] == (cut ? 0.5 : 1.0));
        }
        // radii (3,1,2) sit on the cut; radii (2,2,2) and (1,3,3) are interior
        const auto weight_of = [&](std::size_t i, std::size_t j, std::size_t l) {
            for (std::size_t t = table.row_begin[i]; t < table.row_begin[i + 1]; ++t) {
                if (table.j_idx[t] == j && table.l_idx[t] == l) return table.strip_weight[t];
            }
            return -1.0;
        };
        CHECK(weight_of(2, 0, 1) == 0.5);
        CHECK(weight_of(1, 1, 1) == 1.0);
        CHECK(weight_of(0, 2, 2) == 1.0);
    }
    SECTION("pair symmetry") {
        for (std::size_t t = 0; t < table.triad_count(); ++t) {
            const auto [i, j, l] = table.triad(t);
            CHECK(table.has_triad(i, l, j));
        }
    }
    SECTION("prefactors match the reduction measure") {
        for (std::size_t t = 0; t < table.triad_count(); ++t) {
            const auto [i, j, l] = table.triad(t);
            const double expect = (2.0 * std::numbers::pi / g->nodes[i]) * g->nodes[j]
                                * g->nodes[l] * g->line_weights[j] * g->line_weights[l];
            CHECK(table.prefactor[t] == Catch::Approx(expect).epsilon(1e-14));
            CHECK(table.prefactor[t] >= 0.0);
        }
    }
}

TEST_CASE("triad table excludes zero radii", "[collision]") {
    const auto g = grid(0.0, 8.0, 9);
    const auto table = wavekin::build_triads(*g);
    CHECK(table.triad_count() > 0);
    for (std::size_t t = 0; t < table.triad_count(); ++t) {
        const auto [i, j, l] = table.triad(t);
        CHECK(i != 0);
        CHECK(j != 0);
        CHECK(l != 0);
        CHECK(std::abs(g->nodes[j] - g->nodes[l]) <= g->nodes[i] * (1 + 1e-12));
        CHECK(g->nodes[i] <= (g->nodes[j] + g->nodes[l]) * (1 + 1e-12));
    }
}

TEST_CASE("collision operator degenerate and structural rules", "[collision]") {
    const auto g = grid(0.0, 4.0, 33);
    const auto table = wavekin::build_triads(*g);
    const auto p = params(1.0, 1.0);
    SECTION("zero spectrum gives a zero result") {
        const auto f = wavekin::make_spectrum(g, std::vector<double>(g->size(), 0.0));
        const auto res = wavekin::evaluate(f, p, table);
        for (std::size_t i = 0; i < g->size(); ++i) {
            CHECK(res.gain[i] == 0.0);
            CHECK(res.theta[i] == 0.0);
            CHECK(res.q[i] == 0.0);
        }
    }
    SECTION("loss term is supported where f is supported") {
        std::vector<double> v(g->size(), 0.0);
        const std::size_t i0 = 17;
        v[i0] = 2.0;
        const auto f = wavekin::make_spectrum(g, std::move(v));
        const auto res = wavekin::evaluate(f, p, table);
        for (std::size_t i = 0; i < g->size(); ++i) {
            if (i == i0) {
                CHECK(f.values[i] * res.theta[i] > 0.0);
            } else {
                CHECK(f.values[i] * res.theta[i] == 0.0);
            }
        }
    }
    SECTION("gain and theta are nonnegative, q is their exact combination") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 5; ++trial) {
            const auto f = random_spectrum(g, rng);
            const auto res = wavekin::evaluate(f, p, table);
            for (std::size_t i = 0; i < g->size(); ++i) {
                CHECK(res.gain[i] >= 0.0);
                CHECK(res.theta[i] >= 0.0);
                CHECK(res.q[i] == res.gain[i] - f.values[i] * res.theta[i]);
            }
        }
    }
    SECTION("negative values and nonpositive broadening scales are rejected") {
        Spectrum bad;
        bad.grid = g;
        bad.values.assign(g->size(), 1.0);
        bad.values[3] = -1e-9;
        CHECK_THROWS_AS(wavekin::evaluate(bad, p, table), std::invalid_argument);
        std::mt19937_64 rng(1);
        const auto f = random_spectrum(g, rng);
        CHECK_THROWS_AS(wavekin::evaluate(f, p, table, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(wavekin::evaluate(f, p, table, -1.0), std::invalid_argument);
    }
}

TEST_CASE("attenuation pointwise bound", "[collision]") {
    const auto g = grid(0.0, 8.0, 128);
    const auto table = wavekin::build_triads(*g);
    const auto p = params(1.0, 1.0);
    SECTION("gaussian bump stays under 4r") {
        const auto f = gaussian_bump(g, 1.0, 2.0, 0.5);
        const auto th = wavekin::attenuation(f, p, table);
        for (std::size_t i = 1; i < g->size(); ++i) {
            CHECK(th[i] <= 4.0 * g->nodes[i] * (1.0 + 1e-12));
        }
    }
    SECTION("bound holds across random spectra") {
        std::mt19937_64 rng(22);
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_spectrum(g, rng);
            const auto th = wavekin::attenuation(f, p, table);
            for (std::size_t i = 1; i < g->size(); ++i) {
                REQUIRE(th[i] <= 4.0 * g->nodes[i] * (1.0 + 1e-12));
            }
        }
    }
    SECTION("bound is scale-free in the spectrum amplitude") {
        const auto base = gaussian_bump(g, 1.0, 2.0, 0.5);
        for (const double c : {0.1, 1.0, 10.0}) {
            auto v = base.values;
            for (auto& x : v) x *= c;
            const auto f = wavekin::make_spectrum(g, std::move(v));
            const auto th = wavekin::attenuation(f, p, table);
            for (std::size_t i = 1; i < g->size(); ++i) {
                REQUIRE(th[i] <= 4.0 * g->nodes[i] * (1.0 + 1e-12));
            }
        }
    }
    SECTION("matches the theta field of evaluate") {
        const auto f = gaussian_bump(g, 1.0, 2.0, 0.5);
        const auto th = wavekin::attenuation(f, p, table);
        const auto res = wavekin::evaluate(f, p, table);
        CHECK(th == res.theta);
    }
}

TEST_CASE("weak form matches the strong-form dot product", "[collision]") {
    const auto g = grid(0.0, 6.0, 64);
    const auto table = wavekin::build_triads(*g);
    const auto p = params(1.0, 1.0);
    std::mt19937_64 rng(23);
    const auto f = random_spectrum(g, rng);
    const auto res = wavekin::evaluate(f, p, table);
    SECTION("zero test function") {
        CHECK(wavekin::weak_form(f, std::vector<double>(g->size(), 0.0), p, table) == 0.0);
    }
    SECTION("unit test function gives the total q integral") {
        double strong = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i) strong += g->volume_weights[i] * res.q[i];
        const double weak = wavekin::weak_form(f, std::vector<double>(g->size(), 1.0), p, table);
        const double scale = std::abs(strong) + std::abs(weak);
        REQUIRE(std::abs(weak - strong) <= 1e-10 * scale);
    }
    SECTION("random test functions") {
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> phi(g->size());
            for (auto& x : phi) x = u(rng);
            double strong = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                strong += g->volume_weights[i] * res.q[i] * phi[i];
            }
            const double weak = wavekin::weak_form(f, phi, p, table);
            const double scale = std::abs(strong) + std::abs(weak) + 1e-300;
            REQUIRE(std::abs(weak - strong) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("gain moment estimate with the derived constant", "[collision]") {
    const auto g = grid(0.0, 8.0, 96);
    const auto table = wavekin::build_triads(*g);
    const auto p = params(1.0, 1.0);
    const double kappa = wavekin::strip_quadrature_factor(*g);
    CHECK(kappa >= 1.0 - 1e-12);
    std::mt19937_64 rng(24);
    for (const double N : {0.0, 1.0, 2.0}) {
        const auto cder = wavekin::gain_moment_constant(N, p, kappa);
        CHECK(cder.value > 0.0);
        for (int trial = 0; trial < 5; ++trial) {
            const auto f = random_spectrum(g, rng);
            const auto res = wavekin::evaluate(f, p, table);
            double gain_moment = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                gain_moment += g->volume_weights[i] * std::pow(wavekin::omega(g->nodes[i], p), N)
                             * res.gain[i];
            }
            const double bound = cder.value * wavekin::moment(f, N + 1.0, p);
            REQUIRE(gain_moment <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("broadening-scale linearity for positive lambda1", "[collision]") {
    // Small mass keeps eps*Gamma well below the frequency mismatch on every
    // mass-carrying triad, which is the regime where the Lorentzian is linear
    // in its width.
    const auto g = grid(0.0, 8.0, 64);
    const auto table = wavekin::build_triads(*g);
    const auto p = params(1.0, 1.0);
    auto f = gaussian_bump(g, 1.0, 2.0, 0.5);
    const double target_mass = 0.01;
    auto v = f.values;
    const double scale_to_small = target_mass / wavekin::mass(f);
    for (auto& x : v) x *= scale_to_small;
    f = wavekin::make_spectrum(g, std::move(v));

    std::vector<double> norms;
    for (const double eps : {1e-1, 1e-2, 1e-3}) {
        const auto res = wavekin::evaluate(f, p, table, eps);
        norms.push_back(wavekin::l1n_norm(*g, res.q, 0.0, p));
    }
    CHECK(norms[0] / norms[1] == Catch::Approx(10.0).epsilon(0.10));
    CHECK(norms[1] / norms[2] == Catch::Approx(10.0).epsilon(0.10));
}

TEST_CASE("near-resonance operator narrows onto the exact-resonance one", "[collision]") {
    // With no dispersion gap, shrinking the broadening squeezes the
    // Lorentzians onto the colinear manifold, so the two independently
    // implemented modes must approach each other. The smearing is first
    // order in the width, hence the coarse tolerance; it still pins the
    // shared normalization of both code paths well below any factor slip.
    wavekin::PhysicalParams p;
    p.lambda1 = 0.0;
    p.lambda2 = 1.0;
    const auto g = grid(0.0, 8.0, 193);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = (g->nodes[i] - 2.0) / 0.5;
        v[i] = std::exp(-d * d);
    }
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) m += g->volume_weights[i] * v[i];
    for (auto& x : v) x *= 0.010 / m;  // width between grid spacing and bump scale
    const auto f = wavekin::make_spectrum(g, std::move(v));

    const auto table = wavekin::build_triads(*g);
    const auto exact = wavekin::evaluate_exact(f, p);
    double scale_l1 = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        scale_l1 += g->volume_weights[i] * std::abs(exact.q[i]);
    }
    REQUIRE(scale_l1 > 0.0);

    std::vector<double> gaps;
    for (const double s : {2.0, 1.0, 0.5}) {
        const auto near = wavekin::evaluate(f, p, table, s);
        double d1 = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i) {
            d1 += g->volume_weights[i] * std::abs(near.q[i] - exact.q[i]);
        }
        gaps.push_back(d1 / scale_l1);
    }
    CHECK(gaps[0] > gaps[1]);
    CHECK(gaps[1] > gaps[2]);
    REQUIRE(gaps[2] <= 0.35);
}

TEST_CASE("exact-resonance operator", "[collision]") {
    SECTION("positive lambda1 has no resonant triads") {
        const auto g = grid(0.0, 8.0, 65);
        const auto f = gaussian_bump(g, 1.0, 2.0, 0.5);
        CHECK_THROWS_WITH(wavekin::evaluate_exact(f, params(0.5, 1.0)),
                          Catch::Matchers::ContainsSubstring("empty resonant manifold"));
    }
    SECTION("non-uniform grids are rejected") {
        const auto g = grid(0.1, 8.0, 65, GridSpacing::logarithmic);
        const auto f = gaussian_bump(g, 1.0, 2.0, 0.5);
        CHECK_THROWS_AS(wavekin::evaluate_exact(f, params(0.0, 1.0)), std::invalid_argument);
    }
    SECTION("grids not starting at zero are rejected") {
        const auto g = grid(0.5, 8.0, 65);
        const auto f = gaussian_bump(g, 1.0, 2.0, 0.5);
        CHECK_THROWS_AS(wavekin::evaluate_exact(f, params(0.0, 1.0)), std::invalid_argument);
    }
    SECTION("zero spectrum maps to zero") {
        const auto g = grid(0.0, 8.0, 65);
        const auto f = wavekin::make_spectrum(g, std::vector<double>(g->size(), 0.0));
        const auto res = wavekin::evaluate_exact(f, params(0.0, 1.0));
        for (std::size_t i = 0; i < g->size(); ++i) CHECK(res.q[i] == 0.0);
    }
    SECTION("quadratic energy is conserved to machine precision") {
        const auto g = grid(0.0, 8.0, 129);
        const auto p = params(0.0, 1.0);
        std::mt19937_64 rng(25);
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = (trial == 0) ? gaussian_bump(g, 1.0, 2.0, 0.5) : random_spectrum(g, rng);
            const auto res = wavekin::evaluate_exact(f, p);
            double energy = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                const double w = g->volume_weights[i] * wavekin::omega(g->nodes[i], p);
                energy += w * res.q[i];
                scale += std::abs(w * res.q[i]);
            }
            REQUIRE(scale > 0.0);
            REQUIRE(std::abs(energy) <= 1e-12 * scale);
        }
    }
    SECTION("q combines gain and theta exactly") {
        const auto g = grid(0.0, 8.0, 65);
        const auto f = gaussian_bump(g, 1.0, 2.0, 0.5);
        const auto res = wavekin::evaluate_exact(f, params(0.0, 1.0));
        for (std::size_t i = 0; i < g->size(); ++i) {
            CHECK(res.q[i] == res.gain[i] - f.values[i] * res.theta[i]);
            CHECK(res.gain[i] >= 0.0);
            CHECK(res.theta[i] >= 0.0);
        }
    }
}
