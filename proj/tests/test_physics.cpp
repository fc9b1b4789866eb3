#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <wavekin/physics.hpp>

#include "oracle_quadrature.hpp"

using wavekin::PhysicalParams;

namespace {

PhysicalParams params(double l1, double l2, double nu = 0.0,
                      double cv = 1.0, double cg = 1.0) {
    PhysicalParams p;
    p.lambda1 = l1;
    p.lambda2 = l2;
    p.nu = nu;
    p.c_v = cv;
    p.c_gamma = cg;
    return p;
}

} // namespace

TEST_CASE("dispersion relation", "[physics]") {
    SECTION("zero wavenumber gives sqrt(lambda1)") {
        CHECK(wavekin::omega(0.0, params(4.0, 1.0)) == 2.0);
    }
    SECTION("analytic points") {
        CHECK(wavekin::omega(std::sqrt(3.0), params(1.0, 1.0)) == Catch::Approx(2.0).epsilon(1e-15));
        CHECK(wavekin::omega(3.0, params(0.0, 4.0)) == Catch::Approx(6.0).epsilon(1e-15));
    }
    SECTION("strictly monotone in r") {
        const auto p = params(0.3, 2.5);
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> u(0.0, 50.0);
        for (int i = 0; i < 1000; ++i) {
            double a = u(rng), b = u(rng);
            if (a > b) std::swap(a, b);
            if (a == b) continue;
            CHECK(wavekin::omega(a, p) < wavekin::omega(b, p));
        }
    }
    SECTION("Minkowski gap: strict subadditivity along rays for lambda1 > 0") {
        const auto p = params(0.7, 1.9);
        std::mt19937_64 rng(102);
        std::uniform_real_distribution<double> u(1e-6, 30.0);
        for (int i = 0; i < 2000; ++i) {
            const double r1 = u(rng), r2 = u(rng);
            CHECK(wavekin::omega(r1, p) + wavekin::omega(r2, p) > wavekin::omega(r1 + r2, p));
            // the quantitative form used by the bound chains
            const double lhs = wavekin::omega(r1, p) + wavekin::omega(r2, p);
            const double s = r1 + r2;
            CHECK(lhs >= std::sqrt(4.0 * p.lambda1 + p.lambda2 * s * s) * (1.0 - 1e-14));
        }
    }
}

TEST_CASE("viscous damping rate", "[physics]") {
    CHECK(wavekin::damping_rate(2.0, params(1, 1, 0.5)) == 4.0);
    CHECK(wavekin::damping_rate(0.0, params(1, 1, 123.0)) == 0.0);
    CHECK(wavekin::damping_rate(10.0, params(1, 1, 0.1)) == Catch::Approx(20.0).epsilon(1e-15));
}

TEST_CASE("interaction kernel", "[physics]") {
    CHECK(wavekin::kernel_v2(1.0, 2.0, 3.0, params(1, 1)) == 6.0);
    CHECK(wavekin::kernel_v2(0.0, 5.0, 7.0, params(1, 1, 0, 3.0)) == 0.0);
    CHECK(wavekin::kernel_v2(2.0, 2.0, 2.0, params(1, 1, 0, 2.0)) == 32.0);
    SECTION("symmetric under permutations") {
        const auto p = params(1, 1, 0, 1.7);
        const double a = wavekin::kernel_v2(0.5, 1.25, 4.0, p);
        CHECK(wavekin::kernel_v2(1.25, 0.5, 4.0, p) == a);
        CHECK(wavekin::kernel_v2(4.0, 1.25, 0.5, p) == a);
    }
}

TEST_CASE("broadening rates", "[physics]") {
    SECTION("single-mode rate") {
        CHECK(wavekin::gamma_k(2.0, 3.0, params(1, 1)) == 12.0);
        CHECK(wavekin::gamma_k(0.0, 9.0, params(1, 1)) == 0.0);
        CHECK(wavekin::gamma_k(1.0, 0.0, params(1, 1)) == 0.0);
    }
    SECTION("triad width") {
        CHECK(wavekin::gamma_broadening(1.0, 1.0, 1.0, 2.0, params(1, 1)) == 6.0);
        CHECK(wavekin::gamma_broadening(1.0, 2.0, 2.0, 1.0, params(1, 1)) == 9.0);
        CHECK(wavekin::gamma_broadening(3.0, 4.0, 5.0, 0.0, params(1, 1)) == 0.0);
    }
    SECTION("triad width is the sum of the three single-mode rates, exactly") {
        const auto p = params(1, 1, 0, 1, 2.25);
        std::mt19937_64 rng(103);
        std::uniform_real_distribution<double> u(0.0, 12.0);
        for (int i = 0; i < 500; ++i) {
            const double r = u(rng), r1 = u(rng), r2 = u(rng), m = u(rng);
            CHECK(wavekin::gamma_broadening(r, r1, r2, m, p)
                  == wavekin::gamma_k(r, m, p) + wavekin::gamma_k(r1, m, p) + wavekin::gamma_k(r2, m, p));
        }
    }
}

TEST_CASE("lorentzian density", "[physics]") {
    SECTION("analytic points") {
        CHECK(wavekin::lorentzian(0.0, 2.0) == 0.5);
        CHECK(wavekin::lorentzian(1.0, 1.0) == 0.5);
    }
    SECTION("zero width degenerates to zero") {
        CHECK(wavekin::lorentzian(0.5, 0.0) == 0.0);
        CHECK(wavekin::lorentzian(0.0, 0.0) == 0.0);
    }
    SECTION("bounded by 1/Gamma and even in zeta") {
        std::mt19937_64 rng(104);
        std::uniform_real_distribution<double> uz(-50.0, 50.0);
        std::uniform_real_distribution<double> ug(1e-8, 20.0);
        for (int i = 0; i < 2000; ++i) {
            const double z = uz(rng), g = ug(rng);
            CHECK(wavekin::lorentzian(z, g) <= 1.0 / g);
            CHECK(wavekin::lorentzian(-z, g) == wavekin::lorentzian(z, g));
        }
    }
    SECTION("integrates to pi across the real line") {
        // Oracle: adaptive quadrature on (-1e4, 1e4) plus the analytic tail
        // of 1/(1+z^2), namely 2*atan(1/Z) for |z| > Z.
        const double body = oracle::adaptive_simpson(
            [](double z) { return wavekin::lorentzian(z, 1.0); }, -1e4, 1e4, 1e-10);
        const double tail = 2.0 * std::atan(1.0 / 1e4);
        CHECK(std::abs(body + tail - std::numbers::pi) < 1e-6);
    }
    SECTION("concentrates to pi*delta as Gamma shrinks") {
        // integral over a fixed window [-1,1] is 2*atan(1/Gamma) -> pi
        for (const double g : {1e-2, 1e-4, 1e-6}) {
            const double window = oracle::adaptive_simpson(
                [g](double z) { return wavekin::lorentzian(z, g); }, -1.0, 1.0, 1e-12);
            CHECK(std::abs(window - 2.0 * std::atan(1.0 / g)) < 1e-7);
            CHECK(std::abs(window - std::numbers::pi) < 2.0 * g);
        }
    }
}

TEST_CASE("parameter validation", "[physics]") {
    CHECK_NOTHROW(params(0.0, 1.0).validate());
    CHECK_THROWS_AS(params(1.0, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(-1.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(1.0, 1.0, -0.1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(1.0, 1.0, 0.0, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(1.0, 1.0, 0.0, 1.0, -2.0).validate(), std::invalid_argument);
}
