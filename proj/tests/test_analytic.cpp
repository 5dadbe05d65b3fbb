#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hetnet/analytic.hpp"
#include "oracles.hpp"

using namespace hetnet;
using oracle::pi;

namespace {

const QuadratureSpec tight{1e-13, 1e-11, 2000};

}  // namespace

TEST_CASE("rho closed forms and frozen values") {
    CHECK(rho(1.0, 4.0, tight) == doctest::Approx(pi / 4.0).epsilon(1e-12));
    CHECK(rho(1.0, 3.5, tight) == doctest::Approx(oracle::frozen::rho_1_35).epsilon(1e-11));
    CHECK(rho(10.0, 4.0, tight) == doctest::Approx(oracle::frozen::rho_10_4).epsilon(1e-11));
    CHECK(rho(1e-9, 4.0, tight) == doctest::Approx(oracle::frozen::rho_tiny_4).epsilon(1e-10));
    // alpha = 4: rho = sqrt(tau) (pi/2 - atan(1/sqrt(tau))).
    for (double tau : {0.1, 0.5, 3.0, 100.0}) {
        const double ref = std::sqrt(tau) * (pi / 2 - std::atan(1.0 / std::sqrt(tau)));
        CHECK(rho(tau, 4.0, tight) == doctest::Approx(ref).epsilon(1e-11));
    }
}

TEST_CASE("rho rejects invalid inputs") {
    CHECK_THROWS_AS((void)rho(1.0, 2.0), DomainError);
    CHECK_THROWS_AS((void)rho(1.0, 1.5), DomainError);
    CHECK_THROWS_AS((void)rho(0.0, 3.5), DomainError);
    CHECK_THROWS_AS((void)rho(-1.0, 3.5), DomainError);
}

TEST_CASE("z_interference") {
    CHECK(z_interference(1.0, 3.5, 2.0, tight) == doctest::Approx(oracle::frozen::z_1_35_2).epsilon(1e-11));
    CHECK(z_interference(2.0, 4.0, 0.5, tight) == doctest::Approx(oracle::frozen::z_2_4_half).epsilon(1e-11));
    // Unit bias ratio reduces to rho.
    CHECK(z_interference(1.7, 3.2, 1.0, tight) == doctest::Approx(rho(1.7, 3.2, tight)).epsilon(1e-12));
    double prev = 1e300;
    for (double b : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double z = z_interference(1.0, 3.5, b, tight);
        CHECK(z < prev);
        prev = z;
    }
    CHECK_THROWS_AS((void)z_interference(1.0, 3.5, 0.0), DomainError);
}

TEST_CASE("coverage_stationary") {
    CHECK(coverage_stationary(1.0, 3.5) == doctest::Approx(oracle::frozen::coverage_1_35).epsilon(1e-10));
    // Averaging the conditional coverage over the nearest-AP distance gives
    // the same number at any density.
    for (double density : {1e-5, 1e-3, 1e-1}) {
        const double top = nearest_distance_cutoff(density);
        const double avg = oracle::simpson(
            [&](double r) { return nearest_distance_pdf(density, r) * coverage_given_distance(density, r, 1.0, 3.5); },
            0.0, top, 20000);
        CHECK(avg == doctest::Approx(coverage_stationary(1.0, 3.5)).epsilon(1e-9));
    }
}

TEST_CASE("nearest-distance density") {
    const double density = 2e-3;
    const double top = nearest_distance_cutoff(density);
    CHECK(std::exp(-pi * density * top * top) == doctest::Approx(1e-12).epsilon(1e-6));
    const double mass = oracle::simpson([&](double r) { return nearest_distance_pdf(density, r); }, 0.0, top, 20000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("excess area matches the lens construction") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        const double r = 0.01 + 200.0 * u(gen);
        const double v = 100.0 * u(gen) * u(gen);
        const double theta = pi * u(gen);
        const double got = excess_area(r, v, theta);
        const double ref = oracle::swept_area(r, v, theta);
        CHECK(got == doctest::Approx(ref).epsilon(1e-8).scale(r * r + v * v));
    }
    CHECK(excess_area(10.0, 0.0, 1.0) == 0.0);
    CHECK(excess_area(0.0, 3.0, 0.0) == doctest::Approx(pi * 9.0));
    CHECK_THROWS_AS((void)excess_area(1.0, 1.0, -0.1), DomainError);
    CHECK_THROWS_AS((void)excess_area(1.0, 1.0, 3.2), DomainError);
    CHECK_THROWS_AS((void)excess_area(-1.0, 1.0, 0.5), DomainError);
}

TEST_CASE("conditional handoff probability against point counting") {
    // Old position at the origin, serving AP at (r, 0). Points inside the old
    // serving disc are excluded by the conditioning, so a handoff happens iff
    // a point lands in the new serving disc but outside the old one.
    const double density = 1e-3;
    const double r = 20.0;
    const double v = 12.0;
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double theta : {0.0, pi / 3, pi / 2, 2.5}) {
        const double dir = pi + theta;  // theta = 0 moves away from the AP
        const double mx = v * std::cos(dir);
        const double my = v * std::sin(dir);
        const double R = std::hypot(r - mx, my);
        std::poisson_distribution<int> count(density * 4 * R * R);
        const int reps = 20000;
        int hits = 0;
        for (int rep = 0; rep < reps; ++rep) {
            const int n = count(gen);
            bool hit = false;
            for (int i = 0; i < n; ++i) {
                const double x = mx + R * (2 * u(gen) - 1);
                const double y = my + R * (2 * u(gen) - 1);
                hit = hit || (std::hypot(x - mx, y - my) < R && std::hypot(x, y) > r);
            }
            hits += hit;
        }
        const double p = static_cast<double>(hits) / reps;
        const double se = std::sqrt(p * (1 - p) / reps);
        const double expected = handoff_prob_conditional(density, r, v, theta);
        CHECK(std::fabs(p - expected) < 4.0 * se);
    }
}

TEST_CASE("radial handoff rate") {
    for (const auto& c : oracle::frozen::radial) {
        CHECK(handoff_rate_radial(c.density, c.v) == doctest::Approx(c.value).epsilon(1e-10));
        // Same number from the general geometry at theta = 0.
        CHECK(handoff_rate_exact(c.density, MobilityProfile::radial(c.v), tight) ==
              doctest::Approx(c.value).epsilon(1e-8));
    }
    CHECK(handoff_rate_radial(1e-3, 0.0) == 0.0);
    CHECK_THROWS_AS((void)handoff_rate_radial(0.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)handoff_rate_radial(1e-3, -1.0), DomainError);
}

TEST_CASE("uniform-angle handoff rate, exact and small-displacement") {
    for (const auto& c : oracle::frozen::uniform) {
        const auto prof = MobilityProfile::isotropic(c.v);
        CHECK(handoff_rate_exact(c.density, prof, tight) == doctest::Approx(c.exact).epsilon(1e-7));
        CHECK(handoff_rate_approx(c.density, c.v, tight) == doctest::Approx(c.approx).epsilon(1e-7));
    }
    CHECK(handoff_rate_exact(1e-3, MobilityProfile::isotropic(0.0)) == 0.0);
    CHECK(handoff_rate_approx(1e-3, 0.0) == 0.0);
}

TEST_CASE("handoff rate depends on density and v only through density v^2") {
    const auto a = handoff_rate_exact(1e-3, MobilityProfile::isotropic(5.0));
    const auto b = handoff_rate_exact(1e-5, MobilityProfile::isotropic(50.0));
    CHECK(a == doctest::Approx(b).epsilon(1e-7));
    CHECK(handoff_rate_radial(4e-4, 3.0) == doctest::Approx(handoff_rate_radial(1e-4, 6.0)).epsilon(1e-13));
}

TEST_CASE("handoff rates increase with v and density") {
    double prev = 0.0;
    for (double v : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        const double h = handoff_rate_exact(1e-3, MobilityProfile::isotropic(v));
        CHECK(h > prev);
        CHECK(h < 1.0);
        prev = h;
    }
    prev = 0.0;
    for (double d : {1e-5, 1e-4, 1e-3, 1e-2}) {
        const double h = handoff_rate_approx(d, 5.0);
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("mobile single-tier coverage") {
    const auto prof = MobilityProfile::isotropic(15.0);
    CHECK(coverage_mobile_single_tier(1e-3, prof, 0.3, 1.0, 3.5, tight) ==
          doctest::Approx(oracle::frozen::mobile_coverage_beta03).epsilon(1e-7));
    CHECK(coverage_mobile_single_tier(1e-3, prof, 0.9, 1.0, 3.5, tight) ==
          doctest::Approx(oracle::frozen::mobile_coverage_beta09).epsilon(1e-7));

    const double stat = coverage_stationary(1.0, 3.5);
    CHECK(coverage_mobile_single_tier(1e-3, prof, 0.0, 1.0, 3.5) == doctest::Approx(stat).epsilon(1e-12));
    CHECK(coverage_mobile_single_tier(1e-3, MobilityProfile::isotropic(0.0), 0.8, 1.0, 3.5) ==
          doctest::Approx(stat).epsilon(1e-10));
    CHECK(coverage_mobile_single_tier_exact_geometry(1e-3, prof, 0.0, 1.0, 3.5) ==
          doctest::Approx(stat).epsilon(1e-12));
    CHECK(coverage_mobile_single_tier_exact_geometry(1e-3, MobilityProfile::isotropic(0.0), 0.8, 1.0, 3.5) ==
          doctest::Approx(stat).epsilon(1e-10));
}

TEST_CASE("mobile coverage is linear in beta") {
    for (double v : {2.0, 10.0, 30.0}) {
        const auto prof = MobilityProfile::isotropic(v);
        const double c0 = coverage_mobile_single_tier(1e-3, prof, 0.0, 1.0, 3.5, tight);
        const double c5 = coverage_mobile_single_tier(1e-3, prof, 0.5, 1.0, 3.5, tight);
        const double c1 = coverage_mobile_single_tier(1e-3, prof, 1.0, 1.0, 3.5, tight);
        CHECK(c5 == doctest::Approx(0.5 * (c0 + c1)).epsilon(1e-10));
        CHECK(c1 < c0);
    }
}

TEST_CASE("mobility factor") {
    CHECK(mobility_factor(1e-3, MobilityProfile::isotropic(0.0), 2.0) == doctest::Approx(1.0));
    double prev = 1.0;
    for (double v : {1.0, 5.0, 20.0, 80.0}) {
        const double m = mobility_factor(1e-3, MobilityProfile::isotropic(v), 2.0);
        CHECK(m > 0.0);
        CHECK(m < prev);
        prev = m;
    }
    CHECK_THROWS_AS((void)mobility_factor(1e-3, MobilityProfile::isotropic(1.0), 0.0), DomainError);
    // Small-displacement handoff rate is one minus the factor at denominator 1.
    CHECK(1.0 - mobility_factor(1e-3, MobilityProfile::isotropic(5.0), 1.0) ==
          doctest::Approx(handoff_rate_approx(1e-3, 5.0)).epsilon(1e-9));
}
