#include "recap/errors.hpp"
#include "recap/harq_analytic.hpp"
#include "recap/mc_simulator.hpp"

#include <doctest.h>

#include <cmath>

using namespace recap;

namespace {

double arq_closed(double p1, double r, double theta) {
    return -std::log(1.0 - p1 + p1 * std::exp(-theta * r)) / theta;
}

HarqProfile geometric_profile(double p1, int m, double r) {
    std::vector<double> p(m);
    for (int i = 0; i < m; ++i) p[i] = p1 * std::pow(1.0 - p1, i);
    return HarqProfile(p, r);
}

double eq1_throughput(const HarqProfile& prof) {
    double q = 1.0, denom = 0.0;
    for (double pm : prof.P) {
        denom += q;
        q -= pm;
    }
    return prof.rate_R * (1.0 - prof.Q_M) / denom;
}

} // namespace

TEST_CASE("ceff_char_eq") {
    SUBCASE("M = 1 is the ARQ form") {
        HarqProfile prof({0.55}, 4.0);
        for (double theta : {0.1, 0.5, 1.0, 3.0}) {
            CHECK(ceff_char_eq(prof, theta).value ==
                  doctest::Approx(arq_closed(0.55, 4.0, theta)).epsilon(1e-13));
        }
    }
    SUBCASE("geometric profiles are M-independent (ARQ degeneration)") {
        const double theta = 0.8, r = 4.0;
        double ref = arq_closed(0.7, r, theta);
        for (int m : {1, 2, 5, 10}) {
            CHECK(ceff_char_eq(geometric_profile(0.7, m, r), theta).value ==
                  doctest::Approx(ref).epsilon(1e-10));
        }
    }
    SUBCASE("theta -> 0 recovers the truncated throughput") {
        HarqProfile prof({0.5, 0.25}, 4.0);
        CHECK(ceff_char_eq(prof, 1e-6).value ==
              doctest::Approx(eq1_throughput(prof)).epsilon(1e-4));
    }
}

TEST_CASE("ceff_m2_closed") {
    CHECK(ceff_m2_closed(1.0, 0.0, 4.0, 0.9) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(ceff_m2_closed(0.0, 0.0, 4.0, 0.9) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(ceff_m2_closed(0.5, 0.25, 4.0, 1.0) ==
          doctest::Approx(ceff_char_eq(HarqProfile({0.5, 0.25}, 4.0), 1.0).value)
              .epsilon(1e-12));
    CHECK_THROWS_AS(ceff_m2_closed(0.7, 0.5, 4.0, 1.0), MassExceedsOne);
}

TEST_CASE("cross-method equality over a randomized grid") {
    for (int t = 0; t < 400; ++t) {
        double p1 = 0.05 + 0.9 * rng::uniform01(41, t, 0);
        double p2 = (1.0 - p1) * rng::uniform01(41, t, 1);
        double r = 0.5 + 7.5 * rng::uniform01(41, t, 2);
        double theta = 0.05 + 2.0 * rng::uniform01(41, t, 3);
        HarqProfile prof({p1, p2}, r);
        double a = ceff_char_eq(prof, theta).value;
        double b = eff_cap_infinite(build_companion(prof.to_kernel(), theta)).value;
        double c = ceff_m2_closed(p1, p2, r, theta);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, a));
        CHECK(std::abs(a - c) <= 1e-10 * std::max(1.0, a));
        CHECK(a >= 0.0);
        CHECK(a <= r + 1e-12);
    }
}

TEST_CASE("ceff_approx_small_theta") {
    SUBCASE("theta -> 0 approaches R/mu") {
        HarqProfile prof = geometric_profile(0.6, 60, 4.0);
        double approx = ceff_approx_small_theta(prof, 1e-7);
        CHECK(approx == doctest::Approx(4.0 * 0.6).epsilon(1e-5)); // R/mu = R P1
    }
    SUBCASE("single deterministic transmission at theta = 0.01 within 1%") {
        HarqProfile prof({1.0}, 4.0);
        double exact = arq_closed(1.0, 4.0, 0.01);
        CHECK(std::abs(ceff_approx_small_theta(prof, 0.01) - exact) <= 0.01 * exact);
    }
    SUBCASE("geometric profiles: 2% at theta = 0.05, error shrinks with theta") {
        for (double p1 : {0.5, 0.7, 0.9}) {
            HarqProfile prof = geometric_profile(p1, 120, 4.0);
            double prev_err = 1e300;
            for (double theta : {0.05, 0.02, 0.01}) {
                double exact = arq_closed(p1, 4.0, theta);
                double err = std::abs(ceff_approx_small_theta(prof, theta) - exact) / exact;
                if (theta == 0.05) CHECK(err <= 0.02);
                CHECK(err < prev_err);
                prev_err = err;
            }
        }
    }
    SUBCASE("truncated profiles are rejected") {
        CHECK_THROWS_AS(ceff_approx_small_theta(HarqProfile({0.5, 0.25}, 4.0), 0.01),
                        DomainError);
    }
}

TEST_CASE("ceff_psi_truncated") {
    SUBCASE("psi -> 0 equals the truncated throughput") {
        HarqProfile prof({0.5, 0.25}, 4.0);
        CHECK(ceff_psi_truncated(prof, 1e-8) ==
              doctest::Approx(eq1_throughput(prof)).epsilon(1e-6));
    }
    SUBCASE("persistent geometric equals the ARQ psi-form") {
        const double q1 = 0.3, r = 4.0;
        HarqProfile prof = geometric_profile(1.0 - q1, 120, r);
        for (double psi : {0.1, 0.4, 0.9}) {
            double expected = r / (1.0 + std::log((1.0 - q1) / (1.0 - q1 * std::exp(psi))) / psi);
            CHECK(ceff_psi_truncated(prof, psi) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
    SUBCASE("domain boundary is strict") {
        HarqProfile prof({0.5, 0.25}, 4.0); // Q_2 = 0.25, bound = -ln(0.25)/2
        double bound = -std::log(0.25) / 2.0;
        CHECK(std::isfinite(ceff_psi_truncated(prof, bound - 1e-9)));
        CHECK(ceff_psi_truncated(prof, bound - 1e-9) > 0.0);
        CHECK_THROWS_AS(ceff_psi_truncated(prof, bound), PsiOutOfDomain);
        CHECK_THROWS_AS(ceff_psi_truncated(prof, bound + 0.1), PsiOutOfDomain);
    }
}

TEST_CASE("theta_from_psi") {
    SUBCASE("deterministic ARQ: theta* = psi / R") {
        HarqProfile prof({1.0}, 4.0);
        CHECK(theta_from_psi(prof, 0.7) == doctest::Approx(0.7 / 4.0).epsilon(1e-12));
    }
    SUBCASE("round trip: ceff at theta* reproduces C(psi)") {
        // Rayleigh-derived truncated profile at 20 dB, R = 4
        const double th_cap = 15.0 / 100.0;
        double q1 = -std::expm1(-th_cap);
        double q2 = 1.0 - std::exp(-th_cap) * (1.0 + th_cap);
        HarqProfile prof({1.0 - q1, q1 - q2}, 4.0);
        double bound = -std::log(prof.Q_M) / 2.0;
        for (int i = 1; i <= 9; ++i) {
            double psi = 0.1 * i * bound * 0.9;
            double c_psi = ceff_psi_truncated(prof, psi);
            double theta_star = theta_from_psi(prof, psi);
            double c_theta = ceff_char_eq(prof, theta_star).value;
            CHECK(std::abs(c_theta - c_psi) <= 1e-9 * c_psi);
        }
    }
    SUBCASE("psi -> 0: theta* ~ psi / T") {
        HarqProfile prof({0.5, 0.25}, 4.0);
        CHECK(theta_from_psi(prof, 1e-8) ==
              doctest::Approx(1e-8 / eq1_throughput(prof)).epsilon(1e-5));
    }
}
