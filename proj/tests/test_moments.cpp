#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lmm/error.hpp"
#include "lmm/moments.hpp"
#include "oracles.hpp"

using namespace lmm;

TEST_CASE("g small cases") {
    CHECK(centered_moment_estimate(0, 0.3, 0.7, 10) == 1.0);
    CHECK(centered_moment_estimate(1, 0.2, 0.5, 17) == doctest::Approx(0.3));
    CHECK(centered_moment_estimate(2, 0.0, 0.3, 10) == doctest::Approx(0.06));
    CHECK_THROWS_AS(centered_moment_estimate(-1, 0.0, 0.3, 10), ConfigError);
    CHECK_THROWS_AS(centered_moment_estimate(2, 0.0, 0.3, 0), ConfigError);
}

TEST_CASE("g agrees with direct expansion") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 2000; ++rep) {
        const double n = 5.0 + 200.0 * u(rng);
        const int k = 1 + static_cast<int>(u(rng) * 10);
        const double x = u(rng) * 0.5;
        const double p = std::floor(u(rng) * n) / n;
        const double a = centered_moment_estimate(k, x, p, n);
        double magnitude = 0.0;
        const double b = oracle::g_direct(k, x, p, n, &magnitude);
        // Cancellation in the expansion limits agreement to its term size.
        CHECK(std::abs(a - b) <= 1e-12 * magnitude + 1e-300);
    }
}

TEST_CASE("g is unbiased at n = 20, p = 0.1, x = 0.05, k = 3") {
    const double n = 20;
    const double e = oracle::poisson_expectation(
        [&](long m) { return centered_moment_estimate(3, 0.05, static_cast<double>(m) / n, n); }, n * 0.1);
    CHECK(std::abs(e - 1.25e-4) < 1e-10);
}

TEST_CASE("property: unbiasedness grid") {
    int cases = 0;
    double worst = 0.0;
    for (double n : {10.0, 20.0, 50.0}) {
        for (double p : {0.02, 0.1, 0.3}) {
            for (double x : {0.0, p, p + 0.1}) {
                for (int k = 1; k <= 6; ++k) {
                    const double e = oracle::poisson_expectation(
                        [&](long m) { return centered_moment_estimate(k, x, static_cast<double>(m) / n, n); }, n * p);
                    worst = std::max(worst, std::abs(e - std::pow(p - x, k)));
                    ++cases;
                }
            }
        }
    }
    CHECK(cases == 162);
    CHECK(worst < 1e-9);
}

TEST_CASE("property: Charlier stability bound") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const int n = 1 + static_cast<int>(u(rng) * 400);
        const int m = static_cast<int>(u(rng) * (n + 1));
        const double p = static_cast<double>(m) / n;
        const int k = 1 + static_cast<int>(u(rng) * 10);
        const double x = u(rng);
        const double delta = std::max(std::abs(x - p), std::sqrt(4.0 * p * k / n)) * (1.0 + u(rng));
        const double g = centered_moment_estimate(k, x, p, n);
        if (std::abs(g) > std::pow(2.0 * delta, k) * (1.0 + 1e-9)) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("moment count") {
    CHECK(moment_count(1000, 0.45) == 3);
    CHECK(moment_count(1000, 0.35) == 2);
    CHECK(moment_count(3, 0.1) == 1);
}

TEST_CASE("moment targets") {
    const auto part = build_partition(1000, 2.0);
    const double n = 1000;
    SUBCASE("empty members") {
        const auto t = moment_targets(part, 2, {}, 0.45, 0.5);
        CHECK(t.members == 0);
        for (double v : t.targets) CHECK(v == 0.0);
        for (double v : t.tolerances) CHECK(v == 0.0);
    }
    SUBCASE("single member at the center") {
        const double xj = part.center(3);
        const std::vector<double> one{xj};
        const auto t = moment_targets(part, 3, one, 0.45, 0.5);
        CHECK(t.targets[0] == doctest::Approx(0.0).scale(1e-15));
        for (int k = 1; k <= t.order; ++k) CHECK(t.targets[k - 1] == centered_moment_estimate(k, xj, xj, n));
    }
    SUBCASE("two members, first moment") {
        const std::vector<double> two{0.03, 0.05};
        const auto t = moment_targets(part, 2, two, 0.45, 0.5);
        const double xj = part.center(2);
        CHECK(t.targets[0] == doctest::Approx((0.03 - xj) + (0.05 - xj)));
        CHECK(t.order == 3);
        CHECK(t.scale == doctest::Approx(0.5 * 2 * std::log(n) / n));
        CHECK(t.tolerances[0] == doctest::Approx(std::sqrt(2 * std::log(n)) * t.scale));
    }
    CHECK_THROWS_AS(moment_targets(part, 1, {}, 0.0, 0.5), ConfigError);
}

TEST_CASE("property: tolerance ratio equals the scale") {
    const auto part = build_partition(5000, 2.0);
    std::vector<double> members(37, 0.01);
    for (std::size_t j = 1; j <= part.count(); j += 3) {
        const auto t = moment_targets(part, j, members, 1.2, 0.7);
        REQUIRE(t.order >= 2);
        for (int k = 2; k <= t.order; ++k) {
            CHECK(t.tolerances[k - 1] / t.tolerances[k - 2] == doctest::Approx(t.scale).epsilon(1e-13));
        }
        CHECK(t.radius(2, 37.0) == t.tolerances[1]);
    }
}
