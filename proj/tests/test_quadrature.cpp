#include "rsmimo/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace rsmimo;

TEST_CASE("gauss-hermite weights integrate exp(-x^2)") {
    for (int n : {1, 2, 5, 16, 64, 128, 256}) {
        const auto rule = compute_gauss_hermite(n);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
        CHECK(total == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    }
}

TEST_CASE("gauss-hermite nodes are symmetric and sorted") {
    const auto rule = compute_gauss_hermite(33);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[rule.nodes.size() - 1 - i]).epsilon(1e-13));
        CHECK(rule.weights[i] > 0.0);
        if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    }
}

TEST_CASE("two-point rule matches its closed form") {
    const auto rule = compute_gauss_hermite(2);
    CHECK(std::abs(rule.nodes[1]) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(rule.weights[0] == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-14));
}

TEST_CASE("standard normal moments are exact up to the rule degree") {
    // E Z^(2m) = (2m - 1)!!
    double double_factorial = 1.0;
    for (int m = 1; m <= 10; ++m) {
        double_factorial *= 2.0 * m - 1.0;
        const double even = expect_standard_normal([m](double z) { return std::pow(z, 2 * m); }, 32);
        const double odd = expect_standard_normal([m](double z) { return std::pow(z, 2 * m - 1); }, 32);
        CHECK(even == doctest::Approx(double_factorial).epsilon(1e-12));
        CHECK(std::abs(odd) < 1e-9 * double_factorial);
    }
}

TEST_CASE("smooth expectations converge") {
    // E cos(Z) = exp(-1/2)
    const double v = expect_standard_normal([](double z) { return std::cos(z); }, 64);
    CHECK(v == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("cached rule equals the computed rule and rejects bad sizes") {
    const auto& cached = gauss_hermite(40);
    const auto fresh = compute_gauss_hermite(40);
    CHECK(cached.nodes == fresh.nodes);
    CHECK(&gauss_hermite(40) == &cached);
    CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
}
