#include <doctest.h>

#include <cmath>
#include <random>

#include "pdcp/market.hpp"

using namespace pdcp;

TEST_CASE("1d put payoff values") {
    CHECK(payoff_put_1d(80.0, 100.0) == doctest::Approx(20.0));
    CHECK(payoff_put_1d(100.0, 100.0) == 0.0);
    CHECK(payoff_put_1d(120.0, 100.0) == 0.0);
    CHECK(payoff_put_1d(0.0, 100.0) == doctest::Approx(100.0));
}

TEST_CASE("put on average payoff values") {
    CHECK(payoff_put_on_average(90.0, 100.0, 100.0) == doctest::Approx(5.0));
    CHECK(payoff_put_on_average(100.0, 100.0, 100.0) == 0.0);
    CHECK(payoff_put_on_average(150.0, 120.0, 100.0) == 0.0);
    CHECK(payoff_put_on_average(0.0, 0.0, 100.0) == doctest::Approx(100.0));
    // symmetric in the two assets
    CHECK(payoff_put_on_average(80.0, 110.0, 100.0) == payoff_put_on_average(110.0, 80.0, 100.0));
}

TEST_CASE("payoff properties") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> spot(0.0, 500.0);
    double strike = 100.0;
    for (int trial = 0; trial < 200; ++trial) {
        double a = spot(rng), b = spot(rng);
        double pa = payoff_put_1d(a, strike);
        CHECK(pa >= 0.0);
        CHECK(pa <= strike);
        if (a >= strike) CHECK(pa == 0.0);
        // 1-Lipschitz in the spot
        CHECK(std::abs(pa - payoff_put_1d(b, strike)) <= std::abs(a - b) + 1e-12);

        double q = payoff_put_on_average(a, b, strike);
        CHECK(q >= 0.0);
        CHECK(q <= strike);
        if (0.5 * (a + b) >= strike) CHECK(q == 0.0);
    }
}

TEST_CASE("market parameter validation") {
    MarketParams1D good{0.4, 0.02, 0.5, 100.0, 500.0};
    CHECK_NOTHROW(good.validate());

    MarketParams1D bad = good;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.r = -0.01;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.s_max = 200.0;  // not strictly above 2K
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    MarketParams2D good2{0.3, 0.4, 0.5, 0.01, 0.5, 100.0, 500.0};
    CHECK_NOTHROW(good2.validate());
    MarketParams2D bad2 = good2;
    bad2.rho = 1.5;
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
    bad2 = good2;
    bad2.maturity = 0.0;
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}
