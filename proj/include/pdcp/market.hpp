#pragma once

#include <algorithm>
#include <stdexcept>

namespace pdcp {

/// Black-Scholes parameters for the one-asset American put.
/// Rates and volatilities are annualized; s_max truncates the asset domain.
struct MarketParams1D {
    double sigma = 0.0;   // volatility
    double r = 0.0;       // risk-free rate
    double maturity = 0.0;
    double strike = 0.0;
    double s_max = 0.0;

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("MarketParams1D: sigma must be > 0");
        if (!(r > 0.0)) throw std::invalid_argument("MarketParams1D: r must be > 0");
        if (!(maturity > 0.0)) throw std::invalid_argument("MarketParams1D: maturity must be > 0");
        if (!(strike > 0.0)) throw std::invalid_argument("MarketParams1D: strike must be > 0");
        if (!(s_max > 2.0 * strike))
            throw std::invalid_argument("MarketParams1D: s_max must exceed 2*strike");
    }
};

/// Two-asset Black-Scholes parameters for the put-on-the-average option.
struct MarketParams2D {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double rho = 0.0;     // asset-price correlation
    double r = 0.0;
    double maturity = 0.0;
    double strike = 0.0;
    double s_max = 0.0;   // same truncation in both directions

    void validate() const {
        if (!(sigma1 > 0.0)) throw std::invalid_argument("MarketParams2D: sigma1 must be > 0");
        if (!(sigma2 > 0.0)) throw std::invalid_argument("MarketParams2D: sigma2 must be > 0");
        if (!(rho >= -1.0 && rho <= 1.0))
            throw std::invalid_argument("MarketParams2D: rho must lie in [-1, 1]");
        if (!(r > 0.0)) throw std::invalid_argument("MarketParams2D: r must be > 0");
        if (!(maturity > 0.0)) throw std::invalid_argument("MarketParams2D: maturity must be > 0");
        if (!(strike > 0.0)) throw std::invalid_argument("MarketParams2D: strike must be > 0");
        if (!(s_max > 2.0 * strike))
            throw std::invalid_argument("MarketParams2D: s_max must exceed 2*strike");
    }
};

/// max(K - s, 0)
inline double payoff_put_1d(double s, double strike) {
    return std::max(strike - s, 0.0);
}

/// max(0, K - (s1 + s2)/2)
inline double payoff_put_on_average(double s1, double s2, double strike) {
    return std::max(0.0, strike - 0.5 * (s1 + s2));
}

}  // namespace pdcp
