#pragma once

#include <span>
#include <vector>

#include "qmc/rng.hpp"

namespace qmc {

enum class Measure { physical, risk_neutral };

/// Black-Scholes-Merton market: spot, strike, short rate, volatility, maturity,
/// plus the real-world drift used only for illustrative paths.
class MarketParams {
public:
    MarketParams(double s0, double strike, double rate, double vol, double maturity, double drift = 0.0);

    /// At-the-money reference market: S0 = K = 100, r = 0.05, sigma = 0.2, T = 1.
    static MarketParams atm_reference();

    double s0() const { return s0_; }
    double strike() const { return strike_; }
    double rate() const { return rate_; }
    double vol() const { return vol_; }
    double maturity() const { return maturity_; }
    double drift() const { return drift_; }

    double discount() const;

    MarketParams with_strike(double k) const;
    MarketParams with_vol(double v) const;
    MarketParams with_maturity(double t) const;

private:
    double s0_, strike_, rate_, vol_, maturity_, drift_;
};

struct AnalyticQuote {
    double price;
    double d1;
    double d2;
    double d3;
    double variance;
};

/// Standard normal CDF, 0.5 * erfc(-x / sqrt 2).
double norm_cdf(double x);

/// Closed-form call price with d1, d2, d3 and the payoff variance.
AnalyticQuote bsm_call_price(const MarketParams& p);

/// Variance of max(0, S_T - K) under the risk-neutral measure (undiscounted).
double bsm_call_variance(const MarketParams& p);

/// s0 * exp(vol * w + (growth - vol^2 / 2) * t)
double gbm_terminal(double s0, double growth, double vol, double t, double w);

/// Samples prices at the given increasing times in (0, maturity].
std::vector<double> gbm_path(const MarketParams& p, std::span<const double> times, Measure measure, Rng& rng);

inline double call_payoff(double s, double k) { return s > k ? s - k : 0.0; }

} // namespace qmc
