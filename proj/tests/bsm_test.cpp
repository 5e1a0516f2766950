#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qmc/bsm.hpp"
#include "qmc/errors.hpp"

using namespace qmc;
using boost::math::quadrature::gauss_kronrod;

namespace {

double density(double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi); }

// Risk-neutral expectation of the discounted payoff over the standard normal z.
double price_by_quadrature(const MarketParams& p) {
    const double vs = p.vol() * std::sqrt(p.maturity());
    const double drift = (p.rate() - 0.5 * p.vol() * p.vol()) * p.maturity();
    const double kink = (std::log(p.strike() / p.s0()) - drift) / vs;
    auto integrand = [&](double z) { return (p.s0() * std::exp(vs * z + drift) - p.strike()) * density(z); };
    const double hi = std::max(kink, 0.0) + 14.0;
    double total = 0.0;
    // Split so each panel stays smooth and well resolved.
    const double a = std::max(kink, -14.0);
    const int panels = 8;
    for (int i = 0; i < panels; ++i) {
        const double l = a + (hi - a) * i / panels, r = a + (hi - a) * (i + 1) / panels;
        total += gauss_kronrod<double, 61>::integrate(integrand, l, r, 15, 1e-15);
    }
    return p.discount() * total;
}

} // namespace

TEST(NormCdf, SymmetryAndCentre) {
    EXPECT_EQ(norm_cdf(0.0), 0.5);
    for (double x : {0.1, 0.7, 1.5, 3.2, 6.0, 9.0}) EXPECT_NEAR(norm_cdf(x) + norm_cdf(-x), 1.0, 1e-15);
}

TEST(NormCdf, MatchesDensityQuadrature) {
    for (double x : {-5.0, -2.5, -1.0, -0.3, 0.4, 1.0, 2.0, 4.5}) {
        const double lo = std::min(x, 0.0), hi = std::max(x, 0.0);
        double area = gauss_kronrod<double, 61>::integrate(density, lo, hi, 15, 1e-16);
        const double expected = x >= 0.0 ? 0.5 + area : 0.5 - area;
        EXPECT_NEAR(norm_cdf(x), expected, 1e-12) << "x = " << x;
    }
    EXPECT_NEAR(norm_cdf(1.0), 0.8413447, 5e-8);
}

TEST(NormCdf, Monotone) {
    double prev = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.01) {
        const double v = norm_cdf(x);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(NormCdf, RejectsNonFinite) {
    EXPECT_THROW(norm_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
    EXPECT_THROW(norm_cdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(MarketParams, ValidatesAtConstruction) {
    EXPECT_THROW(MarketParams(0.0, 100, 0.05, 0.2, 1), DomainError);
    EXPECT_THROW(MarketParams(100, -1, 0.05, 0.2, 1), DomainError);
    EXPECT_THROW(MarketParams(100, 100, 0.05, 0.0, 1), DomainError);
    EXPECT_THROW(MarketParams(100, 100, 0.05, 0.2, 0.0), DomainError);
    EXPECT_NO_THROW(MarketParams(100, 100, -0.01, 0.2, 1));
}

TEST(BsmCallPrice, ReferenceValue) {
    const auto q = bsm_call_price(MarketParams::atm_reference());
    EXPECT_NEAR(q.price, 10.4506, 1e-3);
    EXPECT_NEAR(q.price, price_by_quadrature(MarketParams::atm_reference()), 1e-9);
}

TEST(BsmCallPrice, QuadratureGrid) {
    for (double k : {60.0, 80.0, 100.0, 120.0, 140.0})
        for (double sig : {0.1, 0.2, 0.3, 0.4, 0.5})
            for (double t : {0.25, 1.0, 2.0}) {
                const MarketParams p(100.0, k, 0.05, sig, t);
                const double analytic = bsm_call_price(p).price;
                const double quad = price_by_quadrature(p);
                EXPECT_LE(std::abs(analytic - quad), 1e-8 * quad) << "K=" << k << " sigma=" << sig << " T=" << t;
            }
}

TEST(BsmCallPrice, NoArbitrageBounds) {
    for (double k : {50.0, 90.0, 100.0, 130.0})
        for (double sig : {0.05, 0.3, 0.8}) {
            const MarketParams p(100.0, k, 0.03, sig, 1.5);
            const double price = bsm_call_price(p).price;
            EXPECT_GE(price, std::max(0.0, p.s0() - k * p.discount()) - 1e-12);
            EXPECT_LE(price, p.s0());
        }
}

TEST(BsmCallPrice, DIdentity) {
    for (double sig : {0.1, 0.25, 0.6})
        for (double t : {0.1, 1.0, 3.0}) {
            const auto q = bsm_call_price(MarketParams(100, 95, 0.02, sig, t));
            EXPECT_NEAR(q.d1 - q.d2, sig * std::sqrt(t), 1e-14);
            EXPECT_NEAR(q.d3 - q.d1, sig * std::sqrt(t), 1e-14);
        }
}

TEST(BsmCallPrice, Limits) {
    EXPECT_NEAR(bsm_call_price(MarketParams(100, 1e-9, 0.05, 0.2, 1)).price, 100.0, 1e-8);
    const MarketParams flat(100, 90, 0.05, 1e-9, 1);
    EXPECT_NEAR(bsm_call_price(flat).price, 100.0 - 90.0 * flat.discount(), 1e-9);
}

TEST(BsmCallPrice, MonotoneInStrikeAndVol) {
    for (double sig : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        double prev = 1e300;
        for (double k = 40.0; k <= 200.0; k += 5.0) {
            const double v = bsm_call_price(MarketParams(100, k, 0.05, sig, 1)).price;
            EXPECT_LE(v, prev + 1e-12);
            prev = v;
        }
    }
    for (double k : {60.0, 100.0, 140.0}) {
        double prev = -1.0;
        for (double sig = 0.05; sig <= 1.0; sig += 0.05) {
            const double v = bsm_call_price(MarketParams(100, k, 0.05, sig, 1)).price;
            EXPECT_GE(v, prev - 1e-12);
            prev = v;
        }
    }
}

TEST(BsmCallVariance, NonNegativeAndLimits) {
    for (double k : {60.0, 80.0, 100.0, 120.0, 140.0})
        for (double sig : {0.1, 0.2, 0.3, 0.4, 0.5})
            for (double t : {0.25, 1.0, 2.0}) EXPECT_GE(bsm_call_variance(MarketParams(100, k, 0.05, sig, t)), 0.0);
    EXPECT_NEAR(bsm_call_variance(MarketParams(100, 90, 0.05, 1e-9, 1)), 0.0, 1e-6);
    const double far = 100.0 * std::exp(0.05 + 5.0 * 0.2) * 1.5;
    EXPECT_NEAR(bsm_call_variance(MarketParams(100, far, 0.05, 0.2, 1)), 0.0, 1e-8);
}

TEST(BsmCallVariance, MatchesQuadratureOfSecondMoment) {
    const MarketParams p = MarketParams::atm_reference();
    const double vs = p.vol() * std::sqrt(p.maturity());
    const double drift = (p.rate() - 0.5 * p.vol() * p.vol()) * p.maturity();
    const double kink = (std::log(p.strike() / p.s0()) - drift) / vs;
    auto payoff = [&](double z) { return p.s0() * std::exp(vs * z + drift) - p.strike(); };
    const double m1 = gauss_kronrod<double, 61>::integrate([&](double z) { return payoff(z) * density(z); }, kink, 15.0, 15, 1e-15);
    const double m2 = gauss_kronrod<double, 61>::integrate([&](double z) { return payoff(z) * payoff(z) * density(z); }, kink, 15.0, 15, 1e-15);
    EXPECT_NEAR(bsm_call_variance(p), m2 - m1 * m1, 1e-8 * (m2 - m1 * m1));
}

TEST(Gbm, TerminalClosedForm) {
    EXPECT_DOUBLE_EQ(gbm_terminal(5.0, 0.1, 0.3, 0.0, 0.0), 5.0);
    EXPECT_NEAR(gbm_terminal(5.0, 0.07, 0.0, 2.0, 123.0), 5.0 * std::exp(0.14), 1e-14);
    EXPECT_GT(gbm_terminal(1.0, 0.0, 2.0, 1.0, -30.0), 0.0);
}

TEST(Gbm, PathRejectsBadTimes) {
    Rng rng(1);
    const MarketParams p = MarketParams::atm_reference();
    const std::vector<double> unordered{0.5, 0.3};
    const std::vector<double> with_zero{0.0, 0.5};
    const std::vector<double> beyond{0.5, 1.5};
    EXPECT_THROW(gbm_path(p, unordered, Measure::risk_neutral, rng), DomainError);
    EXPECT_THROW(gbm_path(p, with_zero, Measure::risk_neutral, rng), DomainError);
    EXPECT_THROW(gbm_path(p, beyond, Measure::risk_neutral, rng), DomainError);
}

TEST(Gbm, NearZeroVolIsDeterministic) {
    Rng rng(3);
    const MarketParams p(2.0, 2.0, 0.04, 1e-12, 1.0, 0.1);
    const std::vector<double> times{0.25, 0.5, 1.0};
    const auto q = gbm_path(p, times, Measure::risk_neutral, rng);
    const auto ph = gbm_path(p, times, Measure::physical, rng);
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_NEAR(q[i], 2.0 * std::exp(0.04 * times[i]), 1e-10);
        EXPECT_NEAR(ph[i], 2.0 * std::exp(0.1 * times[i]), 1e-10);
    }
}

TEST(Gbm, DiscountedMartingale) {
    Rng rng(kDefaultSeed);
    const MarketParams p = MarketParams::atm_reference();
    const std::vector<double> times{p.maturity()};
    const int k = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < k; ++i) {
        const double v = p.discount() * gbm_path(p, times, Measure::risk_neutral, rng)[0];
        sum += v;
        sq += v * v;
    }
    const double mean = sum / k;
    const double se = std::sqrt((sq / k - mean * mean) / k);
    EXPECT_LE(std::abs(mean - p.s0()), 3.0 * se);
}

TEST(Gbm, PhysicalMeanPathFollowsDrift) {
    Rng rng(kDefaultSeed);
    const MarketParams p(3.0, 3.0, 0.0, 0.25, 1.0, 0.1);
    std::vector<double> times;
    for (int i = 1; i <= 10; ++i) times.push_back(0.1 * i);
    const int paths = 50000;
    std::vector<double> sum(times.size()), sq(times.size());
    for (int n = 0; n < paths; ++n) {
        const auto path = gbm_path(p, times, Measure::physical, rng);
        for (std::size_t i = 0; i < times.size(); ++i) {
            sum[i] += path[i];
            sq[i] += path[i] * path[i];
        }
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double mean = sum[i] / paths;
        const double se = std::sqrt((sq[i] / paths - mean * mean) / paths);
        EXPECT_LE(std::abs(mean - 3.0 * std::exp(0.1 * times[i])), 3.0 * se) << "t = " << times[i];
    }
}

TEST(CallPayoff, Examples) {
    EXPECT_EQ(call_payoff(50, 100), 0.0);
    EXPECT_EQ(call_payoff(100, 100), 0.0);
    EXPECT_EQ(call_payoff(150, 100), 50.0);
}
