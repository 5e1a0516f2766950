#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "qmc/errors.hpp"
#include "qmc/payoff.hpp"
#include "qmc/rng.hpp"

using namespace qmc;

TEST(FixedPoint, UnitLattice) {
    const auto fp = FixedPointSpec::unit_interval(4);
    EXPECT_EQ(fp.max_code(), 15u);
    EXPECT_DOUBLE_EQ(fp.step(), 1.0 / 15.0);
    EXPECT_EQ(fp.value(0), 0.0);
    EXPECT_EQ(fp.value(15), 1.0);
    EXPECT_THROW(FixedPointSpec::unit_interval(0), DomainError);
    EXPECT_THROW(FixedPointSpec::unit_interval(53), DomainError);
}

TEST(FixedPoint, NearestTiesToEven) {
    const auto fp = FixedPointSpec::unit_interval(3); // step 1/7
    EXPECT_EQ(encode_nearest(2.5 / 7.0, fp).magnitude, 2u);
    EXPECT_EQ(encode_nearest(3.5 / 7.0, fp).magnitude, 4u);
    EXPECT_EQ(encode_nearest(0.3 / 7.0, fp).magnitude, 0u);
    EXPECT_EQ(encode_nearest(5.0, fp).magnitude, 7u);
}

TEST(FixedPoint, MaxZeroUsesSignBit) {
    const auto fp = FixedPointSpec::unit_interval(8);
    const auto neg = encode_nearest(-0.4, fp);
    EXPECT_TRUE(neg.negative);
    EXPECT_EQ(max_zero(neg), 0u);
    EXPECT_EQ(max_zero(encode_nearest(0.4, fp)), encode_nearest(0.4, fp).magnitude);
    EXPECT_FALSE(encode_nearest(-1e-9, fp).negative);
}

TEST(EuroPayoff, Examples) {
    const MarketParams p = MarketParams::atm_reference();
    EXPECT_EQ(euro_payoff(p, -50.0), 0.0);
    EXPECT_NEAR(euro_payoff(p, euro_kink(p)), 0.0, 1e-12);
    EXPECT_NEAR(euro_payoff(p, 1.0), 100.0 * std::exp(0.23) - 100.0, 1e-12);
    EXPECT_NEAR(euro_payoff(p, 1.0), 25.86, 5e-3);
    double prev = 0.0;
    for (double x = -4.0; x <= 4.0; x += 0.01) {
        const double v = euro_payoff(p, x);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Quantize, ConstantPayoffs) {
    const GridSpec g = GridSpec::symmetric(4, 4.0);
    const auto ones = quantize_payoff([](double) { return 7.0; }, g, 10, 7.0);
    const auto zeros = quantize_payoff([](double) { return 0.0; }, g, 10, 7.0);
    for (double v : ones.values) EXPECT_EQ(v, 1.0);
    for (double v : zeros.values) EXPECT_EQ(v, 0.0);
}

TEST(Quantize, ErrorBoundExhaustive) {
    const MarketParams p = MarketParams::atm_reference();
    for (int n = 1; n <= 12; ++n)
        for (int bits : {1, 4, 8, 16, 30}) {
            const GridSpec g = GridSpec::symmetric(n, 4.0);
            const double v_max = 0.7 * euro_payoff(p, g.x_max); // forces clipping at the top
            const auto q = quantize_payoff(euro_payoff_fn(p), g, bits, v_max);
            double prev = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double clamped = std::clamp(euro_payoff(p, g.point(j)), 0.0, v_max);
                EXPECT_LE(std::abs(v_max * q.values[j] - clamped), v_max * std::ldexp(1.0, -bits) * (1.0 + 1e-12));
                EXPECT_GE(q.values[j], 0.0);
                EXPECT_LE(q.values[j], 1.0);
                EXPECT_GE(q.values[j], prev);
                prev = q.values[j];
                EXPECT_EQ(q.values[j], q.fp.value(q.codes[j]));
            }
        }
}

TEST(Quantize, NegativeValuesClampToZero) {
    const GridSpec g = GridSpec::symmetric(3, 1.0);
    const auto q = quantize_payoff([](double x) { return x; }, g, 8, 1.0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(q.codes[j], 0u);
    EXPECT_EQ(q.values[7], 1.0);
}

TEST(Quantize, RejectsBadCap) {
    const GridSpec g = GridSpec::symmetric(3, 1.0);
    EXPECT_THROW(quantize_payoff([](double) { return 1.0; }, g, 8, 0.0), DomainError);
}

TEST(StockStep, Properties) {
    const MarketParams p(100, 100, 0.05, 1e-12, 1.0);
    EXPECT_NEAR(stock_step(50.0, 0.0, 0.5, p), 50.0 * std::exp(0.025), 1e-12);

    const MarketParams q = MarketParams::atm_reference();
    const std::vector<double> xs{0.3, -0.1, 0.25, -0.4};
    const double dt = 0.25;
    double s = q.s0(), logs = std::log(q.s0()), w = 0.0;
    for (double x : xs) {
        s = stock_step(s, x, dt, q);
        logs = stock_step_log(logs, x, dt, q);
        w += x;
    }
    EXPECT_NEAR(s, gbm_terminal(q.s0(), q.rate(), q.vol(), 1.0, w), 1e-12 * s);
    EXPECT_NEAR(std::exp(logs), s, 1e-12 * s);
    EXPECT_THROW(stock_step(0.0, 0.1, 0.1, q), DomainError);
}

TEST(PathAverage, Examples) {
    const std::vector<double> flat(5, 3.3);
    EXPECT_NEAR(path_average(flat, AverageKind::arithmetic), 3.3, 1e-15);
    EXPECT_NEAR(path_average(flat, AverageKind::geometric), 3.3, 1e-14);
    const std::vector<double> two{1.0, 4.0};
    EXPECT_DOUBLE_EQ(path_average(two, AverageKind::arithmetic), 2.5);
    EXPECT_NEAR(path_average(two, AverageKind::geometric), 2.0, 1e-15);
    EXPECT_THROW(path_average(std::vector<double>{}, AverageKind::arithmetic), DomainError);
}

TEST(PathAverage, AmGm) {
    Rng rng(kDefaultSeed);
    std::lognormal_distribution<double> ln(0.0, 0.5);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> path(1 + t % 9);
        for (auto& s : path) s = ln(rng);
        EXPECT_LE(path_average(path, AverageKind::geometric), path_average(path, AverageKind::arithmetic) * (1 + 1e-14));
    }
}

TEST(SequentialAverage, MatchesBatchAndInverts) {
    Rng rng(3);
    std::lognormal_distribution<double> ln(4.6, 0.2);
    for (AverageKind kind : {AverageKind::arithmetic, AverageKind::geometric}) {
        std::vector<double> path(5);
        for (auto& s : path) s = ln(rng);
        std::vector<AverageState> history{AverageState{kind}};
        for (std::size_t l = 0; l < path.size(); ++l)
            history.push_back(sequential_average_update(history.back(), path[l], l + 1));
        EXPECT_NEAR(history[1].value(), path[0], 1e-12 * path[0]);
        const double batch = path_average(path, kind);
        EXPECT_NEAR(history.back().value(), batch, 1e-12 * batch);
        for (std::size_t l = path.size(); l >= 1; --l) {
            const auto back = sequential_average_downdate(history[l], path[l - 1], l);
            EXPECT_EQ(back.count, history[l - 1].count);
            EXPECT_NEAR(back.accumulator, history[l - 1].accumulator, 1e-12 * std::max(1.0, std::abs(history[l - 1].accumulator)));
        }
    }
    AverageState s{AverageKind::arithmetic};
    EXPECT_THROW(sequential_average_update(s, 1.0, 2), DomainError);
    EXPECT_THROW(s.value(), DomainError);
}

TEST(PayoffCsv, Columns) {
    const MarketParams p = MarketParams::atm_reference();
    const GridSpec g = GridSpec::symmetric(2, 4.0);
    const auto q = quantize_payoff(euro_payoff_fn(p), g, 8, euro_payoff(p, 4.0));
    std::ostringstream out;
    write_payoff_csv(out, q, euro_payoff_fn(p));
    const std::string s = out.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "j,x_j,v_exact,v_quantized");
}
