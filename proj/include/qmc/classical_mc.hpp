#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmc/bsm.hpp"
#include "qmc/rng.hpp"

namespace qmc {

struct McEstimate {
    double mean;
    double std_error;
    std::uint64_t samples;
};

struct ErrorPoint {
    double k;
    double error;
};

/// Error = a * k^zeta fitted by unweighted least squares in log-log space.
struct ScalingReport {
    std::vector<ErrorPoint> points;
    double amplitude;
    double exponent;
    double residual;
};

/// Discounted plain Monte Carlo estimate of the call price from k terminal samples.
McEstimate mc_price_european(const MarketParams& p, std::uint64_t k, Rng& rng);

/// Smallest k with lambda^2 / (k * epsilon^2) <= delta.
std::uint64_t chebyshev_samples(double lambda, double epsilon, double delta);

ScalingReport fit_power_law(std::span<const ErrorPoint> points);

/// Mean |estimate - analytic price| over `trials` runs for every k.
/// Trial (i, j) draws from make_stream(seed, i, j).
std::vector<ErrorPoint> mc_error_sweep(const MarketParams& p, std::span<const std::uint64_t> ks, int trials,
                                       std::uint64_t seed);

/// Half-decade grid 10^2, 10^2.5, ..., 10^6 rounded to integers.
std::vector<std::uint64_t> default_classical_ks();

} // namespace qmc
