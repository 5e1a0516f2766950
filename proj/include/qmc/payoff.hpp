#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "qmc/bsm.hpp"
#include "qmc/dist_prep.hpp"

namespace qmc {

/// Unsigned fixed point: value(code) = code * scale / 2^(bits-1).
struct FixedPointSpec {
    int bits;
    double scale;

    /// Lattice {c / (2^bits - 1)} covering [0, 1] with both endpoints representable.
    static FixedPointSpec unit_interval(int bits);

    double step() const;
    std::uint64_t max_code() const { return (std::uint64_t{1} << bits) - 1; }
    double value(std::uint64_t code) const;
};

/// Sign-magnitude register contents before the MAX(0, .) stage.
struct SignedCode {
    bool negative;
    std::uint64_t magnitude;
};

/// Nearest lattice point (ties to even), magnitude saturated at max_code().
SignedCode encode_nearest(double x, const FixedPointSpec& fp);

/// MAX(0, a): the sign bit controls whether the magnitude is copied to the output register.
std::uint64_t max_zero(SignedCode a);

using PayoffFn = std::function<double(double)>;

struct QuantizedPayoff {
    GridSpec grid;
    std::vector<double> values;
    std::vector<std::uint64_t> codes;
    double v_max;
    FixedPointSpec fp;
};

inline constexpr int kMaxPayoffBits = 52;

/// v_euro(x) = max(0, S0 exp(sigma x + (r - sigma^2/2) T) - K)
double euro_payoff(const MarketParams& p, double x);
PayoffFn euro_payoff_fn(const MarketParams& p);

/// Brownian coordinate at which the European payoff starts to be positive.
double euro_kink(const MarketParams& p);

/// Codes for raw payoff values v_j normalized by v_max.
QuantizedPayoff quantize_values(const GridSpec& grid, std::span<const double> raw, int bits, double v_max);

QuantizedPayoff quantize_payoff(const PayoffFn& fn, const GridSpec& grid, int bits, double v_max);

/// S_{t+dt} = prev * exp(sigma x + (r - sigma^2/2) dt)
double stock_step(double prev, double x, double dt, const MarketParams& p);

/// Same update on log prices.
double stock_step_log(double log_prev, double x, double dt, const MarketParams& p);

enum class AverageKind { arithmetic, geometric };

double path_average(std::span<const double> prices, AverageKind kind);

/// Running average: arithmetic keeps the mean price, geometric the mean log price.
struct AverageState {
    AverageKind kind;
    std::uint64_t count = 0;
    double accumulator = 0.0;

    double value() const;
};

/// Folds price number `step_index` (1-based, equal to count + 1) into the state.
AverageState sequential_average_update(const AverageState& running, double next_price, std::uint64_t step_index);

/// Inverse of sequential_average_update for the same price and step index.
AverageState sequential_average_downdate(const AverageState& updated, double price, std::uint64_t step_index);

void write_payoff_csv(std::ostream& out, const QuantizedPayoff& q, const PayoffFn& exact);

} // namespace qmc
