#include "qmc/payoff.hpp"

#include <cmath>
#include <ostream>

#include "qmc/errors.hpp"

namespace qmc {

FixedPointSpec FixedPointSpec::unit_interval(int bits) {
    if (bits < 1 || bits > kMaxPayoffBits) throw DomainError("FixedPointSpec: bits must be in [1, 52]");
    const double top = std::ldexp(1.0, bits) - 1.0;
    return {bits, std::ldexp(1.0, bits - 1) / top};
}

double FixedPointSpec::step() const { return scale / std::ldexp(1.0, bits - 1); }

double FixedPointSpec::value(std::uint64_t code) const {
    if (code == max_code() && scale == unit_interval(bits).scale) return 1.0;
    return static_cast<double>(code) * step();
}

SignedCode encode_nearest(double x, const FixedPointSpec& fp) {
    if (!std::isfinite(x)) throw DomainError("encode_nearest: non-finite value");
    const double scaled = std::nearbyint(std::abs(x) / fp.step());
    const double top = static_cast<double>(fp.max_code());
    const std::uint64_t mag = scaled >= top ? fp.max_code() : static_cast<std::uint64_t>(scaled);
    return {x < 0.0 && mag != 0, mag};
}

std::uint64_t max_zero(SignedCode a) { return a.negative ? 0 : a.magnitude; }

double euro_payoff(const MarketParams& p, double x) {
    const double s = p.s0() * std::exp(p.vol() * x + (p.rate() - 0.5 * p.vol() * p.vol()) * p.maturity());
    return call_payoff(s, p.strike());
}

PayoffFn euro_payoff_fn(const MarketParams& p) {
    return [p](double x) { return euro_payoff(p, x); };
}

double euro_kink(const MarketParams& p) {
    return (std::log(p.strike() / p.s0()) - (p.rate() - 0.5 * p.vol() * p.vol()) * p.maturity()) / p.vol();
}

QuantizedPayoff quantize_values(const GridSpec& grid, std::span<const double> raw, int bits, double v_max) {
    if (!(v_max > 0.0) || !std::isfinite(v_max)) throw DomainError("quantize_payoff: v_max must be positive");
    const FixedPointSpec fp = FixedPointSpec::unit_interval(bits);
    QuantizedPayoff q{grid, std::vector<double>(raw.size()), std::vector<std::uint64_t>(raw.size()), v_max, fp};
    for (std::size_t j = 0; j < raw.size(); ++j) {
        q.codes[j] = max_zero(encode_nearest(raw[j] / v_max, fp));
        q.values[j] = fp.value(q.codes[j]);
    }
    return q;
}

QuantizedPayoff quantize_payoff(const PayoffFn& fn, const GridSpec& grid, int bits, double v_max) {
    std::vector<double> raw(grid.size());
    for (std::size_t j = 0; j < raw.size(); ++j) raw[j] = fn(grid.point(j));
    return quantize_values(grid, raw, bits, v_max);
}

double stock_step(double prev, double x, double dt, const MarketParams& p) {
    if (!(prev > 0.0)) throw DomainError("stock_step: price must be positive");
    return prev * std::exp(p.vol() * x + (p.rate() - 0.5 * p.vol() * p.vol()) * dt);
}

double stock_step_log(double log_prev, double x, double dt, const MarketParams& p) {
    return log_prev + p.vol() * x + (p.rate() - 0.5 * p.vol() * p.vol()) * dt;
}

double path_average(std::span<const double> prices, AverageKind kind) {
    if (prices.empty()) throw DomainError("path_average: empty path");
    double acc = 0.0;
    for (double s : prices) {
        if (!(s > 0.0)) throw DomainError("path_average: prices must be positive");
        acc += kind == AverageKind::arithmetic ? s : std::log(s);
    }
    acc /= static_cast<double>(prices.size());
    return kind == AverageKind::arithmetic ? acc : std::exp(acc);
}

double AverageState::value() const {
    if (count == 0) throw DomainError("AverageState: no prices folded in");
    return kind == AverageKind::arithmetic ? accumulator : std::exp(accumulator);
}

AverageState sequential_average_update(const AverageState& running, double next_price, std::uint64_t step_index) {
    if (step_index < 1 || step_index != running.count + 1)
        throw DomainError("sequential_average_update: step index out of sequence");
    if (!(next_price > 0.0)) throw DomainError("sequential_average_update: price must be positive");
    const double term = running.kind == AverageKind::arithmetic ? next_price : std::log(next_price);
    const double l = static_cast<double>(step_index);
    return {running.kind, step_index, running.accumulator + (term - running.accumulator) / l};
}

AverageState sequential_average_downdate(const AverageState& updated, double price, std::uint64_t step_index) {
    if (step_index < 1 || step_index != updated.count)
        throw DomainError("sequential_average_downdate: step index out of sequence");
    if (step_index == 1) return {updated.kind, 0, 0.0};
    const double term = updated.kind == AverageKind::arithmetic ? price : std::log(price);
    const double l = static_cast<double>(step_index);
    return {updated.kind, step_index - 1, (l * updated.accumulator - term) / (l - 1.0)};
}

void write_payoff_csv(std::ostream& out, const QuantizedPayoff& q, const PayoffFn& exact) {
    out << "j,x_j,v_exact,v_quantized\n";
    out.precision(17);
    for (std::size_t j = 0; j < q.values.size(); ++j) {
        const double x = q.grid.point(j);
        out << j << ',' << x << ',' << exact(x) << ',' << q.v_max * q.values[j] << '\n';
    }
}

} // namespace qmc
