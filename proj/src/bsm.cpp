#include "qmc/bsm.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qmc/errors.hpp"

namespace qmc {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw DomainError(std::string("MarketParams: ") + name + " must be positive and finite");
}

} // namespace

MarketParams::MarketParams(double s0, double strike, double rate, double vol, double maturity, double drift)
    : s0_(s0), strike_(strike), rate_(rate), vol_(vol), maturity_(maturity), drift_(drift) {
    require_positive(s0, "s0");
    require_positive(strike, "strike");
    require_positive(vol, "vol");
    require_positive(maturity, "maturity");
    if (!std::isfinite(rate) || !std::isfinite(drift))
        throw DomainError("MarketParams: rate and drift must be finite");
}

MarketParams MarketParams::atm_reference() { return {100.0, 100.0, 0.05, 0.2, 1.0, 0.05}; }

double MarketParams::discount() const { return std::exp(-rate_ * maturity_); }

MarketParams MarketParams::with_strike(double k) const { return {s0_, k, rate_, vol_, maturity_, drift_}; }
MarketParams MarketParams::with_vol(double v) const { return {s0_, strike_, rate_, v, maturity_, drift_}; }
MarketParams MarketParams::with_maturity(double t) const { return {s0_, strike_, rate_, vol_, t, drift_}; }

double norm_cdf(double x) {
    if (!std::isfinite(x)) throw DomainError("norm_cdf: argument must be finite");
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double bsm_call_variance(const MarketParams& p) {
    return bsm_call_price(p).variance;
}

AnalyticQuote bsm_call_price(const MarketParams& p) {
    const double s0 = p.s0(), k = p.strike(), r = p.rate(), sig = p.vol(), t = p.maturity();
    const double vsqrt = sig * std::sqrt(t);
    const double d2 = (std::log(s0 / k) + (r - 0.5 * sig * sig) * t) / vsqrt;
    const double d1 = d2 + vsqrt;
    const double d3 = d1 + vsqrt;

    const double n1 = norm_cdf(d1), n2 = norm_cdf(d2), n3 = norm_cdf(d3);
    const double growth = std::exp(r * t);

    AnalyticQuote q{};
    q.d1 = d1;
    q.d2 = d2;
    q.d3 = d3;
    q.price = n1 * s0 - n2 * k * std::exp(-r * t);

    const double second = std::exp((2.0 * r + sig * sig) * t) * s0 * s0 * n3 - 2.0 * k * growth * s0 * n1 + k * k * n2;
    const double first = s0 * growth * n1 - k * n2;
    q.variance = std::max(0.0, second - first * first);
    return q;
}

double gbm_terminal(double s0, double growth, double vol, double t, double w) {
    return s0 * std::exp(vol * w + (growth - 0.5 * vol * vol) * t);
}

std::vector<double> gbm_path(const MarketParams& p, std::span<const double> times, Measure measure, Rng& rng) {
    if (times.empty()) throw DomainError("gbm_path: no time points");
    double prev_t = 0.0;
    for (double t : times) {
        if (!(t > prev_t)) throw DomainError("gbm_path: times must be strictly increasing and positive");
        prev_t = t;
    }
    if (prev_t > p.maturity() * (1.0 + 1e-12)) throw DomainError("gbm_path: time beyond maturity");

    const double growth = measure == Measure::risk_neutral ? p.rate() : p.drift();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> path;
    path.reserve(times.size());
    double s = p.s0();
    prev_t = 0.0;
    for (double t : times) {
        const double dt = t - prev_t;
        s = gbm_terminal(s, growth, p.vol(), dt, std::sqrt(dt) * normal(rng));
        path.push_back(s);
        prev_t = t;
    }
    return path;
}

} // namespace qmc
