#include "qmc/classical_mc.hpp"

#include <cmath>
#include <random>

#include "qmc/errors.hpp"
#include "qmc/parallel.hpp"

namespace qmc {

McEstimate mc_price_european(const MarketParams& p, std::uint64_t k, Rng& rng) {
    if (k < 2) throw DomainError("mc_price_european: need at least two samples");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqrt_t = std::sqrt(p.maturity());

    // Welford
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < k; ++i) {
        const double s = gbm_terminal(p.s0(), p.rate(), p.vol(), p.maturity(), sqrt_t * normal(rng));
        const double v = call_payoff(s, p.strike());
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double disc = p.discount();
    const double var = m2 / static_cast<double>(k - 1);
    return {disc * mean, disc * std::sqrt(var / static_cast<double>(k)), k};
}

std::uint64_t chebyshev_samples(double lambda, double epsilon, double delta) {
    if (!(lambda > 0.0) || !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0))
        throw DomainError("chebyshev_samples: need lambda > 0, epsilon > 0, 0 < delta < 1");
    const double ratio = lambda * lambda / (epsilon * epsilon);
    auto satisfied = [&](double k) { return ratio / k <= delta; };
    double k = std::max(1.0, std::ceil(ratio / delta));
    while (k > 1.0 && satisfied(k - 1.0)) k -= 1.0;
    while (!satisfied(k)) k += 1.0;
    return static_cast<std::uint64_t>(k);
}

ScalingReport fit_power_law(std::span<const ErrorPoint> points) {
    if (points.size() < 3) throw DomainError("fit_power_law: need at least three points");
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& pt : points) {
        if (!(pt.k >= 1.0)) throw DomainError("fit_power_law: k must be >= 1");
        if (!(pt.error > 0.0)) throw DomainError("fit_power_law: error must be positive");
        sx += std::log(pt.k);
        sy += std::log(pt.error);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& pt : points) {
        const double dx = std::log(pt.k) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(pt.error) - my);
    }
    if (sxx == 0.0) throw DomainError("fit_power_law: all k identical");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    double rss = 0.0;
    for (const auto& pt : points) {
        const double r = std::log(pt.error) - (intercept + slope * std::log(pt.k));
        rss += r * r;
    }
    return {std::vector<ErrorPoint>(points.begin(), points.end()), std::exp(intercept), slope, std::sqrt(rss / n)};
}

std::vector<ErrorPoint> mc_error_sweep(const MarketParams& p, std::span<const std::uint64_t> ks, int trials,
                                       std::uint64_t seed) {
    if (trials < 1) throw DomainError("mc_error_sweep: trials must be >= 1");
    const double exact = bsm_call_price(p).price;
    const std::size_t nt = static_cast<std::size_t>(trials);
    std::vector<double> errors(ks.size() * nt);
    parallel_for(errors.size(), [&](std::size_t cell) {
        const std::size_t i = cell / nt, j = cell % nt;
        Rng rng = make_stream(seed, i, j);
        errors[cell] = std::abs(mc_price_european(p, ks[i], rng).mean - exact);
    });

    std::vector<ErrorPoint> out;
    out.reserve(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < nt; ++j) sum += errors[i * nt + j];
        out.push_back({static_cast<double>(ks[i]), sum / static_cast<double>(nt)});
    }
    return out;
}

std::vector<std::uint64_t> default_classical_ks() {
    std::vector<std::uint64_t> ks;
    for (int h = 4; h <= 12; ++h) ks.push_back(static_cast<std::uint64_t>(std::llround(std::pow(10.0, h / 2.0))));
    return ks;
}

} // namespace qmc
