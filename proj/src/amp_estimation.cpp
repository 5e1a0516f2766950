#include "qmc/amp_estimation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "qmc/errors.hpp"

namespace qmc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_bits(int m) {
    if (m < 1 || m > 62) throw DomainError("phase register needs between 1 and 62 bits");
}

} // namespace

std::uint64_t next_pow2(std::uint64_t v) { return v <= 1 ? 1 : std::bit_ceil(v); }

int ceil_log2(std::uint64_t v) { return v <= 1 ? 0 : std::bit_width(v - 1); }

double PhaseEstimate::mu_hat() const { return theta_to_mu(theta_hat); }

void QaeConfig::validate() const {
    if (phase_bits < 1 || phase_bits > 62) throw DomainError("QaeConfig: phase_bits must be in [1, 62]");
    if (repetitions < 1) throw DomainError("QaeConfig: repetitions must be >= 1");
    if (shots_per_bit < 1) throw DomainError("QaeConfig: shots_per_bit must be >= 1");
    if (max_qubits < 2) throw DomainError("QaeConfig: max_qubits must be >= 2");
}

GroverOperator::GroverOperator(const QuantumState& chi, GroverIterate kind)
    : chi_(chi.amps().begin(), chi.amps().end()), kind_(kind) {}

void GroverOperator::apply(std::span<Amplitude> psi) {
    if (kind_ == GroverIterate::full) {
        apply_Q(psi, chi_);
        u_uses_ += 2;
        v_uses_ += 2;
    } else {
        apply_V(psi);
        apply_U(psi, chi_);
        for (auto& a : psi) a = -a;
        u_uses_ += 1;
        v_uses_ += 1;
    }
}

double QpeTable::folded_phase(std::size_t x) const {
    const std::size_t m = probs.size();
    const std::size_t f = std::min(x, m - x);
    return kTwoPi * static_cast<double>(f) / static_cast<double>(m);
}

double QpeTable::theta_of(std::size_t x) const {
    const double phase = folded_phase(x);
    return iterate == GroverIterate::half ? 2.0 * phase : phase;
}

std::size_t QpeTable::sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, cumulative.back());
    const double u = unif(rng);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

QuantumState qpe_register_state(const QuantumState& chi, GroverIterate iterate, int m, int max_qubits, bool gate_level,
                                 std::uint64_t* u_uses, std::uint64_t* v_uses) {
    check_bits(m);
    const RegisterLayout sys = chi.layout();
    if (sys.phase_qubits != 0) throw DomainError("qpe: chi already carries a phase register");
    RegisterLayout lay = sys;
    lay.phase_qubits = m;
    check_qubit_budget(lay.total_qubits(), max_qubits);

    const std::size_t dim = sys.dimension();
    const std::size_t blocks = std::size_t{1} << m;
    const int sysq = sys.total_qubits();
    std::vector<Amplitude> amps(lay.dimension());
    GroverOperator op(chi, iterate);

    if (!gate_level) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(blocks));
        std::vector<Amplitude> cur(chi.amps().begin(), chi.amps().end());
        for (std::size_t y = 0; y < blocks; ++y) {
            if (y > 0) op.apply(cur);
            std::transform(cur.begin(), cur.end(), amps.begin() + static_cast<std::ptrdiff_t>(y * dim),
                           [scale](const Amplitude& a) { return a * scale; });
        }
        if (u_uses) *u_uses = op.u_uses();
        if (v_uses) *v_uses = op.v_uses();
    } else {
        std::copy(chi.amps().begin(), chi.amps().end(), amps.begin());
        std::span<Amplitude> all(amps);
        for (int j = 0; j < m; ++j) apply_hadamard(all, sysq + j);
        std::uint64_t controlled_powers = 0;
        for (int j = 0; j < m; ++j) {
            const std::uint64_t power = std::uint64_t{1} << j;
            for (std::size_t y = 0; y < blocks; ++y) {
                if (!(y & power)) continue;
                std::span<Amplitude> block = all.subspan(y * dim, dim);
                for (std::uint64_t r = 0; r < power; ++r) op.apply(block);
            }
            controlled_powers += power;
        }
        const std::uint64_t per = iterate == GroverIterate::full ? 2 : 1;
        if (u_uses) *u_uses = per * controlled_powers;
        if (v_uses) *v_uses = per * controlled_powers;
    }

    inverse_qft(amps, sysq, m);
    return QuantumState(lay, std::move(amps));
}

QpeTable qpe_distribution(const QuantumState& chi, GroverIterate iterate, int m, int max_qubits) {
    QpeTable t;
    t.bits = m;
    t.iterate = iterate;
    const QuantumState reg = qpe_register_state(chi, iterate, m, max_qubits, false, &t.u_uses, &t.v_uses);

    const std::size_t dim = chi.layout().dimension();
    const auto a = reg.amps();
    t.probs.assign(std::size_t{1} << m, 0.0);
    for (std::size_t x = 0; x < t.probs.size(); ++x) {
        double p = 0.0;
        for (std::size_t i = 0; i < dim; ++i) p += std::norm(a[x * dim + i]);
        t.probs[x] = p;
    }
    t.cumulative.resize(t.probs.size());
    std::partial_sum(t.probs.begin(), t.probs.end(), t.cumulative.begin());
    return t;
}

double bracket_mass(const QpeTable& table, double phase) {
    const std::size_t m = table.size();
    double folded = std::fmod(phase, kTwoPi);
    if (folded < 0.0) folded += kTwoPi;
    folded = std::min(folded, kTwoPi - folded);
    const double pos = folded * static_cast<double>(m) / kTwoPi;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));

    std::vector<std::size_t> outcomes{lo % m, hi % m, (m - lo) % m, (m - hi) % m};
    std::sort(outcomes.begin(), outcomes.end());
    outcomes.erase(std::unique(outcomes.begin(), outcomes.end()), outcomes.end());
    double mass = 0.0;
    for (auto x : outcomes) mass += table.probs[x];
    return mass;
}

double single_qubit_p0(double theta, std::uint64_t power, double correction) {
    // |+>, then U_z^power = diag(e^{-i p theta / 2}, e^{i p theta / 2}), then the correction on |1>.
    const double ph = std::fmod(static_cast<double>(power) * theta, 2.0 * kTwoPi);
    const double h = (0.5 * std::numbers::sqrt2);
    const Amplitude a0 = h * std::polar(1.0, -0.5 * ph);
    const Amplitude a1 = h * std::polar(1.0, 0.5 * ph) * std::polar(1.0, -correction);
    const Amplitude out0 = h * (a0 + a1);
    return std::clamp(std::norm(out0), 0.0, 1.0);
}

PhaseEstimate single_qubit_pe(double theta, int m, int shots_per_bit, Rng& rng) {
    check_bits(m);
    if (shots_per_bit < 1) throw DomainError("single_qubit_pe: shots_per_bit must be >= 1");
    std::vector<int> bit(static_cast<std::size_t>(m) + 2, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uint64_t applications = 0;

    for (int k = m; k >= 1; --k) {
        const std::uint64_t power = std::uint64_t{1} << (k - 1);
        double correction = 0.0;
        for (int i = k + 1; i <= m; ++i)
            if (bit[static_cast<std::size_t>(i)]) correction += kPi * std::ldexp(1.0, k - i);
        const double p0 = single_qubit_p0(theta, power, correction);

        int ones = 0;
        for (int s = 0; s < shots_per_bit; ++s) {
            if (unif(rng) >= p0) ++ones;
            applications += power;
        }
        const int zeros = shots_per_bit - ones;
        int b = ones > zeros ? 1 : 0;
        if (ones == zeros) b = unif(rng) < 0.5 ? 0 : 1;
        bit[static_cast<std::size_t>(k)] = b;
    }

    double frac = 0.0;
    for (int i = 1; i <= m; ++i)
        if (bit[static_cast<std::size_t>(i)]) frac += std::ldexp(1.0, -i);

    PhaseEstimate est;
    est.theta_hat = kTwoPi * frac;
    est.bits = m;
    est.repetitions = 1;
    est.unitary_applications = applications;
    est.bound_applications = std::ldexp(1.0, m) - 1.0;
    return est;
}

PhaseEstimate median_boost(std::span<const PhaseEstimate> estimates) {
    if (estimates.empty()) throw DomainError("median_boost: no estimates");
    std::vector<double> thetas;
    thetas.reserve(estimates.size());
    PhaseEstimate out;
    out.bits = estimates.front().bits;
    out.bound_applications = estimates.front().bound_applications;
    out.repetitions = 0;
    for (const auto& e : estimates) {
        if (e.bits != out.bits) throw DomainError("median_boost: estimates use different register sizes");
        thetas.push_back(e.theta_hat);
        out.repetitions += e.repetitions;
        out.unitary_applications += e.unitary_applications;
    }
    const std::size_t mid = (thetas.size() - 1) / 2;
    std::nth_element(thetas.begin(), thetas.begin() + static_cast<std::ptrdiff_t>(mid), thetas.end());
    out.theta_hat = thetas[mid];
    return out;
}

double median_failure_bound(double delta, int d) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("median_failure_bound: delta must lie in [0, 1]");
    if (d < 1) throw DomainError("median_failure_bound: D must be >= 1");
    return 0.5 * std::pow(2.0 * std::sqrt(delta * (1.0 - delta)), d);
}

int repetitions_for_confidence(double delta, double confidence) {
    if (!(delta >= 0.0 && delta < 0.5)) throw DomainError("repetitions_for_confidence: delta must lie in [0, 1/2)");
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("repetitions_for_confidence: confidence must lie in (0, 1)");
    const double target = 1.0 - confidence;
    for (int d = 1; d < 1000000; ++d)
        if (median_failure_bound(delta, d) <= target) return d;
    throw DomainError("repetitions_for_confidence: no feasible D");
}

double qpe_failure_probability() { return 1.0 - 8.0 / (kPi * kPi); }

AmplitudeEstimator::AmplitudeEstimator(const QuantumState& chi, std::uint64_t t, int max_qubits) {
    if (t < 2) throw DomainError("amplitude estimation: t must be >= 2");
    table_ = qpe_distribution(chi, GroverIterate::half, ceil_log2(t), max_qubits);
}

AmplitudeEstimate AmplitudeEstimator::run(Rng& rng) const {
    const std::size_t x = table_.sample(rng);
    PhaseEstimate est;
    est.theta_hat = table_.theta_of(x);
    est.bits = table_.bits;
    est.repetitions = 1;
    est.unitary_applications = table_.u_uses;
    est.bound_applications = 0.5 * (std::ldexp(1.0, table_.bits) - 1.0);
    return {est.mu_hat(), est, table_.u_uses, table_.v_uses};
}

PhaseEstimate AmplitudeEstimator::median_of(int d, Rng& rng) const {
    if (d < 1) throw DomainError("median_of: D must be >= 1");
    std::vector<PhaseEstimate> runs;
    runs.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) runs.push_back(run(rng).estimate);
    return median_boost(runs);
}

AmplitudeEstimate amplitude_estimate(const QuantumState& chi, std::uint64_t t, Rng& rng, int max_qubits) {
    return AmplitudeEstimator(chi, t, max_qubits).run(rng);
}

double amplitude_error_bound(double a, std::uint64_t t) {
    const double td = static_cast<double>(t);
    return kTwoPi * std::sqrt(a * (1.0 - a)) / td + kPi * kPi / (td * td);
}

MeanEstimate mean_estimate_01(const DiscreteDist& dist, std::span<const double> values, std::uint64_t t, double delta,
                              Rng& rng, int max_qubits) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("mean_estimate_01: delta must lie in (0, 1)");
    const QuantumState chi = prepare_chi_values(dist, values, max_qubits);
    const AmplitudeEstimator estimator(chi, t, max_qubits);
    const int d = repetitions_for_confidence(qpe_failure_probability(), 1.0 - delta);
    const PhaseEstimate med = estimator.median_of(d, rng);
    return {med.mu_hat(), med};
}

MeanEstimate mean_estimate_01(const DiscreteDist& dist, const QuantizedPayoff& payoff, std::uint64_t t, double delta,
                              Rng& rng, int max_qubits) {
    if (!dist.grid.same_points(payoff.grid)) throw DomainError("mean_estimate_01: grids differ");
    return mean_estimate_01(dist, payoff.values, t, delta, rng, max_qubits);
}

double range_function(double a, double b, double x) {
    if (!(a >= 0.0 && a < b)) throw DomainError("range_function: need 0 <= a < b");
    return (x >= a && x < b) ? x / b : 0.0;
}

BoundedVarianceEstimate mean_estimate_bounded_variance(const DiscreteDist& dist, std::span<const double> values,
                                                       double lambda, double epsilon, Rng& rng, int max_qubits) {
    if (!(lambda > 0.0) || !(epsilon > 0.0)) throw DomainError("bounded-variance estimate: lambda and epsilon must be positive");
    if (!(epsilon < 4.0 * lambda)) throw DomainError("bounded-variance estimate: requires epsilon < 4 lambda");
    if (values.size() != dist.probs.size()) throw DomainError("bounded-variance estimate: size mismatch");

    const int levels = std::max(0, static_cast<int>(std::ceil(std::log2(lambda / epsilon)))) + 1;
    const double level_delta = (1.0 / 3.0) / static_cast<double>(2 * levels + 1);

    BoundedVarianceEstimate out{};
    out.levels_per_sign = levels;
    out.level_t = next_pow2(static_cast<std::uint64_t>(std::ceil(8.0 * kPi * levels * lambda / epsilon)));

    // Pilot mean on the normalized range.
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, range = *hi_it - *lo_it;
    if (range == 0.0) {
        out.estimate = out.pilot = lo;
        out.positive_levels.assign(static_cast<std::size_t>(levels), 0.0);
        out.negative_levels.assign(static_cast<std::size_t>(levels), 0.0);
        return out;
    }
    std::vector<double> unit(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) unit[j] = std::clamp((values[j] - lo) / range, 0.0, 1.0);
    const std::uint64_t pilot_t = std::max<std::uint64_t>(8, next_pow2(static_cast<std::uint64_t>(std::ceil(range / lambda))));
    const MeanEstimate pilot = mean_estimate_01(dist, unit, pilot_t, level_delta, rng, max_qubits);
    out.pilot = lo + range * pilot.mu_hat;
    out.unitary_applications += pilot.estimate.unitary_applications;

    std::vector<double> level_values(values.size());
    auto estimate_sign = [&](double sign, std::vector<double>& sink) {
        double total = 0.0;
        for (int l = 0; l < levels; ++l) {
            const double a = l == 0 ? 0.0 : std::ldexp(1.0, l - 1);
            const double b = std::ldexp(1.0, l);
            for (std::size_t j = 0; j < values.size(); ++j) {
                const double standardized = sign * (values[j] - out.pilot) / lambda;
                level_values[j] = range_function(a, b, std::max(standardized, 0.0));
            }
            const MeanEstimate est = mean_estimate_01(dist, level_values, out.level_t, level_delta, rng, max_qubits);
            out.unitary_applications += est.estimate.unitary_applications;
            sink.push_back(b * est.mu_hat);
            total += b * est.mu_hat;
        }
        return total;
    };
    const double pos = estimate_sign(1.0, out.positive_levels);
    const double neg = estimate_sign(-1.0, out.negative_levels);
    out.estimate = out.pilot + lambda * (pos - neg);
    return out;
}

double error_upper_bound(double theta_hat, double k) {
    if (!(k >= 1.0)) throw DomainError("error_upper_bound: k must be >= 1");
    return std::abs(std::cos(0.5 * theta_hat + kPi / k) - std::cos(0.5 * theta_hat));
}

double cosine_error_bound(double theta_hat, double eps) {
    if (!(theta_hat >= 0.0 && theta_hat < kPi)) throw DomainError("cosine_error_bound: theta_hat must lie in [0, pi)");
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("cosine_error_bound: eps must lie in (0, 1]");
    return std::abs(std::cos(0.5 * (theta_hat + eps)) - std::cos(0.5 * theta_hat));
}

} // namespace qmc
