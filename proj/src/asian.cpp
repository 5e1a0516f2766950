#include "qmc/asian.hpp"

#include <cmath>
#include <string>

#include "qmc/errors.hpp"

namespace qmc {

void AsianSpec::validate() const {
    if (periods < 1) throw DomainError("AsianSpec: periods must be >= 1");
    if (period_qubits < 1) throw DomainError("AsianSpec: period_qubits must be >= 1");
    if (index_qubits() > 40) throw ResourceError("AsianSpec: composite index register wider than 40 qubits");
    if (!(cutoff > 0.0)) throw DomainError("AsianSpec: cutoff must be positive");
}

std::vector<DiscreteDist> asian_product_dist(const AsianSpec& spec) {
    spec.validate();
    return std::vector<DiscreteDist>(static_cast<std::size_t>(spec.periods),
                                     gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff));
}

double path_to_average(const AsianSpec& spec, std::span<const std::size_t> indices) {
    if (indices.size() != static_cast<std::size_t>(spec.periods)) throw DomainError("path_to_average: wrong path length");
    const GridSpec grid = GridSpec::symmetric(spec.period_qubits, spec.cutoff * std::sqrt(spec.dt()), spec.cutoff);
    AverageState avg{spec.kind};
    double s = spec.params.s0();
    std::uint64_t step = 0;
    for (std::size_t j : indices) {
        if (j >= grid.size()) throw DomainError("path_to_average: index out of range");
        s = stock_step(s, grid.point(j), spec.dt(), spec.params);
        avg = sequential_average_update(avg, s, ++step);
    }
    return avg.value();
}

std::vector<std::size_t> split_path_index(const AsianSpec& spec, std::uint64_t flat) {
    std::vector<std::size_t> out(static_cast<std::size_t>(spec.periods));
    const std::uint64_t mask = (std::uint64_t{1} << spec.period_qubits) - 1;
    for (int l = 0; l < spec.periods; ++l) {
        const int shift = (spec.periods - 1 - l) * spec.period_qubits;
        out[static_cast<std::size_t>(l)] = static_cast<std::size_t>((flat >> shift) & mask);
    }
    return out;
}

double asian_max_average(const AsianSpec& spec) {
    const std::vector<std::size_t> top(static_cast<std::size_t>(spec.periods), (std::size_t{1} << spec.period_qubits) - 1);
    return path_to_average(spec, top);
}

double asian_default_vmax(const AsianSpec& spec) {
    const double reach = asian_max_average(spec) - spec.params.strike();
    return reach > 0.0 ? reach : 1.0;
}

namespace {

void check_cap(const AsianSpec& spec, std::uint64_t cap) {
    spec.validate();
    if (spec.path_count() > cap)
        throw ResourceError("Asian enumeration of " + std::to_string(spec.path_count()) + " paths exceeds the cap of " +
                            std::to_string(cap));
}

} // namespace

QuantizedPayoff asian_payoff_table(const AsianSpec& spec, double v_max, std::uint64_t cap) {
    check_cap(spec, cap);
    std::vector<double> raw(spec.path_count());
    for (std::uint64_t flat = 0; flat < raw.size(); ++flat) {
        const auto path = split_path_index(spec, flat);
        raw[flat] = call_payoff(path_to_average(spec, path), spec.params.strike());
    }
    const GridSpec grid = GridSpec::symmetric(spec.period_qubits, spec.cutoff * std::sqrt(spec.dt()), spec.cutoff);
    return quantize_values(grid, raw, spec.payoff_bits, v_max);
}

AsianExpectation asian_exact_expectation(const AsianSpec& spec, double v_max, std::uint64_t cap) {
    const QuantizedPayoff table = asian_payoff_table(spec, v_max, cap);
    const DiscreteDist dist = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff);
    double mu = 0.0;
    for (std::uint64_t flat = 0; flat < spec.path_count(); ++flat) {
        double p = 1.0;
        for (std::size_t j : split_path_index(spec, flat)) p *= dist.probs[j];
        mu += p * table.values[flat];
    }
    return {mu, v_max, spec.path_count()};
}

StatePreparation asian_state_preparation(const AsianSpec& spec, const QuantizedPayoff& payoff) {
    const DiscreteDist dist = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff);
    const GroverRudolphAngles angles = grover_rudolph_angles(dist);
    std::vector<StatePreparation::Block> blocks;
    for (int l = 0; l < spec.periods; ++l) blocks.push_back({angles, (spec.periods - 1 - l) * spec.period_qubits});
    return StatePreparation(spec.index_qubits(), std::move(blocks), payoff.values);
}

QuantumState asian_composite_state(const AsianSpec& spec, double v_max, int max_qubits) {
    spec.validate();
    check_qubit_budget(spec.index_qubits() + 1, max_qubits);
    const QuantizedPayoff payoff = asian_payoff_table(spec, v_max);
    QuantumState state(RegisterLayout{spec.index_qubits(), 0, 0}, max_qubits);
    asian_state_preparation(spec, payoff).apply(state.amps());
    return state;
}

AsianQuantumPricer::AsianQuantumPricer(const AsianSpec& spec, const QaeConfig& qae, double v_max)
    : spec_(spec),
      qae_((qae.validate(), qae)),
      v_max_(v_max > 0.0 ? v_max : asian_default_vmax(spec)),
      chi_(asian_composite_state(spec, v_max_, qae.max_qubits)),
      mu_exact_(exact_mu(chi_)),
      estimator_(chi_, std::uint64_t{1} << qae.phase_bits, qae.max_qubits) {}

AsianQuantumResult AsianQuantumPricer::run(Rng& rng) const {
    const PhaseEstimate med = estimator_.median_of(qae_.repetitions, rng);
    const double scale = spec_.params.discount() * v_max_;
    AsianQuantumResult r;
    r.mu_hat = med.mu_hat();
    r.price = scale * r.mu_hat;
    r.mu_exact = mu_exact_;
    r.v_max = v_max_;
    r.eps_bound = scale * error_upper_bound(med.theta_hat, med.bound_applications);
    r.estimate = med;
    return r;
}

AsianQuantumResult asian_quantum_price(const AsianSpec& spec, const QaeConfig& qae, Rng& rng) {
    return AsianQuantumPricer(spec, qae).run(rng);
}

} // namespace qmc
