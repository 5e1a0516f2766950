#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmc/amp_estimation.hpp"
#include "qmc/bsm.hpp"
#include "qmc/dist_prep.hpp"
#include "qmc/payoff.hpp"
#include "qmc/statevec.hpp"

namespace qmc {

inline constexpr std::uint64_t kDefaultPathCap = std::uint64_t{1} << 20;

/// L equally spaced averaging dates t_l = l T / L; period 1 occupies the most significant index bits.
struct AsianSpec {
    MarketParams params;
    int periods;
    int period_qubits;
    AverageKind kind = AverageKind::arithmetic;
    double cutoff = kDefaultCutoff;
    int payoff_bits = 32;

    void validate() const;
    double dt() const { return params.maturity() / periods; }
    int index_qubits() const { return periods * period_qubits; }
    std::uint64_t path_count() const { return std::uint64_t{1} << index_qubits(); }
};

std::vector<DiscreteDist> asian_product_dist(const AsianSpec& spec);

/// Average price along the grid path with the given per-period indices.
double path_to_average(const AsianSpec& spec, std::span<const std::size_t> indices);

/// Per-period indices of a flat composite index.
std::vector<std::size_t> split_path_index(const AsianSpec& spec, std::uint64_t flat);

/// Average reached when every increment sits at +x_max.
double asian_max_average(const AsianSpec& spec);

/// max(A_max - K, 0), or 1 when no grid path ends in the money.
double asian_default_vmax(const AsianSpec& spec);

/// Quantized payoff over the flat L * m qubit index register.
QuantizedPayoff asian_payoff_table(const AsianSpec& spec, double v_max, std::uint64_t cap = kDefaultPathCap);

struct AsianExpectation {
    double mu;
    double v_max;
    std::uint64_t paths;
};

/// Exact weighted sum of the normalized quantized payoff over every grid path.
AsianExpectation asian_exact_expectation(const AsianSpec& spec, double v_max, std::uint64_t cap = kDefaultPathCap);

/// Product-state loading followed by the payoff rotation on the flat register.
StatePreparation asian_state_preparation(const AsianSpec& spec, const QuantizedPayoff& payoff);
QuantumState asian_composite_state(const AsianSpec& spec, double v_max, int max_qubits = kDefaultMaxQubits);

struct AsianQuantumResult {
    double price;
    double mu_hat;
    double mu_exact;
    double v_max;
    double eps_bound;   ///< price-scale error_upper_bound
    PhaseEstimate estimate;
};

/// Coherent pricing pipeline with qae.repetitions medians of amplitude estimation.
class AsianQuantumPricer {
public:
    AsianQuantumPricer(const AsianSpec& spec, const QaeConfig& qae, double v_max = 0.0);

    AsianQuantumResult run(Rng& rng) const;
    double mu_exact() const { return mu_exact_; }
    double v_max() const { return v_max_; }

private:
    AsianSpec spec_;
    QaeConfig qae_;
    double v_max_;
    QuantumState chi_;
    double mu_exact_;
    AmplitudeEstimator estimator_;
};

AsianQuantumResult asian_quantum_price(const AsianSpec& spec, const QaeConfig& qae, Rng& rng);

} // namespace qmc
