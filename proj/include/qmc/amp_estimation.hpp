#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmc/rng.hpp"
#include "qmc/statevec.hpp"

namespace qmc {

/// Output of one phase-estimation run or of a median over several.
struct PhaseEstimate {
    double theta_hat = 0.0;             ///< in the 1 - 2 mu = cos(theta / 2) convention
    int bits = 0;
    int repetitions = 1;
    std::uint64_t unitary_applications = 0;
    double bound_applications = 0.0;    ///< per-repetition resolution count fed to error_upper_bound

    double mu_hat() const;
};

struct QaeConfig {
    int phase_bits = 10;
    int repetitions = 24;
    int shots_per_bit = 1;
    std::uint64_t seed = kDefaultSeed;
    int max_qubits = kDefaultMaxQubits;

    void validate() const;
};

/// Q = U V U V (eigenphases +-theta) or its square root G = -U V (eigenphases +-theta / 2).
enum class GroverIterate { full, half };

class GroverOperator {
public:
    GroverOperator(const QuantumState& chi, GroverIterate kind);

    GroverIterate kind() const { return kind_; }
    std::size_t dimension() const { return chi_.size(); }

    void apply(std::span<Amplitude> psi);

    std::uint64_t u_uses() const { return u_uses_; }
    std::uint64_t v_uses() const { return v_uses_; }

private:
    std::vector<Amplitude> chi_;
    GroverIterate kind_;
    std::uint64_t u_uses_ = 0;
    std::uint64_t v_uses_ = 0;
};

/// Exact measurement statistics of the phase register.
struct QpeTable {
    int bits = 0;
    GroverIterate iterate = GroverIterate::full;
    std::vector<double> probs;
    std::vector<double> cumulative;
    std::uint64_t u_uses = 0;
    std::uint64_t v_uses = 0;

    std::size_t size() const { return probs.size(); }
    /// 2 pi min(x, M - x) / M: the measured eigenphase of the iterate, folded to [0, pi].
    double folded_phase(std::size_t x) const;
    /// Canonical theta for outcome x (twice the folded phase for the half iterate).
    double theta_of(std::size_t x) const;
    std::size_t sample(Rng& rng) const;
};

/// Register after Hadamards, controlled powers and inverse QFT.
/// gate_level = true applies each controlled power 2^j literally; false fills block y with G^y chi.
QuantumState qpe_register_state(const QuantumState& chi, GroverIterate iterate, int m, int max_qubits, bool gate_level,
                                 std::uint64_t* u_uses = nullptr, std::uint64_t* v_uses = nullptr);

QpeTable qpe_distribution(const QuantumState& chi, GroverIterate iterate, int m, int max_qubits = kDefaultMaxQubits);

/// Mass on the two m-bit values bracketing the folded eigenphase `phase`, and their mirror images.
double bracket_mass(const QpeTable& table, double phase);

/// P(outcome 0) for one stage: qubit in |+>, U_z^power, phase correction e^{-i correction}, Hadamard.
double single_qubit_p0(double theta, std::uint64_t power, double correction);

/// Iterative phase estimation with one qubit, bits resolved from least significant up.
PhaseEstimate single_qubit_pe(double theta, int m, int shots_per_bit, Rng& rng);

/// Lower median of theta_hat (order statistic ceil(D / 2)); counts are summed.
PhaseEstimate median_boost(std::span<const PhaseEstimate> estimates);

/// 1/2 (2 sqrt(delta (1 - delta)))^D
double median_failure_bound(double delta, int d);

/// Smallest D with median_failure_bound(delta, D) <= 1 - confidence.
int repetitions_for_confidence(double delta, double confidence);

/// Per-run failure probability of a coherent run: 1 - 8 / pi^2.
double qpe_failure_probability();

struct AmplitudeEstimate {
    double a_hat;
    PhaseEstimate estimate;
    std::uint64_t u_uses;
    std::uint64_t v_uses;
};

/// Coherent amplitude estimation on a fixed chi with m = ceil(log2 t) phase bits over G = -U V.
/// The outcome table is computed once, then every run is an independent draw from it.
class AmplitudeEstimator {
public:
    AmplitudeEstimator(const QuantumState& chi, std::uint64_t t, int max_qubits = kDefaultMaxQubits);

    int bits() const { return table_.bits; }
    const QpeTable& table() const { return table_; }

    AmplitudeEstimate run(Rng& rng) const;
    PhaseEstimate median_of(int d, Rng& rng) const;

private:
    QpeTable table_;
};

AmplitudeEstimate amplitude_estimate(const QuantumState& chi, std::uint64_t t, Rng& rng,
                                     int max_qubits = kDefaultMaxQubits);

/// 2 pi sqrt(a (1 - a)) / t + pi^2 / t^2
double amplitude_error_bound(double a, std::uint64_t t);

struct MeanEstimate {
    double mu_hat;
    PhaseEstimate estimate;
};

/// Median of D amplitude-estimation runs, D the smallest count meeting failure probability delta.
MeanEstimate mean_estimate_01(const DiscreteDist& dist, std::span<const double> values, std::uint64_t t, double delta,
                              Rng& rng, int max_qubits = kDefaultMaxQubits);
MeanEstimate mean_estimate_01(const DiscreteDist& dist, const QuantizedPayoff& payoff, std::uint64_t t, double delta,
                              Rng& rng, int max_qubits = kDefaultMaxQubits);

/// f_{a,b}(x) = x / b on [a, b), 0 elsewhere.
double range_function(double a, double b, double x);

struct BoundedVarianceEstimate {
    double estimate;
    double pilot;
    int levels_per_sign;
    std::uint64_t level_t;
    std::vector<double> positive_levels; ///< b * estimated E[f_{a,b}(B+)]
    std::vector<double> negative_levels;
    std::uint64_t unitary_applications;
};

/// E[v] for a payoff with standard deviation at most lambda, to accuracy epsilon with probability >= 2/3.
BoundedVarianceEstimate mean_estimate_bounded_variance(const DiscreteDist& dist, std::span<const double> values,
                                                       double lambda, double epsilon, Rng& rng,
                                                       int max_qubits = kDefaultMaxQubits);

/// |cos(theta_hat / 2 + pi / k) - cos(theta_hat / 2)|
double error_upper_bound(double theta_hat, double k);

/// |cos((theta_hat + eps) / 2) - cos(theta_hat / 2)| for 0 <= theta_hat < pi, 0 < eps <= 1.
double cosine_error_bound(double theta_hat, double eps);

std::uint64_t next_pow2(std::uint64_t v);
int ceil_log2(std::uint64_t v);

} // namespace qmc
