#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmc/amp_estimation.hpp"
#include "qmc/asian.hpp"
#include "qmc/bsm.hpp"
#include "qmc/classical_mc.hpp"
#include "qmc/payoff.hpp"

namespace qmc {

struct MarketInputs {
    double s0 = 100.0;
    double strike = 100.0;
    double rate = 0.05;
    double vol = 0.2;
    double maturity = 1.0;
    double drift = 0.05;

    MarketParams params() const { return {s0, strike, rate, vol, maturity, drift}; }
};

struct GridConfig {
    int qubits = 8;
    double cutoff = kDefaultCutoff;
    int payoff_bits = 32;
    double v_max = 0.0; ///< 0 selects the largest in-grid payoff
};

struct ClassicalConfig {
    std::vector<std::uint64_t> ks = default_classical_ks();
    int trials = 100;
};

struct SweepConfig {
    std::vector<int> phase_bits = {7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    int trials = 100;
    std::vector<double> strikes = {60.0, 80.0, 100.0, 120.0, 140.0};
};

struct AsianConfig {
    int periods = 2;
    int period_qubits = 3;
    AverageKind kind = AverageKind::arithmetic;
};

struct Fig1Config {
    int paths = 5;
    int steps = 250;
    double s0 = 3.0;
    double drift = 0.1;
    double vol = 0.25;
    double maturity = 1.0;
};

struct ExperimentConfig {
    MarketInputs market;
    GridConfig grid;
    QaeConfig qae;
    ClassicalConfig classical;
    SweepConfig sweep;
    AsianConfig asian;
    Fig1Config fig1;
    int runs = 1;
    std::uint64_t seed = kDefaultSeed;
    std::string output_dir = ".";

    void validate() const;
    AsianSpec asian_spec() const;
};

/// Applies one `key = value` setting; unknown keys throw DomainError.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines; '#' starts a comment.
ExperimentConfig load_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

struct TraceRow {
    int run_id = 0;
    int n = 0;
    int m = 0;
    int d = 0;
    std::uint64_t k_q = 0;
    double mu_hat = 0.0;
    double theta_hat = 0.0;
    double pi_hat = 0.0;
    double pi_analytic = 0.0;
    double nu_est = 0.0;
    double eps_bound = 0.0;

    struct AsianColumns {
        int periods;
        int m_per_period;
        AverageKind kind;
    };
    std::optional<AsianColumns> asian;
};

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);

/// Grid -> chi -> amplitude estimation -> mu_hat -> price, with the chi and outcome table built once.
class EuropeanQuantumPricer {
public:
    explicit EuropeanQuantumPricer(const ExperimentConfig& cfg);

    TraceRow run(int run_id, Rng& rng) const;

    double v_max() const { return v_max_; }
    double mu_exact() const { return mu_exact_; }
    /// Discounted price implied by the exact mu of the prepared state.
    double grid_price() const;
    double pi_analytic() const { return pi_analytic_; }
    /// |grid_price - analytic price|: discretization, truncation and quantization error.
    double nu() const { return std::abs(grid_price() - pi_analytic_); }
    const QuantumState& chi() const { return chi_; }
    const AmplitudeEstimator& estimator() const { return estimator_; }

private:
    ExperimentConfig cfg_;
    MarketParams params_;
    double v_max_;
    double pi_analytic_;
    QuantumState chi_;
    double mu_exact_;
    AmplitudeEstimator estimator_;
};

TraceRow price_european_quantum(const ExperimentConfig& cfg, int run_id, Rng& rng);

TraceRow price_asian_quantum(const ExperimentConfig& cfg, int run_id, Rng& rng);

/// |e^{-rT} v_max mu_exact - analytic price| for the grid settings in cfg.
double discretization_error(const ExperimentConfig& cfg);

struct QuantumSweepPoint {
    int bits;
    double k;           ///< k_Q = D (2^m - 1) shots
    double error;       ///< mean |S0 mu_hat - price|
    double bound;       ///< mean S0 error_upper_bound(theta_hat, 2^m - 1)
    double dominance;   ///< fraction of trials with error <= its bound
};

/// Single-qubit phase estimation at theta = mu_to_theta(price / s0), D medians per trial.
std::vector<QuantumSweepPoint> quantum_error_sweep(double s0, double price, std::span<const int> bits, int trials,
                                                   int repetitions, int shots, std::uint64_t seed);

struct Fig2Result {
    double price;
    double theta;
    std::vector<ErrorPoint> classical_points;
    std::vector<QuantumSweepPoint> quantum_points;
    ScalingReport classical;
    ScalingReport quantum;
    ScalingReport bound;
};

Fig2Result fig2_experiment(const ExperimentConfig& cfg);
void write_fig2_csv(std::ostream& out, const Fig2Result& r);

inline constexpr double kReferenceClassicalExponent = -0.5;

struct Fig3Row {
    double strike;
    double zeta_q;
    double zeta_c;
    double ratio;
};

Fig3Row fig3_row(double strike, double zeta_q, double zeta_c = kReferenceClassicalExponent);
std::vector<Fig3Row> fig3_experiment(const ExperimentConfig& cfg);
void write_fig3_csv(std::ostream& out, std::span<const Fig3Row> rows);

/// GBM sample paths under the physical measure, S0 included at t = 0.
void write_fig1_csv(std::ostream& out, const Fig1Config& f, std::uint64_t seed);

/// Small invariant suite used by the `selftest` subcommand; returns the number of failures.
int run_selftest(std::ostream& out);

/// Exit codes: 0 success, 1 domain error, 2 resource error, 64 usage error.
int cli_dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace qmc
