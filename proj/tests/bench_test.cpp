#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qmc/bench.hpp"
#include "qmc/errors.hpp"

using namespace qmc;

namespace {

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "qmc_price");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    return code;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("qmc_bench_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

ExperimentConfig small_fig_config() {
    ExperimentConfig cfg;
    cfg.classical.ks = {100, 1000, 10000};
    cfg.classical.trials = 10;
    cfg.sweep.phase_bits = {5, 6, 7, 8};
    cfg.sweep.trials = 10;
    cfg.sweep.strikes = {80, 100};
    return cfg;
}

} // namespace

TEST(Config, ParsesKeysListsAndComments) {
    std::istringstream in(
        "# experiment\n"
        "market.strike = 120   # out of the money\n"
        "grid.qubits=6\n"
        "\n"
        "qae.phase_bits = 9\n"
        "classical.ks = 100, 1000,10000\n"
        "sweep.strikes = 70,90\n"
        "asian.kind = geometric\n"
        "seed = 7\n"
        "output.dir = /tmp/x y\n");
    const auto cfg = load_config(in);
    EXPECT_EQ(cfg.market.strike, 120.0);
    EXPECT_EQ(cfg.grid.qubits, 6);
    EXPECT_EQ(cfg.qae.phase_bits, 9);
    EXPECT_EQ(cfg.classical.ks, (std::vector<std::uint64_t>{100, 1000, 10000}));
    EXPECT_EQ(cfg.sweep.strikes, (std::vector<double>{70, 90}));
    EXPECT_EQ(cfg.asian.kind, AverageKind::geometric);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.output_dir, "/tmp/x y");
    EXPECT_EQ(cfg.market.s0, 100.0);
}

TEST(Config, RejectsBadInput) {
    ExperimentConfig cfg;
    EXPECT_THROW(apply_setting(cfg, "market.strik", "100"), DomainError);
    EXPECT_THROW(apply_setting(cfg, "grid.qubits", "eight"), DomainError);
    EXPECT_THROW(apply_setting(cfg, "grid.qubits", "8x"), DomainError);
    EXPECT_THROW(apply_setting(cfg, "asian.kind", "harmonic"), DomainError);
    std::istringstream no_eq("grid.qubits 8\n");
    EXPECT_THROW(load_config(no_eq), DomainError);
    std::istringstream invalid("market.vol = -0.2\n");
    EXPECT_THROW(load_config(invalid), DomainError);
    std::istringstream zero_runs("runs = 0\n");
    EXPECT_THROW(load_config(zero_runs), DomainError);
    EXPECT_THROW(load_config_file("/nonexistent/qmc.cfg"), DomainError);
}

TEST(Trace, EuropeanAndAsianHeaders) {
    std::ostringstream euro, asian;
    TraceRow r;
    write_trace_csv(euro, std::vector<TraceRow>{r});
    EXPECT_EQ(first_line(euro.str()), "run_id,n,m,D,k_q,mu_hat,theta_hat,pi_hat,pi_analytic,nu_est,eps_bound");
    r.asian = TraceRow::AsianColumns{2, 3, AverageKind::arithmetic};
    write_trace_csv(asian, std::vector<TraceRow>{r});
    EXPECT_EQ(first_line(asian.str()), "run_id,n,m,D,k_q,mu_hat,theta_hat,pi_hat,pi_analytic,nu_est,eps_bound,L,m_per_period,kind");
    EXPECT_NE(asian.str().find(",2,3,arithmetic"), std::string::npos);
}

TEST(EuropeanPipeline, FieldsAndCounters) {
    ExperimentConfig cfg;
    cfg.grid.qubits = 6;
    cfg.qae.phase_bits = 8;
    const EuropeanQuantumPricer pricer(cfg);
    Rng rng(1);
    const auto row = pricer.run(3, rng);
    EXPECT_EQ(row.run_id, 3);
    EXPECT_EQ(row.n, 6);
    EXPECT_EQ(row.m, 8);
    EXPECT_EQ(row.d, 24);
    EXPECT_EQ(row.k_q, 24u * 255u);
    EXPECT_NEAR(row.pi_hat, cfg.market.params().discount() * pricer.v_max() * row.mu_hat, 1e-12);
    EXPECT_NEAR(row.pi_analytic, bsm_call_price(cfg.market.params()).price, 1e-12);
    EXPECT_NEAR(row.nu_est, discretization_error(cfg), 1e-12);
    EXPECT_GT(row.eps_bound, 0.0);
}

TEST(EuropeanPipeline, AtmBoundHolds) {
    ExperimentConfig cfg;
    cfg.grid.qubits = 8;
    cfg.qae.phase_bits = 10;
    cfg.qae.repetitions = 24;
    const EuropeanQuantumPricer pricer(cfg);
    Rng rng(kDefaultSeed);
    const int runs = 200;
    int ok = 0;
    for (int i = 0; i < runs; ++i) {
        const auto row = pricer.run(i, rng);
        if (std::abs(row.pi_hat - pricer.grid_price()) <= row.eps_bound) ++ok;
    }
    EXPECT_GE(ok, static_cast<int>(0.99 * runs));
}

TEST(EuropeanPipeline, NearlyDeterministicMarket) {
    ExperimentConfig cfg;
    cfg.market.vol = 1e-6;
    cfg.grid.qubits = 5;
    cfg.qae.phase_bits = 6;
    const EuropeanQuantumPricer pricer(cfg);
    const double forward = 100.0 * std::exp(0.05) - 100.0;
    EXPECT_NEAR(pricer.pi_analytic(), std::exp(-0.05) * forward, 1e-4);
    EXPECT_NEAR(pricer.grid_price(), pricer.pi_analytic(), 1e-4);
}

TEST(EuropeanPipeline, ExplicitVmax) {
    ExperimentConfig cfg;
    cfg.grid.qubits = 5;
    cfg.qae.phase_bits = 6;
    cfg.grid.v_max = 500.0;
    EXPECT_EQ(EuropeanQuantumPricer(cfg).v_max(), 500.0);
}

TEST(AsianPipeline, TraceRow) {
    ExperimentConfig cfg;
    cfg.qae.phase_bits = 6;
    Rng rng(2);
    const auto row = price_asian_quantum(cfg, 0, rng);
    ASSERT_TRUE(row.asian.has_value());
    EXPECT_EQ(row.asian->periods, 2);
    EXPECT_EQ(row.asian->m_per_period, 3);
    EXPECT_EQ(row.n, 6);
    EXPECT_EQ(row.nu_est, 0.0);
    EXPECT_EQ(row.k_q, 24u * 63u);
}

TEST(Sweep, PointsAndDominance) {
    const std::vector<int> bits{6, 8, 10};
    const auto pts = quantum_error_sweep(100.0, 10.4506, bits, 40, 24, 1, 5);
    ASSERT_EQ(pts.size(), 3u);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_EQ(pts[i].k, 24.0 * (std::ldexp(1.0, bits[i]) - 1));
        EXPECT_GE(pts[i].dominance, 0.95);
        EXPECT_LE(pts[i].error, pts[i].bound);
    }
    EXPECT_LT(pts[2].error, pts[0].error);
    EXPECT_EQ(quantum_error_sweep(100.0, 10.4506, bits, 3, 24, 2, 5)[0].k, 48.0 * 63.0);
    EXPECT_THROW(quantum_error_sweep(100.0, 10.0, bits, 0, 24, 1, 5), DomainError);
}

TEST(Fig2, DeterministicAndSorted) {
    const auto cfg = small_fig_config();
    std::ostringstream a, b;
    write_fig2_csv(a, fig2_experiment(cfg));
    write_fig2_csv(b, fig2_experiment(cfg));
    EXPECT_EQ(a.str(), b.str());
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,error_classical,error_quantum,bound_quantum");
    double prev = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const double k = std::stod(line.substr(0, line.find(',')));
        EXPECT_GE(k, prev);
        prev = k;
        ++rows;
    }
    EXPECT_EQ(rows, 7);
}

TEST(Fig3, RowsAndRatio) {
    const auto row = fig3_row(100, -1.0);
    EXPECT_DOUBLE_EQ(row.ratio, 2.0);
    EXPECT_EQ(row.zeta_c, -0.5);
    const auto rows = fig3_experiment(small_fig_config());
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].strike, 80.0);
    std::ostringstream out;
    write_fig3_csv(out, rows);
    EXPECT_EQ(first_line(out.str()), "strike,zeta_q,zeta_c,ratio");
}

TEST(Fig1, PathsStartAtSpot) {
    Fig1Config f;
    f.steps = 10;
    std::ostringstream out;
    write_fig1_csv(out, f, 42);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,path_id,price");
    int rows = 0, starts = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.rfind("0,", 0) == 0) {
            ++starts;
            EXPECT_EQ(line.substr(line.rfind(',') + 1), "3");
        }
    }
    EXPECT_EQ(rows, 5 * 11);
    EXPECT_EQ(starts, 5);
}

TEST(Selftest, Passes) {
    std::ostringstream out;
    EXPECT_EQ(run_selftest(out), 0);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli({"selftest"}), 0);
    EXPECT_EQ(run_cli({}), 64);
    EXPECT_EQ(run_cli({"bogus"}), 64);
    EXPECT_EQ(run_cli({"mc", "--samples", "1"}), 64);
    EXPECT_EQ(run_cli({"--format", "json", "selftest"}), 64);
    EXPECT_EQ(run_cli({"--help"}), 0);

    const auto dir = scratch_dir("codes");
    std::ofstream(dir / "bad.cfg") << "market.vol = 0\n";
    EXPECT_EQ(run_cli({"--config", (dir / "bad.cfg").string(), "price-euro"}), 1);
    std::ofstream(dir / "big.cfg") << "asian.periods = 3\nasian.period_qubits = 8\n";
    EXPECT_EQ(run_cli({"--config", (dir / "big.cfg").string(), "price-asian"}), 2);
    std::ofstream(dir / "tight.cfg") << "qae.max_qubits = 6\n";
    EXPECT_EQ(run_cli({"--config", (dir / "tight.cfg").string(), "price-euro"}), 2);
}

TEST(Cli, CommandsWriteOutputs) {
    const auto dir = scratch_dir("outputs");
    std::string text;
    EXPECT_EQ(run_cli({"--seed", "3", "mc", "--samples", "1000"}, &text), 0);
    EXPECT_NE(text.find("pi_analytic"), std::string::npos);

    std::ofstream(dir / "euro.cfg") << "grid.qubits = 5\nqae.phase_bits = 6\nruns = 3\noutput.dir = " << dir.string() << "\n";
    EXPECT_EQ(run_cli({"--config", (dir / "euro.cfg").string(), "price-euro"}), 0);
    const std::string trace = read_file(dir / "trace.csv");
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 4);

    EXPECT_EQ(run_cli({"--out", dir.string(), "fig1"}), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "fig1.csv"));

    EXPECT_EQ(run_cli({"qae", "--dump-state", (dir / "state.csv").string()}, &text), 0);
    EXPECT_EQ(first_line(read_file(dir / "state.csv")), "index,real,imag");
    EXPECT_NE(text.find("q_eigenphase"), std::string::npos);

    EXPECT_EQ(run_cli({"--seed", "4", "price-asian"}, &text), 0);
    EXPECT_NE(text.find("pi_grid"), std::string::npos);
    std::filesystem::remove_all(dir);
}
