#include "qmc/bench.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qmc/errors.hpp"
#include "qmc/parallel.hpp"

namespace qmc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw DomainError("config: bad value '" + text + "' for " + key);
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
    if (out.empty()) throw DomainError("config: empty list for " + key);
    return out;
}

AverageKind parse_kind(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    if (v == "arithmetic") return AverageKind::arithmetic;
    if (v == "geometric") return AverageKind::geometric;
    throw DomainError("config: " + key + " must be arithmetic or geometric");
}

const char* kind_name(AverageKind k) { return k == AverageKind::arithmetic ? "arithmetic" : "geometric"; }

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"market.s0", [](auto& c, auto& k, auto& v) { c.market.s0 = parse_number<double>(k, v); }},
        {"market.strike", [](auto& c, auto& k, auto& v) { c.market.strike = parse_number<double>(k, v); }},
        {"market.rate", [](auto& c, auto& k, auto& v) { c.market.rate = parse_number<double>(k, v); }},
        {"market.vol", [](auto& c, auto& k, auto& v) { c.market.vol = parse_number<double>(k, v); }},
        {"market.maturity", [](auto& c, auto& k, auto& v) { c.market.maturity = parse_number<double>(k, v); }},
        {"market.drift", [](auto& c, auto& k, auto& v) { c.market.drift = parse_number<double>(k, v); }},
        {"grid.qubits", [](auto& c, auto& k, auto& v) { c.grid.qubits = parse_number<int>(k, v); }},
        {"grid.cutoff", [](auto& c, auto& k, auto& v) { c.grid.cutoff = parse_number<double>(k, v); }},
        {"grid.payoff_bits", [](auto& c, auto& k, auto& v) { c.grid.payoff_bits = parse_number<int>(k, v); }},
        {"grid.v_max", [](auto& c, auto& k, auto& v) { c.grid.v_max = parse_number<double>(k, v); }},
        {"qae.phase_bits", [](auto& c, auto& k, auto& v) { c.qae.phase_bits = parse_number<int>(k, v); }},
        {"qae.repetitions", [](auto& c, auto& k, auto& v) { c.qae.repetitions = parse_number<int>(k, v); }},
        {"qae.shots_per_bit", [](auto& c, auto& k, auto& v) { c.qae.shots_per_bit = parse_number<int>(k, v); }},
        {"qae.max_qubits", [](auto& c, auto& k, auto& v) { c.qae.max_qubits = parse_number<int>(k, v); }},
        {"classical.ks", [](auto& c, auto& k, auto& v) { c.classical.ks = parse_list<std::uint64_t>(k, v); }},
        {"classical.trials", [](auto& c, auto& k, auto& v) { c.classical.trials = parse_number<int>(k, v); }},
        {"sweep.phase_bits", [](auto& c, auto& k, auto& v) { c.sweep.phase_bits = parse_list<int>(k, v); }},
        {"sweep.trials", [](auto& c, auto& k, auto& v) { c.sweep.trials = parse_number<int>(k, v); }},
        {"sweep.strikes", [](auto& c, auto& k, auto& v) { c.sweep.strikes = parse_list<double>(k, v); }},
        {"asian.periods", [](auto& c, auto& k, auto& v) { c.asian.periods = parse_number<int>(k, v); }},
        {"asian.period_qubits", [](auto& c, auto& k, auto& v) { c.asian.period_qubits = parse_number<int>(k, v); }},
        {"asian.kind", [](auto& c, auto& k, auto& v) { c.asian.kind = parse_kind(k, v); }},
        {"fig1.paths", [](auto& c, auto& k, auto& v) { c.fig1.paths = parse_number<int>(k, v); }},
        {"fig1.steps", [](auto& c, auto& k, auto& v) { c.fig1.steps = parse_number<int>(k, v); }},
        {"fig1.s0", [](auto& c, auto& k, auto& v) { c.fig1.s0 = parse_number<double>(k, v); }},
        {"fig1.drift", [](auto& c, auto& k, auto& v) { c.fig1.drift = parse_number<double>(k, v); }},
        {"fig1.vol", [](auto& c, auto& k, auto& v) { c.fig1.vol = parse_number<double>(k, v); }},
        {"fig1.maturity", [](auto& c, auto& k, auto& v) { c.fig1.maturity = parse_number<double>(k, v); }},
        {"runs", [](auto& c, auto& k, auto& v) { c.runs = parse_number<int>(k, v); }},
        {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"output.dir", [](auto& c, auto&, auto& v) { c.output_dir = trim(v); }},
    };
    return table;
}

double default_euro_vmax(const MarketParams& p, const GridSpec& grid) {
    const double top = euro_payoff(p, grid.x_max);
    return top > 0.0 ? top : 1.0;
}

} // namespace

void ExperimentConfig::validate() const {
    (void)market.params();
    if (grid.qubits < 1) throw DomainError("config: grid.qubits must be >= 1");
    if (!(grid.cutoff > 0.0)) throw DomainError("config: grid.cutoff must be positive");
    (void)FixedPointSpec::unit_interval(grid.payoff_bits);
    if (grid.v_max < 0.0) throw DomainError("config: grid.v_max must be >= 0");
    qae.validate();
    if (classical.trials < 1 || sweep.trials < 1) throw DomainError("config: trials must be >= 1");
    for (auto k : classical.ks)
        if (k < 2) throw DomainError("config: classical.ks entries must be >= 2");
    for (int b : sweep.phase_bits)
        if (b < 1 || b > 40) throw DomainError("config: sweep.phase_bits entries must be in [1, 40]");
    for (double k : sweep.strikes)
        if (!(k > 0.0)) throw DomainError("config: strikes must be positive");
    if (runs < 1) throw DomainError("config: runs must be >= 1");
    if (fig1.paths < 1 || fig1.steps < 1) throw DomainError("config: fig1.paths and fig1.steps must be >= 1");
    asian_spec().validate();
}

AsianSpec ExperimentConfig::asian_spec() const {
    return {market.params(), asian.periods, asian.period_qubits, asian.kind, grid.cutoff, grid.payoff_bits};
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw DomainError("config: unknown key '" + key + "'");
    it->second(cfg, key, value);
}

ExperimentConfig load_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: cannot open " + path);
    return load_config(in);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
    const bool asian = !rows.empty() && rows.front().asian.has_value();
    out << "run_id,n,m,D,k_q,mu_hat,theta_hat,pi_hat,pi_analytic,nu_est,eps_bound";
    if (asian) out << ",L,m_per_period,kind";
    out << '\n';
    out.precision(12);
    for (const auto& r : rows) {
        out << r.run_id << ',' << r.n << ',' << r.m << ',' << r.d << ',' << r.k_q << ',' << r.mu_hat << ','
            << r.theta_hat << ',' << r.pi_hat << ',' << r.pi_analytic << ',' << r.nu_est << ',' << r.eps_bound;
        if (asian && r.asian)
            out << ',' << r.asian->periods << ',' << r.asian->m_per_period << ',' << kind_name(r.asian->kind);
        out << '\n';
    }
}

namespace {

QuantumState european_chi(const ExperimentConfig& cfg, const MarketParams& p, double v_max) {
    check_qubit_budget(cfg.grid.qubits + 1, cfg.qae.max_qubits);
    const DiscreteDist dist = gaussian_grid(p.maturity(), cfg.grid.qubits, cfg.grid.cutoff);
    const QuantizedPayoff payoff = quantize_payoff(euro_payoff_fn(p), dist.grid, cfg.grid.payoff_bits, v_max);
    return prepare_chi(dist, payoff, cfg.qae.max_qubits);
}

double european_vmax(const ExperimentConfig& cfg, const MarketParams& p) {
    if (cfg.grid.v_max > 0.0) return cfg.grid.v_max;
    return default_euro_vmax(p, GridSpec::symmetric(cfg.grid.qubits, cfg.grid.cutoff * std::sqrt(p.maturity())));
}

} // namespace

EuropeanQuantumPricer::EuropeanQuantumPricer(const ExperimentConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      params_(cfg.market.params()),
      v_max_(european_vmax(cfg, params_)),
      pi_analytic_(bsm_call_price(params_).price),
      chi_(european_chi(cfg, params_, v_max_)),
      mu_exact_(exact_mu(chi_)),
      estimator_(chi_, std::uint64_t{1} << cfg.qae.phase_bits, cfg.qae.max_qubits) {}

double EuropeanQuantumPricer::grid_price() const { return params_.discount() * v_max_ * mu_exact_; }

TraceRow EuropeanQuantumPricer::run(int run_id, Rng& rng) const {
    const PhaseEstimate med = estimator_.median_of(cfg_.qae.repetitions, rng);
    const double scale = params_.discount() * v_max_;
    TraceRow r;
    r.run_id = run_id;
    r.n = cfg_.grid.qubits;
    r.m = cfg_.qae.phase_bits;
    r.d = cfg_.qae.repetitions;
    r.k_q = med.unitary_applications;
    r.mu_hat = med.mu_hat();
    r.theta_hat = med.theta_hat;
    r.pi_hat = scale * r.mu_hat;
    r.pi_analytic = pi_analytic_;
    r.nu_est = nu();
    r.eps_bound = scale * error_upper_bound(med.theta_hat, med.bound_applications);
    return r;
}

TraceRow price_european_quantum(const ExperimentConfig& cfg, int run_id, Rng& rng) {
    return EuropeanQuantumPricer(cfg).run(run_id, rng);
}

namespace {

TraceRow asian_trace(const ExperimentConfig& cfg, const AsianQuantumPricer& pricer, int run_id, Rng& rng) {
    const AsianSpec spec = cfg.asian_spec();
    const AsianQuantumResult res = pricer.run(rng);
    TraceRow r;
    r.run_id = run_id;
    r.n = spec.index_qubits();
    r.m = cfg.qae.phase_bits;
    r.d = cfg.qae.repetitions;
    r.k_q = res.estimate.unitary_applications;
    r.mu_hat = res.mu_hat;
    r.theta_hat = res.estimate.theta_hat;
    r.pi_hat = res.price;
    // Reference is the exact grid enumeration, so there is no separate discretization term.
    r.pi_analytic = spec.params.discount() * res.v_max * res.mu_exact;
    r.nu_est = 0.0;
    r.eps_bound = res.eps_bound;
    r.asian = TraceRow::AsianColumns{spec.periods, spec.period_qubits, spec.kind};
    return r;
}

} // namespace

TraceRow price_asian_quantum(const ExperimentConfig& cfg, int run_id, Rng& rng) {
    cfg.validate();
    const AsianQuantumPricer pricer(cfg.asian_spec(), cfg.qae);
    return asian_trace(cfg, pricer, run_id, rng);
}

double discretization_error(const ExperimentConfig& cfg) {
    const MarketParams p = cfg.market.params();
    const double v_max = european_vmax(cfg, p);
    const DiscreteDist dist = gaussian_grid(p.maturity(), cfg.grid.qubits, cfg.grid.cutoff);
    const QuantizedPayoff payoff = quantize_payoff(euro_payoff_fn(p), dist.grid, cfg.grid.payoff_bits, v_max);
    double mu = 0.0;
    for (std::size_t j = 0; j < dist.probs.size(); ++j) mu += dist.probs[j] * payoff.values[j];
    return std::abs(p.discount() * v_max * mu - bsm_call_price(p).price);
}

std::vector<QuantumSweepPoint> quantum_error_sweep(double s0, double price, std::span<const int> bits, int trials,
                                                   int repetitions, int shots, std::uint64_t seed) {
    if (trials < 1 || repetitions < 1 || shots < 1) throw DomainError("quantum_error_sweep: counts must be >= 1");
    const double theta = mu_to_theta(price / s0);
    const std::size_t nt = static_cast<std::size_t>(trials);
    std::vector<double> err(bits.size() * nt), bnd(bits.size() * nt);

    parallel_for(err.size(), [&](std::size_t cell) {
        const std::size_t i = cell / nt, j = cell % nt;
        Rng rng = make_stream(seed, i, j);
        std::vector<PhaseEstimate> runs;
        runs.reserve(static_cast<std::size_t>(repetitions));
        for (int r = 0; r < repetitions; ++r) runs.push_back(single_qubit_pe(theta, bits[i], shots, rng));
        const PhaseEstimate med = median_boost(runs);
        err[cell] = std::abs(s0 * med.mu_hat() - price);
        bnd[cell] = s0 * error_upper_bound(med.theta_hat, med.bound_applications);
    });

    std::vector<QuantumSweepPoint> out;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        double e = 0.0, b = 0.0;
        int dominated = 0;
        for (std::size_t j = 0; j < nt; ++j) {
            e += err[i * nt + j];
            b += bnd[i * nt + j];
            if (err[i * nt + j] <= bnd[i * nt + j]) ++dominated;
        }
        const double k = static_cast<double>(repetitions) * (std::ldexp(1.0, bits[i]) - 1.0) * shots;
        out.push_back({bits[i], k, e / static_cast<double>(nt), b / static_cast<double>(nt),
                       static_cast<double>(dominated) / static_cast<double>(nt)});
    }
    return out;
}

Fig2Result fig2_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const MarketParams p = cfg.market.params();
    Fig2Result r;
    r.price = bsm_call_price(p).price;
    r.theta = mu_to_theta(r.price / p.s0());

    r.classical_points = mc_error_sweep(p, cfg.classical.ks, cfg.classical.trials, splitmix64(cfg.seed ^ 0xC1));
    r.quantum_points = quantum_error_sweep(p.s0(), r.price, cfg.sweep.phase_bits, cfg.sweep.trials,
                                           cfg.qae.repetitions, cfg.qae.shots_per_bit, splitmix64(cfg.seed ^ 0xA2));
    r.classical = fit_power_law(r.classical_points);
    std::vector<ErrorPoint> q, b;
    for (const auto& pt : r.quantum_points) {
        q.push_back({pt.k, pt.error});
        b.push_back({pt.k, pt.bound});
    }
    r.quantum = fit_power_law(q);
    r.bound = fit_power_law(b);
    return r;
}

void write_fig2_csv(std::ostream& out, const Fig2Result& r) {
    struct Row {
        double k;
        std::optional<double> ec, eq, bq;
    };
    std::vector<Row> rows;
    for (const auto& c : r.classical_points) rows.push_back({c.k, c.error, std::nullopt, std::nullopt});
    for (const auto& q : r.quantum_points) rows.push_back({q.k, std::nullopt, q.error, q.bound});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.k < b.k; });

    out << "k,error_classical,error_quantum,bound_quantum\n";
    out.precision(12);
    auto field = [&](const std::optional<double>& v) {
        if (v) out << *v;
    };
    for (const auto& row : rows) {
        out << row.k << ',';
        field(row.ec);
        out << ',';
        field(row.eq);
        out << ',';
        field(row.bq);
        out << '\n';
    }
}

Fig3Row fig3_row(double strike, double zeta_q, double zeta_c) { return {strike, zeta_q, zeta_c, zeta_q / zeta_c}; }

std::vector<Fig3Row> fig3_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.sweep.strikes.empty()) throw DomainError("fig3: strike list is empty");
    std::vector<Fig3Row> rows;
    for (std::size_t i = 0; i < cfg.sweep.strikes.size(); ++i) {
        const MarketParams p = cfg.market.params().with_strike(cfg.sweep.strikes[i]);
        const double price = bsm_call_price(p).price;
        const auto pts = quantum_error_sweep(p.s0(), price, cfg.sweep.phase_bits, cfg.sweep.trials, cfg.qae.repetitions,
                                             cfg.qae.shots_per_bit, make_stream(cfg.seed, 0xF3, i)());
        std::vector<ErrorPoint> q;
        for (const auto& pt : pts) q.push_back({pt.k, pt.error});
        rows.push_back(fig3_row(cfg.sweep.strikes[i], fit_power_law(q).exponent));
    }
    return rows;
}

void write_fig3_csv(std::ostream& out, std::span<const Fig3Row> rows) {
    out << "strike,zeta_q,zeta_c,ratio\n";
    out.precision(12);
    for (const auto& r : rows) out << r.strike << ',' << r.zeta_q << ',' << r.zeta_c << ',' << r.ratio << '\n';
}

void write_fig1_csv(std::ostream& out, const Fig1Config& f, std::uint64_t seed) {
    const MarketParams p(f.s0, f.s0, 0.0, f.vol, f.maturity, f.drift);
    std::vector<double> times;
    for (int i = 1; i <= f.steps; ++i) times.push_back(f.maturity * i / f.steps);
    out << "t,path_id,price\n";
    out.precision(12);
    for (int path = 0; path < f.paths; ++path) {
        Rng rng = make_stream(seed, 0xF1, static_cast<std::uint64_t>(path));
        const auto prices = gbm_path(p, times, Measure::physical, rng);
        out << 0.0 << ',' << path << ',' << f.s0 << '\n';
        for (std::size_t i = 0; i < prices.size(); ++i) out << times[i] << ',' << path << ',' << prices[i] << '\n';
    }
}

int run_selftest(std::ostream& out) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        out << (ok ? "ok   " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };
    auto guarded = [&](const char* name, const std::function<bool()>& fn) {
        try {
            check(name, fn());
        } catch (const std::exception& e) {
            out << "FAIL " << name << " (" << e.what() << ")\n";
            ++failures;
        }
    };

    guarded("norm_cdf symmetry", [] { return norm_cdf(0.0) == 0.5 && std::abs(norm_cdf(1.3) + norm_cdf(-1.3) - 1.0) < 1e-15; });
    guarded("bsm reference price", [] { return std::abs(bsm_call_price(MarketParams::atm_reference()).price - 10.4506) < 1e-3; });
    guarded("d1 - d2 = sigma sqrt T", [] {
        const auto q = bsm_call_price(MarketParams::atm_reference());
        return std::abs(q.d1 - q.d2 - 0.2) < 1e-15;
    });
    guarded("grover-rudolph amplitudes", [] {
        const auto d = gaussian_grid(1.0, 8, 4.0);
        const auto a = grover_rudolph_amplitudes(d);
        double worst = 0.0;
        for (std::size_t j = 0; j < d.probs.size(); ++j) worst = std::max(worst, std::abs(a.amps[j] - std::sqrt(d.probs[j])));
        return worst <= 1e-12;
    });
    guarded("prepare_chi mu", [] {
        const MarketParams p = MarketParams::atm_reference();
        const auto d = gaussian_grid(1.0, 6, 4.0);
        const auto q = quantize_payoff(euro_payoff_fn(p), d.grid, 20, euro_payoff(p, d.grid.x_max));
        const auto chi = prepare_chi(d, q);
        double mu = 0.0;
        for (std::size_t j = 0; j < d.probs.size(); ++j) mu += d.probs[j] * q.values[j];
        return std::abs(exact_mu(chi) - mu) <= 1e-12;
    });
    guarded("payoff register uncompute", [] {
        const MarketParams p = MarketParams::atm_reference();
        const auto d = gaussian_grid(1.0, 4, 4.0);
        const auto q = quantize_payoff(euro_payoff_fn(p), d.grid, 8, euro_payoff(p, d.grid.x_max));
        QuantumState s = load_distribution(d, 8);
        apply_R_with_register(s, q);
        return scratch_leakage(s) <= 1e-12 && distance_up_to_phase(drop_scratch(s).amps(), prepare_chi(d, q).amps()) <= 1e-12;
    });
    guarded("phase convention", [] {
        const auto d = gaussian_grid(1.0, 3, 4.0);
        const std::vector<double> v(8, 0.3);
        const auto chi = prepare_chi_values(d, v);
        return std::abs(theta_to_mu(rotation_diagnostics(chi).oriented_angle) - exact_mu(chi)) <= 1e-10;
    });
    guarded("qpe normalization", [] {
        const auto d = gaussian_grid(1.0, 2, 4.0);
        const std::vector<double> v{0.1, 0.4, 0.7, 0.2};
        const auto t = qpe_distribution(prepare_chi_values(d, v), GroverIterate::full, 6);
        return std::abs(t.cumulative.back() - 1.0) <= 1e-10;
    });
    guarded("median repetitions <= 24", [] { return repetitions_for_confidence(qpe_failure_probability(), 0.995) <= 24; });
    guarded("single-qubit pe exact phase", [] {
        Rng rng(kDefaultSeed);
        const double theta = 2.0 * std::numbers::pi * 45.0 / 64.0;
        return single_qubit_pe(theta, 6, 1, rng).theta_hat == theta;
    });
    out << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures;
}

namespace {

std::filesystem::path output_file(const std::string& dir, const char* name) {
    std::filesystem::create_directories(dir);
    return std::filesystem::path(dir) / name;
}

std::ofstream open_output(const std::string& dir, const char* name) {
    std::ofstream f(output_file(dir, name));
    if (!f) throw DomainError(std::string("cannot write ") + name + " in " + dir);
    return f;
}

} // namespace

int cli_dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum and classical Monte Carlo option pricing"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, format = "csv";
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Master seed");
    app.add_option("--config", config_path, "key = value configuration file");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory for CSV files");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));

    auto* euro = app.add_subcommand("price-euro", "European call via coherent amplitude estimation");
    auto* asian = app.add_subcommand("price-asian", "Asian call via coherent amplitude estimation");
    auto* mc = app.add_subcommand("mc", "Classical Monte Carlo price");
    std::uint64_t mc_samples = 100000;
    mc->add_option("--samples", mc_samples, "Number of samples")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 40));
    auto* qae = app.add_subcommand("qae", "Amplitude estimation on the European state");
    std::string dump_path;
    qae->add_option("--dump-state", dump_path, "Write the prepared state as CSV");
    auto* fig1 = app.add_subcommand("fig1", "Sample GBM paths");
    auto* fig2 = app.add_subcommand("fig2", "Classical vs quantum error scaling");
    auto* fig3 = app.add_subcommand("fig3", "Quantum exponent across strikes");
    auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 64;
    }

    try {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
        if (*seed_opt) cfg.seed = seed;
        if (*out_opt) cfg.output_dir = out_dir;
        cfg.validate();
        const bool write_files = *out_opt || !config_path.empty();
        out.precision(10);

        if (selftest->parsed()) return run_selftest(out) == 0 ? 0 : 1;

        if (euro->parsed()) {
            const EuropeanQuantumPricer pricer(cfg);
            Rng rng = make_stream(cfg.seed, 0xE0);
            std::vector<TraceRow> rows;
            for (int i = 0; i < cfg.runs; ++i) rows.push_back(pricer.run(i, rng));
            const TraceRow& last = rows.back();
            out << "pi_hat       " << last.pi_hat << '\n'
                << "pi_analytic  " << last.pi_analytic << '\n'
                << "eps_bound    " << last.eps_bound << '\n'
                << "nu_est       " << last.nu_est << '\n'
                << "k_q          " << last.k_q << '\n'
                << "mu_hat       " << last.mu_hat << '\n'
                << "mu_exact     " << pricer.mu_exact() << '\n'
                << "v_max        " << pricer.v_max() << '\n';
            if (write_files) {
                auto f = open_output(cfg.output_dir, "trace.csv");
                write_trace_csv(f, rows);
            }
            return 0;
        }
        if (asian->parsed()) {
            const AsianQuantumPricer pricer(cfg.asian_spec(), cfg.qae);
            Rng rng = make_stream(cfg.seed, 0xA5);
            std::vector<TraceRow> rows;
            for (int i = 0; i < cfg.runs; ++i) rows.push_back(asian_trace(cfg, pricer, i, rng));
            const TraceRow& last = rows.back();
            out << "pi_hat       " << last.pi_hat << '\n'
                << "pi_grid      " << last.pi_analytic << '\n'
                << "eps_bound    " << last.eps_bound << '\n'
                << "k_q          " << last.k_q << '\n'
                << "mu_hat       " << last.mu_hat << '\n'
                << "mu_exact     " << pricer.mu_exact() << '\n'
                << "v_max        " << pricer.v_max() << '\n';
            if (write_files) {
                auto f = open_output(cfg.output_dir, "trace.csv");
                write_trace_csv(f, rows);
            }
            return 0;
        }
        if (mc->parsed()) {
            const MarketParams p = cfg.market.params();
            Rng rng = make_stream(cfg.seed, 0x3C);
            const McEstimate e = mc_price_european(p, mc_samples, rng);
            const AnalyticQuote q = bsm_call_price(p);
            out << "mean         " << e.mean << '\n'
                << "std_error    " << e.std_error << '\n'
                << "samples      " << e.samples << '\n'
                << "pi_analytic  " << q.price << '\n'
                << "variance     " << q.variance << '\n';
            return 0;
        }
        if (qae->parsed()) {
            const EuropeanQuantumPricer pricer(cfg);
            if (!dump_path.empty()) {
                std::ofstream f(dump_path);
                if (!f) throw DomainError("cannot write " + dump_path);
                dump_state_csv(f, pricer.chi());
            }
            const RotationDiagnostics diag = rotation_diagnostics(pricer.chi());
            Rng rng = make_stream(cfg.seed, 0x9A);
            const AmplitudeEstimate a = pricer.estimator().run(rng);
            const QpeTable& t = pricer.estimator().table();
            out << "mu_exact          " << pricer.mu_exact() << '\n'
                << "theta_exact       " << mu_to_theta(pricer.mu_exact()) << '\n'
                << "q_rotation_angle  " << diag.oriented_angle << '\n'
                << "q_eigenphase      " << diag.eigenphase << '\n'
                << "q_half_angle      " << diag.half_angle << '\n'
                << "v_phase           " << diag.v_phase << '\n'
                << "a_hat             " << a.a_hat << '\n'
                << "theta_hat         " << a.estimate.theta_hat << '\n'
                << "bracket_mass      " << bracket_mass(t, 0.5 * mu_to_theta(pricer.mu_exact())) << '\n'
                << "u_uses            " << a.u_uses << '\n'
                << "v_uses            " << a.v_uses << '\n';
            return 0;
        }
        if (fig1->parsed()) {
            auto f = open_output(cfg.output_dir, "fig1.csv");
            write_fig1_csv(f, cfg.fig1, cfg.seed);
            out << "wrote " << output_file(cfg.output_dir, "fig1.csv").string() << '\n';
            return 0;
        }
        if (fig2->parsed()) {
            const Fig2Result r = fig2_experiment(cfg);
            auto f = open_output(cfg.output_dir, "fig2.csv");
            write_fig2_csv(f, r);
            out << "strike          " << cfg.market.strike << '\n'
                << "pi_analytic     " << r.price << '\n'
                << "theta           " << r.theta << '\n'
                << "zeta_classical  " << r.classical.exponent << '\n'
                << "zeta_quantum    " << r.quantum.exponent << '\n'
                << "zeta_bound      " << r.bound.exponent << '\n'
                << "wrote " << output_file(cfg.output_dir, "fig2.csv").string() << '\n';
            return 0;
        }
        if (fig3->parsed()) {
            const auto rows = fig3_experiment(cfg);
            auto f = open_output(cfg.output_dir, "fig3.csv");
            write_fig3_csv(f, rows);
            for (const auto& r : rows) out << "K=" << r.strike << "  zeta_q=" << r.zeta_q << "  ratio=" << r.ratio << '\n';
            out << "wrote " << output_file(cfg.output_dir, "fig3.csv").string() << '\n';
            return 0;
        }
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 64;
}

} // namespace qmc
