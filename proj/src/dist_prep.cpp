#include "qmc/dist_prep.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "qmc/errors.hpp"

namespace qmc {

namespace {

constexpr int kMaxGridQubits = 30;

void check_qubits(int n) {
    if (n < 1 || n > kMaxGridQubits) throw DomainError("grid qubits must be in [1, 30]");
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

} // namespace

GridSpec GridSpec::symmetric(int qubits, double x_max, double cutoff_mult) {
    check_qubits(qubits);
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw DomainError("GridSpec: x_max must be positive");
    const double span = static_cast<double>((std::size_t{1} << qubits) - 1);
    return {qubits, x_max, 2.0 * x_max / span, cutoff_mult};
}

double GridSpec::point(std::size_t j) const {
    if (j + 1 == size()) return x_max;
    return -x_max + static_cast<double>(j) * delta_x;
}

bool GridSpec::same_points(const GridSpec& other) const {
    return qubits == other.qubits && std::abs(x_max - other.x_max) <= 1e-12 * std::max(1.0, std::abs(x_max));
}

DiscreteDist DiscreteDist::from_probabilities(std::vector<double> probs) {
    if (!is_power_of_two(probs.size()) || probs.size() < 2)
        throw DomainError("DiscreteDist: size must be a power of two >= 2");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("DiscreteDist: negative or non-finite probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("DiscreteDist: probabilities must sum to 1");
    const int n = std::countr_zero(probs.size());
    return {GridSpec::symmetric(n, 1.0), std::move(probs), 1.0};
}

DiscreteDist gaussian_grid(double variance_time, int n, double c) {
    if (!(variance_time > 0.0)) throw DomainError("gaussian_grid: variance_time must be positive");
    if (!(c > 0.0)) throw DomainError("gaussian_grid: cutoff must be positive");
    GridSpec grid = GridSpec::symmetric(n, c * std::sqrt(variance_time), c);

    const std::size_t size = grid.size();
    std::vector<double> density(size);
    const double coef = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance_time);
    // Fill from both ends so p_j == p_{N-1-j} bit for bit.
    for (std::size_t j = 0; j < size / 2; ++j) {
        const double x = grid.point(j);
        const double v = coef * std::exp(-x * x / (2.0 * variance_time));
        density[j] = v;
        density[size - 1 - j] = v;
    }
    double c_norm = 0.0;
    for (std::size_t j = 0; j < size / 2; ++j) c_norm += density[j];
    c_norm *= 2.0;
    for (double& v : density) v /= c_norm;
    return {grid, std::move(density), c_norm};
}

std::vector<double> level_probs(const DiscreteDist& d, int m) {
    const int n = d.grid.qubits;
    if (m < 0 || m > n) throw DomainError("level_probs: level out of range");
    std::vector<double> level = d.probs;
    for (int cur = n; cur > m; --cur) {
        std::vector<double> parent(level.size() / 2);
        for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = level[2 * k] + level[2 * k + 1];
        level = std::move(parent);
    }
    return level;
}

GroverRudolphAngles grover_rudolph_angles(const DiscreteDist& d) {
    const int n = d.grid.qubits;
    GroverRudolphAngles out{n, std::vector<std::vector<double>>(static_cast<std::size_t>(n)), 0};

    std::vector<double> child = d.probs;
    for (int m = n - 1; m >= 0; --m) {
        auto& angles = out.levels[static_cast<std::size_t>(m)];
        angles.resize(child.size() / 2);
        std::vector<double> parent(child.size() / 2);
        for (std::size_t k = 0; k < parent.size(); ++k) {
            const double left = child[2 * k], right = child[2 * k + 1];
            parent[k] = left + right;
            // arccos(sqrt(f)) with f = left / parent, written to stay accurate near f = 0 and f = 1.
            angles[k] = parent[k] > 0.0 ? std::atan2(std::sqrt(right), std::sqrt(left)) : std::numbers::pi / 4.0;
            ++out.angle_evaluations;
        }
        child = std::move(parent);
    }
    return out;
}

void apply_grover_rudolph(const GroverRudolphAngles& angles, std::span<Amplitude> state, int offset, bool inverse) {
    const int n = angles.qubits;
    if (offset < 0 || (state.size() >> offset) < (std::size_t{1} << n))
        throw DomainError("apply_grover_rudolph: register does not fit the state");
    const std::size_t reg_mask = (std::size_t{1} << n) - 1;

    auto apply_level = [&](int m) {
        const int bit = offset + n - 1 - m;
        const std::size_t stride = std::size_t{1} << bit;
        const auto& level = angles.levels[static_cast<std::size_t>(m)];
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (i & stride) continue;
            const std::size_t node = ((i >> offset) & reg_mask) >> (n - m);
            const double th = inverse ? -level[node] : level[node];
            const double c = std::cos(th), s = std::sin(th);
            const Amplitude a0 = state[i], a1 = state[i | stride];
            state[i] = c * a0 - s * a1;
            state[i | stride] = s * a0 + c * a1;
        }
    };

    if (!inverse) {
        for (int m = 0; m < n; ++m) apply_level(m);
    } else {
        for (int m = n - 1; m >= 0; --m) apply_level(m);
    }
}

AmplitudeVector grover_rudolph_amplitudes(const DiscreteDist& d) {
    const auto angles = grover_rudolph_angles(d);
    AmplitudeVector out{std::vector<Amplitude>(d.probs.size(), Amplitude{})};
    out.amps[0] = 1.0;
    apply_grover_rudolph(angles, out.amps, 0);
    return out;
}

void write_distribution_csv(std::ostream& out, const DiscreteDist& d) {
    out << "j,x_j,p_j\n";
    out.precision(17);
    for (std::size_t j = 0; j < d.probs.size(); ++j) out << j << ',' << d.grid.point(j) << ',' << d.probs[j] << '\n';
}

} // namespace qmc
