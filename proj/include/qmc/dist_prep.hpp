#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace qmc {

using Amplitude = std::complex<double>;

/// 2^n equally spaced points on [-x_max, x_max], both endpoints included.
struct GridSpec {
    int qubits;
    double x_max;
    double delta_x;
    double cutoff_mult;

    static GridSpec symmetric(int qubits, double x_max, double cutoff_mult = 0.0);

    std::size_t size() const { return std::size_t{1} << qubits; }
    double point(std::size_t j) const;
    bool same_points(const GridSpec& other) const;
};

struct DiscreteDist {
    GridSpec grid;
    std::vector<double> probs;
    double norm_const;

    /// Arbitrary distribution over 2^n indices on a nominal [-1, 1] grid.
    static DiscreteDist from_probabilities(std::vector<double> probs);
};

struct AmplitudeVector {
    std::vector<Amplitude> amps;
};

inline constexpr double kDefaultCutoff = 4.0;

/// Grid with x_max = c * sqrt(variance_time), p_j proportional to the N(0, variance_time) density.
DiscreteDist gaussian_grid(double variance_time, int n, double c = kDefaultCutoff);

/// Coarse probabilities p_k^(m): sums over blocks of 2^(n-m) consecutive points. m = 0 gives {1}.
std::vector<double> level_probs(const DiscreteDist& d, int m);

/// Rotation angles theta_k^(m) for every level m = 0..n-1 and node k < 2^m.
struct GroverRudolphAngles {
    int qubits;
    std::vector<std::vector<double>> levels;
    std::uint64_t angle_evaluations;
};

GroverRudolphAngles grover_rudolph_angles(const DiscreteDist& d);

/// Applies the level-by-level uniformly controlled Ry cascade to the `qubits`-wide register
/// occupying bits [offset, offset + qubits) of `state` (most significant register bit first).
void apply_grover_rudolph(const GroverRudolphAngles& angles, std::span<Amplitude> state, int offset, bool inverse = false);

/// The simulated circuit output G|0^n>; amps[j] = sqrt(p_j).
AmplitudeVector grover_rudolph_amplitudes(const DiscreteDist& d);

void write_distribution_csv(std::ostream& out, const DiscreteDist& d);

} // namespace qmc
