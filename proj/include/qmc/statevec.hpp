#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qmc/dist_prep.hpp"
#include "qmc/payoff.hpp"

namespace qmc {

inline constexpr int kDefaultMaxQubits = 24;

/// Qubit ordering, most significant first: phase | index | scratch | ancilla.
/// The ancilla is bit 0 of the basis index.
struct RegisterLayout {
    int index_qubits;
    int scratch_qubits = 0;
    int phase_qubits = 0;

    int total_qubits() const { return phase_qubits + index_qubits + scratch_qubits + 1; }
    int system_qubits() const { return index_qubits + scratch_qubits + 1; }
    std::size_t dimension() const { return std::size_t{1} << total_qubits(); }
    std::size_t system_dimension() const { return std::size_t{1} << system_qubits(); }

    static constexpr int ancilla_bit() { return 0; }
    int scratch_offset() const { return 1; }
    int index_offset() const { return 1 + scratch_qubits; }
    int phase_offset() const { return system_qubits(); }

    bool operator==(const RegisterLayout&) const = default;
};

/// Throws ResourceError when `qubits` exceeds `max_qubits`.
void check_qubit_budget(int qubits, int max_qubits);

class QuantumState {
public:
    /// |0...0> on the given layout.
    explicit QuantumState(RegisterLayout layout, int max_qubits = kDefaultMaxQubits);
    QuantumState(RegisterLayout layout, std::vector<Amplitude> amps);

    const RegisterLayout& layout() const { return layout_; }
    std::span<Amplitude> amps() { return amps_; }
    std::span<const Amplitude> amps() const { return amps_; }
    std::size_t size() const { return amps_.size(); }
    double norm() const;

private:
    RegisterLayout layout_;
    std::vector<Amplitude> amps_;
};

/// The state-preparation unitary F = R (A x I) on index + ancilla.
/// A is a product of Grover-Rudolph cascades (one per sub-register); R rotates the
/// ancilla by beta_j with cos beta_j = sqrt(1 - v_j), sin beta_j = sqrt(v_j).
class StatePreparation {
public:
    struct Block {
        GroverRudolphAngles angles;
        int offset; ///< bit offset inside the index register
    };

    StatePreparation(int index_qubits, std::vector<Block> blocks, std::span<const double> values);

    static StatePreparation single(const DiscreteDist& dist, std::span<const double> values);

    int index_qubits() const { return index_qubits_; }
    RegisterLayout layout() const { return {index_qubits_, 0, 0}; }

    void apply(std::span<Amplitude> system) const;
    void apply_inverse(std::span<Amplitude> system) const;

private:
    void rotate(std::span<Amplitude> system, double sign) const;

    int index_qubits_;
    std::vector<Block> blocks_;
    std::vector<double> beta_;
};

/// F|0> for the given distribution and normalized payoff.
QuantumState prepare_chi(const DiscreteDist& dist, const QuantizedPayoff& payoff, int max_qubits = kDefaultMaxQubits);

/// Same, for values in [0, 1] given directly.
QuantumState prepare_chi_values(const DiscreteDist& dist, std::span<const double> values,
                                int max_qubits = kDefaultMaxQubits);

/// A|0> (x) |0>: the loaded distribution with the ancilla untouched, on a layout with scratch.
QuantumState load_distribution(const DiscreteDist& dist, int scratch_qubits, int max_qubits = kDefaultMaxQubits);

/// |j>|0>|b> -> |j>|v(j)>|b> -> controlled rotation on the scratch value -> uncompute scratch.
void apply_R_with_register(QuantumState& state, const QuantizedPayoff& payoff);

/// Probability mass outside the all-zero scratch subspace.
double scratch_leakage(const QuantumState& state);

/// Tr(rho^2) of the (index, ancilla) reduced state after tracing out scratch.
double reduced_purity(const QuantumState& state);

/// Restriction to scratch = 0 on a layout without scratch.
QuantumState drop_scratch(const QuantumState& state);

double exact_mu(const QuantumState& state);

// Reflections on a system-register block (index, scratch, ancilla).
void apply_V(std::span<Amplitude> psi);
void apply_Z(std::span<Amplitude> psi);
void apply_U(std::span<Amplitude> psi, std::span<const Amplitude> chi);
void apply_U_circuit(std::span<Amplitude> psi, const StatePreparation& prep);
void apply_S(std::span<Amplitude> psi, std::span<const Amplitude> chi);
void apply_Q(std::span<Amplitude> psi, std::span<const Amplitude> chi);

void apply_V(QuantumState& state);
void apply_Z(QuantumState& state);
void apply_U(QuantumState& state, const QuantumState& chi);
void apply_S(QuantumState& state, const QuantumState& chi);
void apply_Q(QuantumState& state, const QuantumState& chi);

/// theta = 2 arccos(1 - 2 mu)
double mu_to_theta(double mu);
/// mu = (1 - cos(theta / 2)) / 2
double theta_to_mu(double theta);

// Gate kernels. Bits are positions in the basis index (0 = least significant).
void apply_hadamard(std::span<Amplitude> psi, int bit);
void apply_controlled_phase(std::span<Amplitude> psi, int control, int target, double angle);
void apply_swap(std::span<Amplitude> psi, int a, int b);

/// Inverse QFT on bits [offset, offset + count): |y> -> 2^(-m/2) sum_x exp(-2 pi i x y / 2^m) |x>.
void inverse_qft(std::span<Amplitude> psi, int offset, int count);

/// Geometry of Q restricted to span{chi_0, chi_1}, where chi_b is the normalized
/// ancilla-b component of chi.
struct RotationDiagnostics {
    double mu;
    double oriented_angle;   ///< rotation angle of Q in the (chi_0, chi_1) plane, in [0, 2 pi)
    double eigenphase;       ///< |arg| of the 2x2 restricted eigenvalues, in [0, pi]
    double half_angle;       ///< oriented_angle / 2, the "rotation by 2 theta" reading
    double v_phase;          ///< phi in V chi = cos(theta/2) chi + e^{i phi} sin(theta/2) chi_perp
    double plane_leakage;    ///< norm of Q chi outside the plane
};

RotationDiagnostics rotation_diagnostics(const QuantumState& chi);

/// max_i |a_i - e^{i g} b_i| minimized over the global phase g.
double distance_up_to_phase(std::span<const Amplitude> a, std::span<const Amplitude> b);

void dump_state_csv(std::ostream& out, const QuantumState& state);

} // namespace qmc
