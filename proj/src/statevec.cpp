#include "qmc/statevec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "qmc/errors.hpp"

namespace qmc {

namespace {

constexpr double kPi = std::numbers::pi;

double norm_sq(std::span<const Amplitude> v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

Amplitude inner(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    Amplitude s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void check_values(std::span<const double> values) {
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("payoff values must lie in [0, 1]");
}

} // namespace

void check_qubit_budget(int qubits, int max_qubits) {
    if (qubits > max_qubits)
        throw ResourceError("register of " + std::to_string(qubits) + " qubits exceeds the cap of " +
                            std::to_string(max_qubits));
}

QuantumState::QuantumState(RegisterLayout layout, int max_qubits) : layout_(layout) {
    if (layout.index_qubits < 0 || layout.scratch_qubits < 0 || layout.phase_qubits < 0)
        throw DomainError("RegisterLayout: negative register width");
    check_qubit_budget(layout.total_qubits(), max_qubits);
    amps_.assign(layout.dimension(), Amplitude{});
    amps_[0] = 1.0;
}

QuantumState::QuantumState(RegisterLayout layout, std::vector<Amplitude> amps)
    : layout_(layout), amps_(std::move(amps)) {
    if (amps_.size() != layout.dimension()) throw DomainError("QuantumState: amplitude count does not match layout");
}

double QuantumState::norm() const { return std::sqrt(norm_sq(amps_)); }

StatePreparation::StatePreparation(int index_qubits, std::vector<Block> blocks, std::span<const double> values)
    : index_qubits_(index_qubits), blocks_(std::move(blocks)), beta_(values.size()) {
    if (values.size() != (std::size_t{1} << index_qubits))
        throw DomainError("StatePreparation: payoff table does not match the index register");
    check_values(values);
    for (const auto& b : blocks_)
        if (b.offset < 0 || b.offset + b.angles.qubits > index_qubits)
            throw DomainError("StatePreparation: block outside the index register");
    for (std::size_t j = 0; j < values.size(); ++j) beta_[j] = std::atan2(std::sqrt(values[j]), std::sqrt(1.0 - values[j]));
}

StatePreparation StatePreparation::single(const DiscreteDist& dist, std::span<const double> values) {
    std::vector<Block> blocks{{grover_rudolph_angles(dist), 0}};
    return StatePreparation(dist.grid.qubits, std::move(blocks), values);
}

void StatePreparation::rotate(std::span<Amplitude> system, double sign) const {
    for (std::size_t j = 0; j < beta_.size(); ++j) {
        const double c = std::cos(beta_[j]), s = sign * std::sin(beta_[j]);
        Amplitude& a0 = system[2 * j];
        Amplitude& a1 = system[2 * j + 1];
        const Amplitude x0 = a0, x1 = a1;
        a0 = c * x0 - s * x1;
        a1 = s * x0 + c * x1;
    }
}

void StatePreparation::apply(std::span<Amplitude> system) const {
    if (system.size() != (std::size_t{2} << index_qubits_)) throw DomainError("StatePreparation: layout mismatch");
    for (const auto& b : blocks_) apply_grover_rudolph(b.angles, system, 1 + b.offset);
    rotate(system, 1.0);
}

void StatePreparation::apply_inverse(std::span<Amplitude> system) const {
    if (system.size() != (std::size_t{2} << index_qubits_)) throw DomainError("StatePreparation: layout mismatch");
    rotate(system, -1.0);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) apply_grover_rudolph(it->angles, system, 1 + it->offset, true);
}

QuantumState prepare_chi_values(const DiscreteDist& dist, std::span<const double> values, int max_qubits) {
    if (values.size() != dist.probs.size()) throw DomainError("prepare_chi: payoff and distribution sizes differ");
    QuantumState state(RegisterLayout{dist.grid.qubits, 0, 0}, max_qubits);
    StatePreparation::single(dist, values).apply(state.amps());
    return state;
}

QuantumState prepare_chi(const DiscreteDist& dist, const QuantizedPayoff& payoff, int max_qubits) {
    if (!dist.grid.same_points(payoff.grid)) throw DomainError("prepare_chi: distribution and payoff grids differ");
    return prepare_chi_values(dist, payoff.values, max_qubits);
}

QuantumState load_distribution(const DiscreteDist& dist, int scratch_qubits, int max_qubits) {
    QuantumState state(RegisterLayout{dist.grid.qubits, scratch_qubits, 0}, max_qubits);
    const auto amps = grover_rudolph_amplitudes(dist).amps;
    auto out = state.amps();
    out[0] = 0.0;
    for (std::size_t j = 0; j < amps.size(); ++j) out[j << (1 + scratch_qubits)] = amps[j];
    return state;
}

double scratch_leakage(const QuantumState& state) {
    const auto& lay = state.layout();
    const std::size_t mask = ((std::size_t{1} << lay.scratch_qubits) - 1) << 1;
    double leak = 0.0;
    const auto a = state.amps();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (i & mask) leak += std::norm(a[i]);
    return leak;
}

void apply_R_with_register(QuantumState& state, const QuantizedPayoff& payoff) {
    const auto& lay = state.layout();
    if (lay.phase_qubits != 0) throw DomainError("apply_R_with_register: phase register present");
    if (lay.scratch_qubits < payoff.fp.bits) throw DomainError("apply_R_with_register: scratch register too small");
    if ((std::size_t{1} << lay.index_qubits) != payoff.codes.size())
        throw DomainError("apply_R_with_register: payoff table does not match the index register");
    if (scratch_leakage(state) > 1e-12) throw DomainError("apply_R_with_register: scratch register not zeroed");

    const int s_bits = lay.scratch_qubits;
    const std::size_t s_mask = (std::size_t{1} << s_bits) - 1;
    auto amps = state.amps();

    // |j>|s>|b> -> |j>|s xor v(j)>|b>, an involution.
    auto xor_payoff = [&] {
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const std::size_t j = i >> (1 + s_bits);
            const std::size_t partner = i ^ (static_cast<std::size_t>(payoff.codes[j]) << 1);
            if (partner > i) std::swap(amps[i], amps[partner]);
        }
    };

    xor_payoff();
    for (std::size_t i = 0; i < amps.size(); i += 2) {
        const std::uint64_t code = (i >> 1) & s_mask;
        const double v = std::clamp(payoff.fp.value(code), 0.0, 1.0);
        const double c = std::sqrt(1.0 - v), s = std::sqrt(v);
        const Amplitude a0 = amps[i], a1 = amps[i + 1];
        amps[i] = c * a0 - s * a1;
        amps[i + 1] = s * a0 + c * a1;
    }
    xor_payoff();
}

double reduced_purity(const QuantumState& state) {
    const auto& lay = state.layout();
    const std::size_t n_scratch = std::size_t{1} << lay.scratch_qubits;
    const std::size_t n_index = std::size_t{1} << lay.index_qubits;
    const auto a = state.amps();
    auto at = [&](std::size_t j, std::size_t s, std::size_t b) { return a[(j << (1 + lay.scratch_qubits)) | (s << 1) | b]; };

    // Gram matrix of the scratch-conditioned branches: Tr(rho^2) = sum |<psi_s|psi_t>|^2.
    std::vector<Amplitude> gram(n_scratch * n_scratch);
    for (std::size_t s = 0; s < n_scratch; ++s)
        for (std::size_t t = 0; t < n_scratch; ++t) {
            Amplitude g{};
            for (std::size_t j = 0; j < n_index; ++j)
                for (std::size_t b = 0; b < 2; ++b) g += std::conj(at(j, s, b)) * at(j, t, b);
            gram[s * n_scratch + t] = g;
        }
    double purity = 0.0;
    for (const auto& g : gram) purity += std::norm(g);
    return purity;
}

QuantumState drop_scratch(const QuantumState& state) {
    const auto& lay = state.layout();
    RegisterLayout out_layout{lay.index_qubits, 0, 0};
    std::vector<Amplitude> out(out_layout.dimension());
    const auto a = state.amps();
    for (std::size_t j = 0; j < (std::size_t{1} << lay.index_qubits); ++j)
        for (std::size_t b = 0; b < 2; ++b) out[2 * j + b] = a[(j << (1 + lay.scratch_qubits)) | b];
    return QuantumState(out_layout, std::move(out));
}

double exact_mu(const QuantumState& state) {
    const auto a = state.amps();
    double mu = 0.0;
    for (std::size_t i = 1; i < a.size(); i += 2) mu += std::norm(a[i]);
    return std::clamp(mu, 0.0, 1.0);
}

void apply_V(std::span<Amplitude> psi) {
    for (std::size_t i = 1; i < psi.size(); i += 2) psi[i] = -psi[i];
}

void apply_Z(std::span<Amplitude> psi) { psi[0] = -psi[0]; }

void apply_U(std::span<Amplitude> psi, std::span<const Amplitude> chi) {
    if (psi.size() != chi.size()) throw DomainError("apply_U: layout mismatch");
    const Amplitude ov = 2.0 * inner(chi, psi);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] -= ov * chi[i];
}

void apply_U_circuit(std::span<Amplitude> psi, const StatePreparation& prep) {
    prep.apply_inverse(psi);
    apply_Z(psi);
    prep.apply(psi);
}

void apply_S(std::span<Amplitude> psi, std::span<const Amplitude> chi) {
    apply_V(psi);
    apply_U(psi, chi);
    apply_V(psi);
}

void apply_Q(std::span<Amplitude> psi, std::span<const Amplitude> chi) {
    apply_S(psi, chi);
    apply_U(psi, chi);
}

namespace {

void require_same_layout(const QuantumState& a, const QuantumState& b) {
    if (!(a.layout() == b.layout())) throw DomainError("state and chi have different layouts");
}

} // namespace

void apply_V(QuantumState& state) { apply_V(state.amps()); }
void apply_Z(QuantumState& state) { apply_Z(state.amps()); }

void apply_U(QuantumState& state, const QuantumState& chi) {
    require_same_layout(state, chi);
    apply_U(state.amps(), chi.amps());
}

void apply_S(QuantumState& state, const QuantumState& chi) {
    require_same_layout(state, chi);
    apply_S(state.amps(), chi.amps());
}

void apply_Q(QuantumState& state, const QuantumState& chi) {
    require_same_layout(state, chi);
    apply_Q(state.amps(), chi.amps());
}

double mu_to_theta(double mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu_to_theta: mu must lie in [0, 1]");
    return 2.0 * std::acos(1.0 - 2.0 * mu);
}

double theta_to_mu(double theta) {
    if (!(theta >= 0.0 && theta <= 2.0 * kPi)) throw DomainError("theta_to_mu: theta must lie in [0, 2 pi]");
    return 0.5 * (1.0 - std::cos(0.5 * theta));
}

void apply_hadamard(std::span<Amplitude> psi, int bit) {
    const std::size_t stride = std::size_t{1} << bit;
    const double h = (0.5 * std::numbers::sqrt2);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (i & stride) continue;
        const Amplitude a0 = psi[i], a1 = psi[i | stride];
        psi[i] = h * (a0 + a1);
        psi[i | stride] = h * (a0 - a1);
    }
}

void apply_controlled_phase(std::span<Amplitude> psi, int control, int target, double angle) {
    const std::size_t mask = (std::size_t{1} << control) | (std::size_t{1} << target);
    const Amplitude ph = std::polar(1.0, angle);
    for (std::size_t i = 0; i < psi.size(); ++i)
        if ((i & mask) == mask) psi[i] *= ph;
}

void apply_swap(std::span<Amplitude> psi, int a, int b) {
    if (a == b) return;
    const std::size_t ma = std::size_t{1} << a, mb = std::size_t{1} << b;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if ((i & ma) && !(i & mb)) std::swap(psi[i], psi[(i & ~ma) | mb]);
}

void inverse_qft(std::span<Amplitude> psi, int offset, int count) {
    // Qubit q (1-based, q = 1 most significant) lives at bit offset + count - q.
    auto bit = [&](int q) { return offset + count - q; };
    for (int q = 1; q <= count / 2; ++q) apply_swap(psi, bit(q), bit(count + 1 - q));
    for (int j = count; j >= 1; --j) {
        for (int k = count - j + 1; k >= 2; --k) apply_controlled_phase(psi, bit(j + k - 1), bit(j), -2.0 * kPi / std::ldexp(1.0, k));
        apply_hadamard(psi, bit(j));
    }
}

RotationDiagnostics rotation_diagnostics(const QuantumState& chi) {
    const auto c = chi.amps();
    const std::size_t dim = c.size();
    RotationDiagnostics d{};
    d.mu = exact_mu(chi);

    std::vector<Amplitude> e0(dim), e1(dim);
    for (std::size_t i = 0; i < dim; ++i) (i & 1 ? e1 : e0)[i] = c[i];
    const double n0 = std::sqrt(norm_sq(e0)), n1 = std::sqrt(norm_sq(e1));

    std::vector<Amplitude> q_chi(c.begin(), c.end());
    apply_Q(q_chi, c);
    if (n0 < 1e-300 || n1 < 1e-300) {
        // One-dimensional plane: Q chi = chi.
        d.plane_leakage = std::sqrt(norm_sq(q_chi) - std::norm(inner(c, q_chi)));
        return d;
    }
    for (auto& a : e0) a /= n0;
    for (auto& a : e1) a /= n1;

    auto restricted = [&](const std::vector<Amplitude>& v, Amplitude& r0, Amplitude& r1) {
        std::vector<Amplitude> w = v;
        apply_Q(w, c);
        r0 = inner(e0, w);
        r1 = inner(e1, w);
    };
    Amplitude m00, m10, m01, m11;
    restricted(e0, m00, m10);
    restricted(e1, m01, m11);

    double angle = std::atan2(m10.real(), m00.real());
    if (angle < 0.0) angle += 2.0 * kPi;
    d.oriented_angle = angle;
    d.half_angle = 0.5 * angle;

    const Amplitude tr = m00 + m11, det = m00 * m11 - m01 * m10;
    const Amplitude lambda = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    d.eigenphase = std::abs(std::arg(lambda));

    // chi_perp: chi rotated by +pi/2 inside the plane.
    const double cphi = n0, sphi = n1;
    std::vector<Amplitude> perp(dim), v_chi(c.begin(), c.end());
    for (std::size_t i = 0; i < dim; ++i) perp[i] = -sphi * e0[i] + cphi * e1[i];
    apply_V(v_chi);
    d.v_phase = std::arg(inner(perp, v_chi));
    if (d.v_phase < 0.0) d.v_phase += 2.0 * kPi;

    const Amplitude p0 = inner(e0, q_chi), p1 = inner(e1, q_chi);
    double leak = 0.0;
    for (std::size_t i = 0; i < dim; ++i) leak += std::norm(q_chi[i] - p0 * e0[i] - p1 * e1[i]);
    d.plane_leakage = std::sqrt(leak);
    return d;
}

double distance_up_to_phase(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) throw DomainError("distance_up_to_phase: size mismatch");
    const Amplitude ov = inner(b, a);
    const Amplitude ph = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Amplitude{1.0};
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - ph * b[i]));
    return worst;
}

void dump_state_csv(std::ostream& out, const QuantumState& state) {
    out << "index,real,imag\n";
    out.precision(17);
    const auto a = state.amps();
    for (std::size_t i = 0; i < a.size(); ++i) out << i << ',' << a[i].real() << ',' << a[i].imag() << '\n';
}

} // namespace qmc
