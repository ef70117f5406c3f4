#include "sqss/qsim/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sqss/errors.hpp"

namespace sqss::qsim {

namespace {

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

int log2_exact(std::size_t n) {
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

void check_qubit(const StateVector& s, int qubit, const char* who) {
    if (qubit < 0 || qubit >= s.num_qubits())
        throw InvalidArgument(std::string(who) + ": qubit index out of range");
}

const Matrix& h_matrix() {
    static const Matrix h = [] {
        Matrix m(2);
        const double r = 1.0 / std::sqrt(2.0);
        m(0, 0) = r;
        m(0, 1) = r;
        m(1, 0) = r;
        m(1, 1) = -r;
        return m;
    }();
    return h;
}

const Matrix& x_matrix() {
    static const Matrix x = [] {
        Matrix m(2);
        m(0, 1) = 1.0;
        m(1, 0) = 1.0;
        return m;
    }();
    return x;
}

} // namespace

StateVector StateVector::from_amplitudes(std::vector<cxd> amplitudes) {
    if (!is_power_of_two(amplitudes.size()))
        throw InvalidArgument("StateVector: amplitude count must be a power of two");
    const int n = log2_exact(amplitudes.size());
    if (n < 1 || n > kMaxQubits)
        throw InvalidArgument("StateVector: register size out of supported range");
    double norm2 = 0.0;
    for (const cxd& a : amplitudes) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > kTolNumeric)
        throw InvalidArgument("StateVector: amplitudes are not normalized");
    return StateVector(n, std::move(amplitudes));
}

double StateVector::norm_squared() const {
    double norm2 = 0.0;
    for (const cxd& a : amps_) norm2 += std::norm(a);
    return norm2;
}

int StateVector::bit_at(std::size_t index, int qubit) const {
    return static_cast<int>((index >> (num_qubits_ - 1 - qubit)) & 1u);
}

GateSpec GateSpec::h(int qubit) {
    return GateSpec{Kind::H, {qubit}, {}};
}

GateSpec GateSpec::x(int qubit) {
    return GateSpec{Kind::X, {qubit}, {}};
}

GateSpec GateSpec::cnot(int control, int target) {
    return GateSpec{Kind::Cnot, {control, target}, {}};
}

GateSpec GateSpec::unitary(Matrix m, std::vector<int> targets) {
    if (m.dim() != (std::size_t{1} << targets.size()))
        throw InvalidArgument("GateSpec::unitary: matrix dimension does not match target count");
    if (!m.is_unitary()) throw InvalidArgument("GateSpec::unitary: matrix is not unitary");
    return GateSpec{Kind::Unitary, std::move(targets), std::move(m)};
}

StateVector prepare_basis_state(std::string_view bits) {
    if (bits.empty()) throw InvalidArgument("prepare_basis_state: empty bit string");
    if (bits.size() > static_cast<std::size_t>(kMaxQubits))
        throw InvalidArgument("prepare_basis_state: register too large");
    std::size_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw InvalidArgument("prepare_basis_state: bits must be 0 or 1");
        index = (index << 1) | static_cast<std::size_t>(c - '0');
    }
    std::vector<cxd> amps(std::size_t{1} << bits.size(), cxd{0.0, 0.0});
    amps[index] = 1.0;
    return StateVector(static_cast<int>(bits.size()), std::move(amps));
}

namespace {

void check_targets(const StateVector& state, const std::vector<int>& targets, const char* who) {
    std::set<int> seen;
    for (int t : targets) {
        check_qubit(state, t, who);
        if (!seen.insert(t).second) throw InvalidArgument(std::string(who) + ": duplicate target qubit");
    }
}

StateVector apply_matrix(const StateVector& state, const Matrix& u, const std::vector<int>& targets) {
    const int n = state.num_qubits();
    const std::size_t k = targets.size();
    const std::size_t block = std::size_t{1} << k;
    std::vector<std::size_t> masks(k);
    for (std::size_t i = 0; i < k; ++i) masks[i] = std::size_t{1} << (n - 1 - targets[i]);

    std::size_t target_union = 0;
    for (std::size_t m : masks) target_union |= m;

    std::vector<cxd> out(state.dim(), cxd{0.0, 0.0});
    std::vector<std::size_t> offsets(block);
    for (std::size_t sub = 0; sub < block; ++sub) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < k; ++i)
            if ((sub >> (k - 1 - i)) & 1u) off |= masks[i];
        offsets[sub] = off;
    }

    const auto& in = state.amplitudes();
    for (std::size_t base = 0; base < state.dim(); ++base) {
        if (base & target_union) continue;  // enumerate each block once
        for (std::size_t r = 0; r < block; ++r) {
            cxd acc{0.0, 0.0};
            for (std::size_t c = 0; c < block; ++c) {
                const cxd& v = u(r, c);
                if (v != cxd{0.0, 0.0}) acc += v * in[base | offsets[c]];
            }
            out[base | offsets[r]] = acc;
        }
    }
    return StateVector::from_amplitudes(std::move(out));
}

} // namespace

StateVector apply_gate(const StateVector& state, const GateSpec& gate) {
    switch (gate.kind) {
        case GateSpec::Kind::H: {
            check_targets(state, gate.targets, "apply_gate(H)");
            return apply_matrix(state, h_matrix(), gate.targets);
        }
        case GateSpec::Kind::X: {
            check_targets(state, gate.targets, "apply_gate(X)");
            return apply_matrix(state, x_matrix(), gate.targets);
        }
        case GateSpec::Kind::Cnot: {
            check_targets(state, gate.targets, "apply_gate(CNOT)");
            const int n = state.num_qubits();
            const std::size_t cmask = std::size_t{1} << (n - 1 - gate.targets[0]);
            const std::size_t tmask = std::size_t{1} << (n - 1 - gate.targets[1]);
            std::vector<cxd> out(state.dim());
            const auto& in = state.amplitudes();
            for (std::size_t i = 0; i < state.dim(); ++i)
                out[(i & cmask) ? (i ^ tmask) : i] = in[i];
            return StateVector(n, std::move(out));
        }
        case GateSpec::Kind::Unitary: {
            check_targets(state, gate.targets, "apply_gate(unitary)");
            if (!gate.matrix.is_unitary())
                throw InvalidArgument("apply_gate: matrix is not unitary");
            return apply_matrix(state, gate.matrix, gate.targets);
        }
    }
    throw InternalError("apply_gate: unknown gate kind");
}

StateVector append_zero_qubit(const StateVector& state) {
    if (state.num_qubits() + 1 > kMaxQubits)
        throw InvalidArgument("append_zero_qubit: register too large");
    std::vector<cxd> amps(state.dim() * 2, cxd{0.0, 0.0});
    for (std::size_t i = 0; i < state.dim(); ++i) amps[i << 1] = state.amplitudes()[i];
    return StateVector(state.num_qubits() + 1, std::move(amps));
}

StateVector apply_cnot_with_fresh_ancilla(const StateVector& state, int control) {
    check_qubit(state, control, "apply_cnot_with_fresh_ancilla");
    StateVector widened = append_zero_qubit(state);
    return apply_gate(widened, GateSpec::cnot(control, widened.num_qubits() - 1));
}

std::pair<int, StateVector> measure_z(const StateVector& state, int qubit, Rng& rng) {
    check_qubit(state, qubit, "measure_z");
    if (std::abs(state.norm_squared() - 1.0) > 1e-6)
        throw InvalidArgument("measure_z: state is not normalized");

    double p1 = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i)
        if (state.bit_at(i, qubit)) p1 += std::norm(state.amplitudes()[i]);

    const int bit = rng.real() < p1 ? 1 : 0;
    auto [prob, post] = collapse(state, qubit, bit);
    if (prob <= 0.0) throw InternalError("measure_z: sampled a zero-probability branch");
    return {bit, std::move(post)};
}

std::pair<double, StateVector> collapse(const StateVector& state, int qubit, int bit) {
    check_qubit(state, qubit, "collapse");
    std::vector<cxd> amps(state.dim(), cxd{0.0, 0.0});
    double prob = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (state.bit_at(i, qubit) == bit) {
            amps[i] = state.amplitudes()[i];
            prob += std::norm(amps[i]);
        }
    }
    if (prob > 0.0) {
        const double scale = 1.0 / std::sqrt(prob);
        for (cxd& a : amps) a *= scale;
    }
    return {prob, StateVector(state.num_qubits(), std::move(amps))};
}

std::map<std::string, double> outcome_distribution(const StateVector& state,
                                                   const std::vector<int>& qubits) {
    check_targets(state, qubits, "outcome_distribution");
    std::map<std::string, double> dist;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state.amplitudes()[i]);
        if (p == 0.0) continue;
        std::string key(qubits.size(), '0');
        for (std::size_t k = 0; k < qubits.size(); ++k)
            key[k] = static_cast<char>('0' + state.bit_at(i, qubits[k]));
        dist[key] += p;
    }
    return dist;
}

Matrix reduced_density(const StateVector& state, int qubit) {
    return reduced_density_multi(state, {qubit});
}

Matrix reduced_density_multi(const StateVector& state, const std::vector<int>& qubits) {
    check_targets(state, qubits, "reduced_density_multi");
    const std::size_t k = qubits.size();
    Matrix rho(std::size_t{1} << k);
    const int n = state.num_qubits();

    std::vector<std::size_t> masks(k);
    for (std::size_t i = 0; i < k; ++i) masks[i] = std::size_t{1} << (n - 1 - qubits[i]);
    std::size_t kept = 0;
    for (std::size_t m : masks) kept |= m;

    std::vector<std::size_t> offsets(rho.dim());
    for (std::size_t sub = 0; sub < rho.dim(); ++sub) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < k; ++i)
            if ((sub >> (k - 1 - i)) & 1u) off |= masks[i];
        offsets[sub] = off;
    }

    const auto& amps = state.amplitudes();
    for (std::size_t env = 0; env < state.dim(); ++env) {
        if (env & kept) continue;  // iterate traced-out configurations once
        for (std::size_t r = 0; r < rho.dim(); ++r) {
            const cxd ar = amps[env | offsets[r]];
            if (ar == cxd{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < rho.dim(); ++c)
                rho(r, c) += ar * std::conj(amps[env | offsets[c]]);
        }
    }
    return rho;
}

bool equal_up_to_global_phase(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits())
        throw InvalidArgument("equal_up_to_global_phase: dimension mismatch");
    cxd inner{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i)
        inner += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    return std::abs(std::abs(inner) - 1.0) <= kTolNumeric;
}

} // namespace sqss::qsim
