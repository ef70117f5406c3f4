#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqss/qsim/linalg.hpp"
#include "sqss/qsim/rng.hpp"

namespace sqss::qsim {

/// Largest register the dense simulator accepts.
inline constexpr int kMaxQubits = 20;

/// Pure state of `num_qubits` qubits as a dense amplitude array.
///
/// Indexing is big-endian: qubit 0 is the leftmost ket symbol, i.e. the most
/// significant bit of the amplitude index, matching the ket notation
/// |q0 q1 ... q_{n-1}>.
class StateVector {
public:
    /// Normalized state from raw amplitudes; length must be a power of two
    /// and the norm must be 1 within 1e-9.
    static StateVector from_amplitudes(std::vector<cxd> amplitudes);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cxd>& amplitudes() const { return amps_; }
    cxd amplitude(std::size_t index) const { return amps_.at(index); }

    double norm_squared() const;

    /// Bit of `qubit` within basis index `index`.
    int bit_at(std::size_t index, int qubit) const;

private:
    friend StateVector prepare_basis_state(std::string_view bits);
    friend StateVector apply_gate(const StateVector& state, const struct GateSpec& gate);
    friend StateVector append_zero_qubit(const StateVector& state);
    friend std::pair<double, StateVector> collapse(const StateVector& state, int qubit, int bit);

    StateVector(int num_qubits, std::vector<cxd> amps)
        : num_qubits_(num_qubits), amps_(std::move(amps)) {}

    int num_qubits_ = 0;
    std::vector<cxd> amps_;
};

/// Gate description: named single-/two-qubit gates or an explicit unitary on
/// an ordered list of target qubits.
struct GateSpec {
    enum class Kind { H, X, Cnot, Unitary };

    Kind kind = Kind::H;
    std::vector<int> targets;  // for Cnot: {control, target}
    Matrix matrix;             // Unitary only; dim 2^targets.size()

    static GateSpec h(int qubit);
    static GateSpec x(int qubit);
    static GateSpec cnot(int control, int target);
    /// Checks U^dagger U = I within 1e-9.
    static GateSpec unitary(Matrix m, std::vector<int> targets);
};

/// |bits>, e.g. "010" -> |010>.
StateVector prepare_basis_state(std::string_view bits);

/// |state> (x) |0>: widens the register by one |0> qubit at the end.
StateVector append_zero_qubit(const StateVector& state);

/// U|state>; norm preserved.
StateVector apply_gate(const StateVector& state, const GateSpec& gate);

/// Appends a fresh |0> qubit at the end of the register, then applies
/// CNOT(control -> new qubit). Models copying a transit qubit onto an
/// eavesdropper ancilla.
StateVector apply_cnot_with_fresh_ancilla(const StateVector& state, int control);

/// Z-basis measurement with collapse; returns the sampled bit and the
/// renormalized post-measurement state.
std::pair<int, StateVector> measure_z(const StateVector& state, int qubit, Rng& rng);

/// Projects `qubit` onto |bit>, returning the branch probability and the
/// renormalized branch state (zero state if the branch has no support).
/// Deterministic counterpart of measure_z, used for exact enumeration.
std::pair<double, StateVector> collapse(const StateVector& state, int qubit, int bit);

/// Exact Born distribution over the listed qubits, keyed by bit string in
/// qubit-list order. No sampling.
std::map<std::string, double> outcome_distribution(const StateVector& state,
                                                   const std::vector<int>& qubits);

/// Partial trace down to a single qubit; 2x2, Hermitian, trace 1.
Matrix reduced_density(const StateVector& state, int qubit);

/// Partial trace down to the listed qubits (in the given order).
Matrix reduced_density_multi(const StateVector& state, const std::vector<int>& qubits);

/// True iff |<a|b>| = 1 within 1e-9.
bool equal_up_to_global_phase(const StateVector& a, const StateVector& b);

} // namespace sqss::qsim
