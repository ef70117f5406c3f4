#pragma once

#include <cstdint>
#include <vector>

#include "sqss/qsim/state_vector.hpp"

namespace sqss::qsim {

/// Handle to one qubit inside a QubitStore.
struct QubitRef {
    int group = -1;
    int qubit = -1;

    bool operator==(const QubitRef&) const = default;
};

/// Owns every entangled group of one session. Groups are independent
/// StateVectors; an operation never spans two groups. Appending an ancilla
/// (eavesdropper taps) widens the group it attaches to.
class QubitStore {
public:
    /// Adds an independent group; returns its index.
    int add_group(StateVector state);

    int group_count() const { return static_cast<int>(groups_.size()); }
    const StateVector& group(int g) const;

    /// Appends a fresh |0> qubit to the group holding `anchor`; returns a
    /// handle to the new qubit.
    QubitRef append_zero_qubit(QubitRef anchor);

    /// Applies a gate within the group holding all targets.
    void apply(int g, const GateSpec& gate);
    void apply_h(QubitRef r);

    int measure_z(QubitRef r, Rng& rng);

    /// Deterministic projection; returns branch probability.
    double collapse(QubitRef r, int bit);

    Matrix reduced_density(QubitRef r) const;

    /// Total qubits ever allocated via add_group / append_zero_qubit.
    std::int64_t qubits_allocated() const { return allocated_; }

private:
    void check_ref(QubitRef r, const char* who) const;

    std::vector<StateVector> groups_;
    std::int64_t allocated_ = 0;
};

} // namespace sqss::qsim
