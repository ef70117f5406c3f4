#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqss/bits.hpp"
#include "sqss/protocol.hpp"
#include "sqss/qsim/linalg.hpp"
#include "sqss/qsim/qubit_store.hpp"

namespace sqss::adv {

enum class Kind { None, Dcna, IrMeasure, IrFake, Collective, Collusion };

std::string to_string(Kind kind);
Kind kind_from_string(std::string_view text);

// ---------------------------------------------------------------------------
// Collective attack description
// ---------------------------------------------------------------------------

/// Entangling unitary U_E acting on (transit qubit ⊗ fresh ancilla).
///
/// Structured mode fixes the two image vectors
///   U_E |0>|e>  =  a |0>|e00> + b |1>|e01>
///   U_E |1>|e>  =  c |0>|e10> + d |1>|e11>
/// with |a|^2+|b|^2 = |c|^2+|d|^2 = 1 and the two images orthonormal; the
/// ancilla space has dimension 2 or 4 and |e> is its first basis vector.
/// Random-unitary mode supplies an explicit 4x4 unitary (2-dim ancilla).
struct CollectiveSpec {
    enum class Mode { Structured, RandomUnitary };

    Mode mode = Mode::Structured;

    // structured
    qsim::cxd a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};
    std::vector<qsim::cxd> e00, e01, e10, e11;  // all of dimension 2 or 4

    // random-unitary
    qsim::Matrix unitary;

    int ancilla_dim() const;
    int ancilla_qubits() const;

    /// Throws InvalidArgument on violated invariants (normalization,
    /// orthonormal images / non-unitary matrix, bad dimensions).
    void validate() const;

    static CollectiveSpec structured(qsim::cxd a, qsim::cxd b, qsim::cxd c, qsim::cxd d,
                                     std::vector<qsim::cxd> e00, std::vector<qsim::cxd> e01,
                                     std::vector<qsim::cxd> e10, std::vector<qsim::cxd> e11);
    static CollectiveSpec random_unitary_mode(qsim::Matrix u);

    /// The no-op corner: a = d = 1, b = c = 0, e00 = e11 = |0>; passes every
    /// check and stores nothing.
    static CollectiveSpec identity_corner(int ancilla_dim = 2);
    /// The coupling that copies the transit bit onto the ancilla
    /// (a = d = 1, b = c = 0, e00 = |0>, e11 = |1>).
    static CollectiveSpec cnot_equivalent();

    /// Random draws used by the sweep harness (all valid by construction).
    static CollectiveSpec draw_random_unitary(qsim::Rng& rng);
    static CollectiveSpec draw_random_structured(qsim::Rng& rng, int ancilla_dim);
    static CollectiveSpec draw_zero_error(qsim::Rng& rng, int ancilla_dim);

    /// JSON wire format (see README): {"mode", "a", "b", "c", "d",
    /// "e00".."e11" as arrays of [re, im]}; random-unitary mode instead
    /// carries "unitary" as a 4x4 array of [re, im]. Validated on load.
    std::string to_json() const;
    static CollectiveSpec from_json(const std::string& text);
    static CollectiveSpec load_file(const std::string& path);
};

/// Completes the two structured image vectors (or takes the explicit matrix)
/// to a full unitary on transit ⊗ ancilla. The unreachable complement is
/// filled by Gram-Schmidt over the canonical basis in index order, so the
/// completion is deterministic. Targets are canonical: {0, 1[, 2]} for
/// (transit, ancilla qubits).
qsim::GateSpec build_collective_unitary(const CollectiveSpec& spec);

// ---------------------------------------------------------------------------
// Channel taps
// ---------------------------------------------------------------------------

/// A channel-tap strategy with session-local memory. `tap` is invoked once
/// per qubit in flight from the dealer to a participant (the only direction
/// the channel has) and returns the handle actually delivered.
class Adversary {
public:
    virtual ~Adversary() = default;

    virtual Kind kind() const = 0;

    virtual qsim::QubitRef tap(qsim::QubitStore& store, qsim::QubitRef q, int participant,
                               int slot, qsim::Rng& rng) {
        (void)store;
        (void)participant;
        (void)slot;
        (void)rng;
        return q;
    }

    /// Post-session reconstruction of K_A once the dealer has announced every
    /// decoy position: per message slot, the XOR of this adversary's M
    /// per-participant bits. Models with no readout return nullopt.
    virtual std::optional<Bits> guess_key(qsim::QubitStore& store, const SessionConfig& config,
                                          const std::vector<std::vector<std::size_t>>& decoy_positions,
                                          qsim::Rng& rng) {
        (void)store;
        (void)config;
        (void)decoy_positions;
        (void)rng;
        return std::nullopt;
    }
};

std::unique_ptr<Adversary> make_adversary(Kind kind,
                                          std::optional<CollectiveSpec> spec = std::nullopt);

/// Applies a fresh-|0> CNOT ancilla to the transit qubit (the one-way half of
/// the double-CNOT strategy); returns the ancilla handle.
qsim::QubitRef dcna_tap(qsim::QubitStore& store, qsim::QubitRef transit);

/// Z-measures the transit qubit in flight and forwards the collapsed qubit;
/// returns the recorded bit.
int ir_measure_tap(qsim::QubitStore& store, qsim::QubitRef transit, qsim::Rng& rng);

/// Keeps the original qubit coherent in the adversary's memory and forwards a
/// fresh uniformly random Z-basis qubit instead.
struct IrFakeTapResult {
    qsim::QubitRef forwarded;
    qsim::QubitRef stored;
};
IrFakeTapResult ir_fake_tap(qsim::QubitStore& store, qsim::QubitRef transit, qsim::Rng& rng);

/// Appends an ancilla register in |e> to the transit qubit's group and
/// applies U_E; returns the ancilla qubit handles.
std::vector<qsim::QubitRef> collective_tap(qsim::QubitStore& store, qsim::QubitRef transit,
                                           const CollectiveSpec& spec);

// ---------------------------------------------------------------------------
// Collusion
// ---------------------------------------------------------------------------

struct CollusionOutcome {
    Bits secret_guess;
    bool success = false;
};

/// M-1 dishonest participants pool their shares and guess the withheld
/// share's bits uniformly at the secret positions.
CollusionOutcome collusion_guess(const std::vector<Bits>& dishonest_shares,
                                 const DealerLedger& ledger, qsim::Rng& rng);

} // namespace sqss::adv
