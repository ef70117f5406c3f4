#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqss/bits.hpp"
#include "sqss/qsim/qubit_store.hpp"
#include "sqss/qsim/rng.hpp"
#include "sqss/qsim/state_vector.hpp"

namespace sqss {

// ---------------------------------------------------------------------------
// Classical vocabulary of the scheme
// ---------------------------------------------------------------------------

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

std::string to_string(BellLabel label);
BellLabel bell_label_from_string(std::string_view text);

/// Check operation a participant may apply to a decoy qubit: direct Z
/// measurement (M) or Hadamard followed by Z measurement (MH).
enum class CheckOp { M, MH };

std::string to_string(CheckOp op);

enum class Parity { Equal, Opposite };

/// The dealer's accept rule for one decoy pair: given the prepared Bell label
/// and the mirrored operation, are the two announced bits expected to be
/// equal or opposite?
Parity expected_parity(BellLabel label, CheckOp op);

// ---------------------------------------------------------------------------
// Session parameterization and dealer bookkeeping
// ---------------------------------------------------------------------------

struct SessionConfig {
    int participants = 3;           // M
    int secret_len = 16;            // N
    int decoys_per_participant = 16;  // K
    double abort_threshold = 0.0;   // fraction of failed checks tolerated
    std::uint64_t seed = 0;
    std::optional<Bits> secret;     // drawn from the dealer stream when absent

    int sequence_len() const { return 2 * secret_len + decoys_per_participant; }

    /// Throws InvalidArgument on any violated invariant.
    void validate() const;
};

/// Dealer-private tag of one transmitted slot.
struct SlotTag {
    bool is_decoy = false;
    int index = 0;  // message index j in [0,2N) or decoy index k in [0,K)
};

/// The 2N+K qubit handles sent to one participant, in slot order. Which slot
/// is message and which is decoy is known only through the dealer's ledger.
struct TransmittedSequence {
    int participant = 0;
    std::vector<qsim::QubitRef> slots;
};

/// Everything the dealer keeps track of across the four steps.
struct DealerLedger {
    Bits secret;                                  // S, length N
    Bits key;                                     // K_A, length 2N
    std::vector<std::size_t> secret_positions;    // ascending, size N
    std::vector<std::size_t> test_positions;      // ascending, size N
    std::vector<std::vector<std::size_t>> decoy_positions;  // per participant, ascending
    std::vector<std::vector<BellLabel>> decoy_labels;       // per participant, per pair
    std::vector<std::vector<qsim::QubitRef>> retained_halves;  // dealer's Bell halves
    std::vector<std::vector<SlotTag>> slot_tags;  // per participant, per slot

    /// Message index j held at `slot` of participant i, or -1 for decoys.
    int message_index_at(int participant, int slot) const;
};

/// One row of the step-3 public discussion.
struct PairCheck {
    int participant = 0;
    int pair_index = 0;
    BellLabel label = BellLabel::PhiPlus;
    CheckOp op = CheckOp::M;
    int dealer_bit = 0;
    int participant_bit = 0;
    bool pass = true;
};

struct DecoyCheckResult {
    double error_rate = 0.0;
    bool abort = false;
    std::vector<PairCheck> checks;
};

/// K_i per participant, each of length 2N.
using ShareSet = std::vector<Bits>;

// ---------------------------------------------------------------------------
// Step 01: encoding
// ---------------------------------------------------------------------------

struct EncodedKey {
    Bits key;                                   // K_A
    std::vector<std::size_t> secret_positions;  // where S sits inside K_A
    std::vector<std::size_t> test_positions;    // the inserted random bits
};

/// Embeds the secret into a double-length key: N fresh random bits are placed
/// at a uniformly random N-subset of the 2N positions, and the secret fills
/// the rest in order.
EncodedKey encode_secret(const Bits& secret, qsim::Rng& rng);

/// The M-qubit carrier of one key bit: (|+>^M + |->^M)/sqrt(2) for bit 0,
/// (|+>^M - |->^M)/sqrt(2) for bit 1; equivalently a uniform superposition of
/// the even- (resp. odd-) parity Z strings.
qsim::StateVector prepare_message_state(int bit, int participants);

/// Exact two-qubit Bell state; qubit 0 is the dealer's retained half, qubit 1
/// the transmitted half.
qsim::StateVector prepare_decoy_pair(BellLabel label);

// ---------------------------------------------------------------------------
// Step 02: sequence building
// ---------------------------------------------------------------------------

struct BuildResult {
    std::vector<TransmittedSequence> sequences;
    std::vector<std::vector<std::size_t>> decoy_positions;
    std::vector<std::vector<BellLabel>> decoy_labels;
    std::vector<std::vector<qsim::QubitRef>> retained_halves;
    std::vector<std::vector<SlotTag>> slot_tags;
};

/// Allocates all message states and decoy pairs in `store` and interleaves
/// decoy halves at uniformly random positions, independently per participant.
BuildResult build_sequences(const SessionConfig& config, const Bits& key, qsim::Rng& dealer_rng,
                            qsim::QubitStore& store);

// ---------------------------------------------------------------------------
// Step 03: eavesdropping check
// ---------------------------------------------------------------------------

/// Runs the mirrored M/MH check over every decoy pair. The participant draws
/// the operation, announces it, and measures; the dealer mirrors the
/// operation on her retained half. Throws ProtocolViolation if a received
/// sequence does not have 2N+K slots.
DecoyCheckResult run_decoy_check(const SessionConfig& config, const DealerLedger& ledger,
                                 const std::vector<TransmittedSequence>& sequences,
                                 qsim::QubitStore& store, qsim::Rng& dealer_rng,
                                 std::vector<qsim::Rng>& participant_rngs);

// ---------------------------------------------------------------------------
// Step 04: shares, validity, recovery
// ---------------------------------------------------------------------------

/// Every participant measures the 2N message slots in the Z basis, in slot
/// order, yielding K_i.
ShareSet measure_shares(const SessionConfig& config, const DealerLedger& ledger,
                        const std::vector<TransmittedSequence>& sequences, qsim::QubitStore& store,
                        std::vector<qsim::Rng>& participant_rngs);

/// True iff the XOR of all shares equals K_A at every test position.
bool validity_check(const DealerLedger& ledger, const ShareSet& shares);

/// XOR of shares at the secret positions, ascending. `validity_passed` must
/// be the outcome of validity_check; reconstruction after a failed check is a
/// ProtocolViolation.
Bits recover_secret(const DealerLedger& ledger, const ShareSet& shares, bool validity_passed);

} // namespace sqss
