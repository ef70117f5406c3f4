#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqss/adversary.hpp"
#include "sqss/protocol.hpp"

namespace sqss::harness {

/// How a session is attacked.
struct AdversaryConfig {
    adv::Kind kind = adv::Kind::None;
    std::optional<adv::CollectiveSpec> collective;  // required iff kind == Collective
    int honest_participant = 0;                     // collusion: whose share is withheld
};

/// One quantum transfer over the channel. The channel is one-way by
/// construction: every transfer originates at the dealer.
struct ChannelTransfer {
    int participant = 0;
    int slot = 0;
};

/// Full classical summary of one session.
struct SessionReport {
    SessionConfig config;  // echo, with the secret materialized
    adv::Kind adversary = adv::Kind::None;
    bool aborted = false;
    double error_rate = 0.0;
    bool validity = false;
    std::optional<Bits> recovered;
    std::optional<Bits> eve_key_guess;     // adversary's K_A reconstruction
    std::optional<Bits> eve_secret_guess;  // restricted to the secret positions
    std::optional<bool> eve_guess_correct;
    std::vector<PairCheck> per_pair_check_log;

    // replay / verification extras beyond the summary fields
    DealerLedger ledger;
    std::optional<ShareSet> shares;
    std::vector<ChannelTransfer> transfers;
    std::int64_t dealer_qubits_allocated = 0;
};

/// Executes the four steps end to end: encode, build, transmit (with taps),
/// decoy check, then shares / validity / recovery unless aborted.
/// Deterministic given (config, adversary, seed).
SessionReport run_session(const SessionConfig& config, const AdversaryConfig& adversary);

/// Fixed-key-order JSON rendering of a report (see README for the order).
std::string report_json(const SessionReport& report);

/// Replay record for golden tests: config, the rng substream labels consumed,
/// and the full classical transcript.
std::string session_replay_json(const SessionReport& report);

// ---------------------------------------------------------------------------
// Detection: Monte Carlo against the exact oracle
// ---------------------------------------------------------------------------

struct DetectionEstimate {
    adv::Kind model = adv::Kind::None;
    int decoys_per_participant = 0;  // K
    int pairs = 0;                   // tapped pairs accounted by the oracle
    int trials = 0;
    double detected_fraction = 0.0;
    double standard_error = 0.0;
    double exact_value = 0.0;        // oracle: 1 - escape^pairs
    double paper_formula_value = 0.0;  // 1 - (1/4)^K, reported side by side
};

/// Fraction of `trials` independent sessions that abort at the decoy check.
/// Oracle column uses pairs = M*K (all tapped pairs in a session).
DetectionEstimate monte_carlo_detection(const SessionConfig& config,
                                        const AdversaryConfig& adversary, int trials);

/// Detection frequency over `trials`, each simulating `pairs` tapped decoy
/// checks (quantum-exact sampling, any failed pair counts as detected).
DetectionEstimate monte_carlo_pair_detection(const AdversaryConfig& adversary, int pairs,
                                             int trials, std::uint64_t seed);

/// Exact escape probability of a single tapped decoy check, enumerated over
/// Bell label x op choice x measurement branches with exact amplitudes.
double exact_pair_escape_probability(const AdversaryConfig& adversary);

/// Exact failure probability of one tapped decoy check conditional on both
/// parties applying `op` (uniform over the four Bell labels).
double exact_pair_fail_probability(const AdversaryConfig& adversary, CheckOp op);

/// 1 - escape^pairs, with escape from exact_pair_escape_probability.
double exact_detection_probability(const AdversaryConfig& adversary, int pairs);

/// The closed form 1 - (1/4)^K, kept verbatim for side-by-side reporting.
double paper_detection_formula(int decoys_per_participant);

// ---------------------------------------------------------------------------
// Information measures
// ---------------------------------------------------------------------------

/// Holevo bound chi = S(sum p_i rho_i) - sum p_i S(rho_i), in bits.
double holevo_information(const std::vector<std::pair<double, qsim::Matrix>>& ensemble);

/// Ensemble of the CNOT-tap ancilla conditioned on the tapped participant's
/// Z outcome, for a message state encoding `bit` across `participants`.
std::vector<std::pair<double, qsim::Matrix>> dcna_message_ancilla_ensemble(int participants,
                                                                           int bit,
                                                                           int tapped_index);

/// Largest Holevo information (over the four Bell labels and both check ops)
/// that a collective-attack ancilla carries about a participant's decoy bit.
double collective_max_holevo(const adv::CollectiveSpec& spec);

// ---------------------------------------------------------------------------
// Collective sweep
// ---------------------------------------------------------------------------

struct CollectiveSweepRow {
    int index = 0;
    std::string kind;  // "corner-identity", "corner-cnot", "zero-error", "structured", "unitary"
    double exact_detection = 0.0;  // per-pair
    double holevo_bits = 0.0;
};

/// The two structured corner cases, `zero_error` phase-only draws, and
/// `random_draws` split between structured and random-unitary modes.
std::vector<CollectiveSweepRow> collective_sweep(int random_draws, int zero_error_draws,
                                                 std::uint64_t seed);

// ---------------------------------------------------------------------------
// Collusion statistics
// ---------------------------------------------------------------------------

struct CollusionEstimate {
    int secret_len = 0;
    int trials = 0;
    double success_fraction = 0.0;
    double standard_error = 0.0;
    double expected = 0.0;  // 2^-N
};

/// Success rate of M-1 colluding participants guessing the full secret over
/// `trials` honest sessions.
CollusionEstimate monte_carlo_collusion(const SessionConfig& config, int trials);

/// CSV rendering for sweeps (fixed column set, see README).
std::string detection_csv(const std::vector<DetectionEstimate>& rows, int participants,
                          int secret_len);

} // namespace sqss::harness
