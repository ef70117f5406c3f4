#include "sqss/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sqss/errors.hpp"

namespace sqss {

using qsim::cxd;
using qsim::QubitRef;
using qsim::StateVector;

std::string to_string(BellLabel label) {
    switch (label) {
        case BellLabel::PhiPlus: return "phi+";
        case BellLabel::PhiMinus: return "phi-";
        case BellLabel::PsiPlus: return "psi+";
        case BellLabel::PsiMinus: return "psi-";
    }
    throw InternalError("to_string: unknown Bell label");
}

BellLabel bell_label_from_string(std::string_view text) {
    if (text == "phi+") return BellLabel::PhiPlus;
    if (text == "phi-") return BellLabel::PhiMinus;
    if (text == "psi+") return BellLabel::PsiPlus;
    if (text == "psi-") return BellLabel::PsiMinus;
    throw InvalidArgument("bell_label_from_string: unknown label '" + std::string(text) + "'");
}

std::string to_string(CheckOp op) {
    return op == CheckOp::M ? "M" : "MH";
}

Parity expected_parity(BellLabel label, CheckOp op) {
    // Z outcomes of phi+/phi- agree and of psi+/psi- disagree. Conjugating by
    // H (x) H fixes phi+ and psi- (up to phase) and swaps phi- with psi+, so
    // under MH exactly the phi-/psi+ rows flip their parity.
    switch (label) {
        case BellLabel::PhiPlus: return Parity::Equal;
        case BellLabel::PhiMinus: return op == CheckOp::M ? Parity::Equal : Parity::Opposite;
        case BellLabel::PsiPlus: return op == CheckOp::M ? Parity::Opposite : Parity::Equal;
        case BellLabel::PsiMinus: return Parity::Opposite;
    }
    throw InternalError("expected_parity: unknown Bell label");
}

void SessionConfig::validate() const {
    if (participants < 2) throw InvalidArgument("SessionConfig: need at least 2 participants");
    if (participants > 16) throw InvalidArgument("SessionConfig: at most 16 participants supported");
    if (secret_len < 1) throw InvalidArgument("SessionConfig: secret length must be >= 1");
    if (decoys_per_participant < 1) throw InvalidArgument("SessionConfig: need at least 1 decoy pair");
    if (!(abort_threshold >= 0.0 && abort_threshold < 1.0))
        throw InvalidArgument("SessionConfig: abort threshold must lie in [0, 1)");
    if (secret && static_cast<int>(secret->size()) != secret_len)
        throw InvalidArgument("SessionConfig: explicit secret length disagrees with secret_len");
}

int DealerLedger::message_index_at(int participant, int slot) const {
    const auto& tags = slot_tags.at(static_cast<std::size_t>(participant));
    const SlotTag& tag = tags.at(static_cast<std::size_t>(slot));
    return tag.is_decoy ? -1 : tag.index;
}

EncodedKey encode_secret(const Bits& secret, qsim::Rng& rng) {
    if (secret.empty()) throw InvalidArgument("encode_secret: secret must not be empty");
    const std::size_t n = secret.size();

    EncodedKey out;
    out.test_positions = rng.sample_sorted(2 * n, n);
    out.key.assign(2 * n, 0);

    std::vector<bool> is_test(2 * n, false);
    for (std::size_t p : out.test_positions) is_test[p] = true;

    std::size_t next_secret = 0;
    for (std::size_t p = 0; p < 2 * n; ++p) {
        if (is_test[p]) {
            out.key[p] = static_cast<std::uint8_t>(rng.bit());
        } else {
            out.key[p] = secret[next_secret++];
            out.secret_positions.push_back(p);
        }
    }
    return out;
}

StateVector prepare_message_state(int bit, int participants) {
    if (bit != 0 && bit != 1) throw InvalidArgument("prepare_message_state: bit must be 0 or 1");
    if (participants < 2 || participants > 16)
        throw InvalidArgument("prepare_message_state: participant count out of range [2,16]");

    const std::size_t dim = std::size_t{1} << participants;
    const double amp = std::pow(2.0, -0.5 * (participants - 1));
    std::vector<cxd> amps(dim, cxd{0.0, 0.0});
    for (std::size_t i = 0; i < dim; ++i)
        if ((std::popcount(i) & 1) == bit) amps[i] = amp;
    return StateVector::from_amplitudes(std::move(amps));
}

StateVector prepare_decoy_pair(BellLabel label) {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cxd> amps(4, cxd{0.0, 0.0});
    switch (label) {
        case BellLabel::PhiPlus:
            amps[0b00] = r;
            amps[0b11] = r;
            break;
        case BellLabel::PhiMinus:
            amps[0b00] = r;
            amps[0b11] = -r;
            break;
        case BellLabel::PsiPlus:
            amps[0b01] = r;
            amps[0b10] = r;
            break;
        case BellLabel::PsiMinus:
            amps[0b01] = r;
            amps[0b10] = -r;
            break;
    }
    return StateVector::from_amplitudes(std::move(amps));
}

BuildResult build_sequences(const SessionConfig& config, const Bits& key, qsim::Rng& dealer_rng,
                            qsim::QubitStore& store) {
    config.validate();
    const int m = config.participants;
    const int n = config.secret_len;
    const int k = config.decoys_per_participant;
    if (static_cast<int>(key.size()) != 2 * n)
        throw InvalidArgument("build_sequences: key must have length 2N");

    BuildResult out;
    out.sequences.resize(static_cast<std::size_t>(m));
    out.decoy_positions.resize(static_cast<std::size_t>(m));
    out.decoy_labels.resize(static_cast<std::size_t>(m));
    out.retained_halves.resize(static_cast<std::size_t>(m));
    out.slot_tags.resize(static_cast<std::size_t>(m));

    // message states: qubit i of state j belongs to participant i's slot
    // carrying message index j
    std::vector<int> message_groups(static_cast<std::size_t>(2 * n));
    for (int j = 0; j < 2 * n; ++j)
        message_groups[static_cast<std::size_t>(j)] =
            store.add_group(prepare_message_state(key[static_cast<std::size_t>(j)], m));

    const int seq_len = config.sequence_len();
    for (int i = 0; i < m; ++i) {
        auto& seq = out.sequences[static_cast<std::size_t>(i)];
        seq.participant = i;
        seq.slots.assign(static_cast<std::size_t>(seq_len), QubitRef{});
        auto& tags = out.slot_tags[static_cast<std::size_t>(i)];
        tags.assign(static_cast<std::size_t>(seq_len), SlotTag{});

        auto positions = dealer_rng.sample_sorted(static_cast<std::size_t>(seq_len),
                                                  static_cast<std::size_t>(k));
        out.decoy_positions[static_cast<std::size_t>(i)] = positions;

        std::vector<bool> is_decoy(static_cast<std::size_t>(seq_len), false);
        for (std::size_t p : positions) is_decoy[p] = true;

        for (int pair = 0; pair < k; ++pair) {
            const auto label = static_cast<BellLabel>(dealer_rng.index(4));
            out.decoy_labels[static_cast<std::size_t>(i)].push_back(label);
            const int g = store.add_group(prepare_decoy_pair(label));
            out.retained_halves[static_cast<std::size_t>(i)].push_back(QubitRef{g, 0});
            const std::size_t slot = positions[static_cast<std::size_t>(pair)];
            seq.slots[slot] = QubitRef{g, 1};
            tags[slot] = SlotTag{true, pair};
        }

        int next_message = 0;
        for (int slot = 0; slot < seq_len; ++slot) {
            if (is_decoy[static_cast<std::size_t>(slot)]) continue;
            seq.slots[static_cast<std::size_t>(slot)] =
                QubitRef{message_groups[static_cast<std::size_t>(next_message)], i};
            tags[static_cast<std::size_t>(slot)] = SlotTag{false, next_message};
            ++next_message;
        }
    }
    return out;
}

DecoyCheckResult run_decoy_check(const SessionConfig& config, const DealerLedger& ledger,
                                 const std::vector<TransmittedSequence>& sequences,
                                 qsim::QubitStore& store, qsim::Rng& dealer_rng,
                                 std::vector<qsim::Rng>& participant_rngs) {
    const int m = config.participants;
    const int k = config.decoys_per_participant;
    if (static_cast<int>(sequences.size()) != m)
        throw ProtocolViolation("run_decoy_check: wrong number of sequences");
    for (const auto& seq : sequences)
        if (static_cast<int>(seq.slots.size()) != config.sequence_len())
            throw ProtocolViolation("run_decoy_check: sequence length mismatch");

    DecoyCheckResult result;
    int failures = 0;
    for (int i = 0; i < m; ++i) {
        auto& prng = participant_rngs[static_cast<std::size_t>(i)];
        for (int pair = 0; pair < k; ++pair) {
            const std::size_t slot = ledger.decoy_positions[static_cast<std::size_t>(i)]
                                                           [static_cast<std::size_t>(pair)];
            const QubitRef held = sequences[static_cast<std::size_t>(i)].slots[slot];
            const QubitRef retained =
                ledger.retained_halves[static_cast<std::size_t>(i)][static_cast<std::size_t>(pair)];
            const BellLabel label =
                ledger.decoy_labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(pair)];

            // participant draws and announces the op, then measures; the
            // dealer mirrors it on her retained half
            const CheckOp op = prng.bit() ? CheckOp::MH : CheckOp::M;
            if (op == CheckOp::MH) store.apply_h(held);
            const int participant_bit = store.measure_z(held, prng);
            if (op == CheckOp::MH) store.apply_h(retained);
            const int dealer_bit = store.measure_z(retained, dealer_rng);

            const bool equal = participant_bit == dealer_bit;
            const bool pass = (expected_parity(label, op) == Parity::Equal) == equal;
            if (!pass) ++failures;
            result.checks.push_back(PairCheck{i, pair, label, op, dealer_bit, participant_bit, pass});
        }
    }
    result.error_rate = static_cast<double>(failures) / (static_cast<double>(m) * k);
    result.abort = result.error_rate > config.abort_threshold;
    return result;
}

ShareSet measure_shares(const SessionConfig& config, const DealerLedger& ledger,
                        const std::vector<TransmittedSequence>& sequences, qsim::QubitStore& store,
                        std::vector<qsim::Rng>& participant_rngs) {
    const int m = config.participants;
    ShareSet shares(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        auto& prng = participant_rngs[static_cast<std::size_t>(i)];
        Bits& share = shares[static_cast<std::size_t>(i)];
        share.assign(static_cast<std::size_t>(2 * config.secret_len), 0);
        for (int slot = 0; slot < config.sequence_len(); ++slot) {
            const int j = ledger.message_index_at(i, slot);
            if (j < 0) continue;
            const QubitRef held = sequences[static_cast<std::size_t>(i)].slots[static_cast<std::size_t>(slot)];
            share[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(store.measure_z(held, prng));
        }
    }
    return shares;
}

bool validity_check(const DealerLedger& ledger, const ShareSet& shares) {
    for (std::size_t t : ledger.test_positions) {
        std::uint8_t acc = 0;
        for (const Bits& share : shares) acc ^= share.at(t);
        if (acc != ledger.key.at(t)) return false;
    }
    return true;
}

Bits recover_secret(const DealerLedger& ledger, const ShareSet& shares, bool validity_passed) {
    if (!validity_passed)
        throw ProtocolViolation("recover_secret: reconstruction after a failed validity check");
    Bits out;
    out.reserve(ledger.secret_positions.size());
    for (std::size_t p : ledger.secret_positions) {
        std::uint8_t acc = 0;
        for (const Bits& share : shares) acc ^= share.at(p);
        out.push_back(acc);
    }
    return out;
}

} // namespace sqss
