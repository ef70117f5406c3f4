#include "sqss/harness.hpp"

#include <charconv>
#include <cmath>
#include <utility>

#include <json.hpp>

#include "sqss/errors.hpp"

namespace sqss::harness {

using qsim::cxd;
using qsim::GateSpec;
using qsim::Matrix;
using qsim::QubitRef;
using qsim::QubitStore;
using qsim::Rng;
using qsim::StateVector;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw InternalError("fmt_double: conversion failed");
    return std::string(buf, ptr);
}

std::vector<Rng> participant_streams(const Rng& root, int participants) {
    std::vector<Rng> streams;
    streams.reserve(static_cast<std::size_t>(participants));
    for (int i = 0; i < participants; ++i)
        streams.push_back(root.substream("participant/" + std::to_string(i)));
    return streams;
}

} // namespace

SessionReport run_session(const SessionConfig& config, const AdversaryConfig& adversary_cfg) {
    config.validate();
    if (adversary_cfg.kind == adv::Kind::Collective && !adversary_cfg.collective)
        throw InvalidArgument("run_session: collective adversary requires a CollectiveSpec");
    if (adversary_cfg.kind == adv::Kind::Collusion &&
        (adversary_cfg.honest_participant < 0 ||
         adversary_cfg.honest_participant >= config.participants))
        throw InvalidArgument("run_session: honest participant index out of range");

    const Rng root(config.seed);
    Rng dealer_rng = root.substream("dealer");
    std::vector<Rng> participant_rngs = participant_streams(root, config.participants);
    Rng adversary_rng = root.substream("adversary");

    SessionConfig cfg = config;
    if (!cfg.secret) cfg.secret = random_bits(dealer_rng, static_cast<std::size_t>(cfg.secret_len));
    const Bits& secret = *cfg.secret;

    QubitStore store;
    const EncodedKey encoded = encode_secret(secret, dealer_rng);
    BuildResult build = build_sequences(cfg, encoded.key, dealer_rng, store);

    SessionReport report;
    report.config = cfg;
    report.adversary = adversary_cfg.kind;
    report.dealer_qubits_allocated = store.qubits_allocated();

    DealerLedger ledger;
    ledger.secret = secret;
    ledger.key = encoded.key;
    ledger.secret_positions = encoded.secret_positions;
    ledger.test_positions = encoded.test_positions;
    ledger.decoy_positions = build.decoy_positions;
    ledger.decoy_labels = build.decoy_labels;
    ledger.retained_halves = build.retained_halves;
    ledger.slot_tags = build.slot_tags;
    report.ledger = ledger;

    auto adversary = adv::make_adversary(adversary_cfg.kind, adversary_cfg.collective);

    // step 3a: one-way transmission, tap applied per qubit in flight
    std::vector<TransmittedSequence> sequences = std::move(build.sequences);
    for (int i = 0; i < cfg.participants; ++i) {
        for (int slot = 0; slot < cfg.sequence_len(); ++slot) {
            report.transfers.push_back(ChannelTransfer{i, slot});
            QubitRef& held = sequences[static_cast<std::size_t>(i)].slots[static_cast<std::size_t>(slot)];
            held = adversary->tap(store, held, i, slot, adversary_rng);
        }
    }

    // step 3b: mirrored decoy check
    const DecoyCheckResult check =
        run_decoy_check(cfg, ledger, sequences, store, dealer_rng, participant_rngs);
    report.error_rate = check.error_rate;
    report.aborted = check.abort;
    report.per_pair_check_log = check.checks;

    if (report.aborted) return report;

    // step 4: shares, validity, recovery
    const ShareSet shares = measure_shares(cfg, ledger, sequences, store, participant_rngs);
    report.shares = shares;
    report.validity = validity_check(ledger, shares);
    if (report.validity) report.recovered = recover_secret(ledger, shares, true);

    // the dealer has announced decoy positions (step 3) and test positions
    // (step 4); adversaries with a readout procedure reconstruct now
    if (auto key_guess = adversary->guess_key(store, cfg, ledger.decoy_positions, adversary_rng)) {
        report.eve_key_guess = key_guess;
        report.eve_secret_guess = bits_at(*key_guess, ledger.secret_positions);
        report.eve_guess_correct = (*report.eve_secret_guess == secret);
    }
    if (adversary_cfg.kind == adv::Kind::Collusion) {
        std::vector<Bits> dishonest;
        for (int i = 0; i < cfg.participants; ++i)
            if (i != adversary_cfg.honest_participant)
                dishonest.push_back(shares[static_cast<std::size_t>(i)]);
        const adv::CollusionOutcome outcome =
            adv::collusion_guess(dishonest, ledger, adversary_rng);
        report.eve_secret_guess = outcome.secret_guess;
        report.eve_guess_correct = outcome.success;
    }
    return report;
}

namespace {

nlohmann::ordered_json config_json(const SessionConfig& cfg, adv::Kind adversary) {
    nlohmann::ordered_json j;
    j["participants"] = cfg.participants;
    j["secret_len"] = cfg.secret_len;
    j["decoys"] = cfg.decoys_per_participant;
    j["abort_threshold"] = cfg.abort_threshold;
    j["seed"] = cfg.seed;
    j["secret"] = cfg.secret ? nlohmann::ordered_json(bits_to_string(*cfg.secret))
                             : nlohmann::ordered_json(nullptr);
    j["adversary"] = adv::to_string(adversary);
    return j;
}

nlohmann::ordered_json checks_json(const std::vector<PairCheck>& checks) {
    auto arr = nlohmann::ordered_json::array();
    for (const PairCheck& c : checks) {
        nlohmann::ordered_json e;
        e["participant"] = c.participant;
        e["pair"] = c.pair_index;
        e["label"] = to_string(c.label);
        e["op"] = to_string(c.op);
        e["dealer_bit"] = c.dealer_bit;
        e["participant_bit"] = c.participant_bit;
        e["pass"] = c.pass;
        arr.push_back(std::move(e));
    }
    return arr;
}

nlohmann::ordered_json opt_bits_json(const std::optional<Bits>& bits) {
    return bits ? nlohmann::ordered_json(bits_to_string(*bits)) : nlohmann::ordered_json(nullptr);
}

} // namespace

std::string report_json(const SessionReport& report) {
    nlohmann::ordered_json j;
    j["config"] = config_json(report.config, report.adversary);
    j["aborted"] = report.aborted;
    j["error_rate"] = report.error_rate;
    j["validity"] = report.validity;
    j["recovered"] = opt_bits_json(report.recovered);
    j["eve_key_guess"] = opt_bits_json(report.eve_key_guess);
    j["eve_secret_guess"] = opt_bits_json(report.eve_secret_guess);
    j["eve_guess_correct"] = report.eve_guess_correct
                                 ? nlohmann::ordered_json(*report.eve_guess_correct)
                                 : nlohmann::ordered_json(nullptr);
    j["per_pair_check_log"] = checks_json(report.per_pair_check_log);
    return j.dump(2) + "\n";
}

std::string session_replay_json(const SessionReport& report) {
    nlohmann::ordered_json j;
    j["config"] = config_json(report.config, report.adversary);

    auto streams = nlohmann::ordered_json::array();
    streams.push_back("dealer");
    for (int i = 0; i < report.config.participants; ++i)
        streams.push_back("participant/" + std::to_string(i));
    streams.push_back("adversary");
    j["rng_substreams"] = streams;

    nlohmann::ordered_json t;
    t["key"] = bits_to_string(report.ledger.key);
    t["secret_positions"] = report.ledger.secret_positions;
    t["test_positions"] = report.ledger.test_positions;
    t["decoy_positions"] = report.ledger.decoy_positions;
    auto labels = nlohmann::ordered_json::array();
    for (const auto& per_participant : report.ledger.decoy_labels) {
        auto row = nlohmann::ordered_json::array();
        for (BellLabel l : per_participant) row.push_back(to_string(l));
        labels.push_back(std::move(row));
    }
    t["decoy_labels"] = labels;

    auto channel = nlohmann::ordered_json::array();
    for (const ChannelTransfer& tr : report.transfers) {
        nlohmann::ordered_json e;
        e["from"] = "dealer";
        e["to"] = tr.participant;
        e["slot"] = tr.slot;
        channel.push_back(std::move(e));
    }
    t["channel_log"] = channel;

    t["checks"] = checks_json(report.per_pair_check_log);
    t["error_rate"] = report.error_rate;
    t["aborted"] = report.aborted;
    t["validity"] = report.validity;
    if (report.shares) {
        auto arr = nlohmann::ordered_json::array();
        for (const Bits& share : *report.shares) arr.push_back(bits_to_string(share));
        t["shares"] = arr;
    } else {
        t["shares"] = nullptr;
    }
    t["recovered"] = opt_bits_json(report.recovered);
    j["transcript"] = std::move(t);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Exact oracle
// ---------------------------------------------------------------------------

namespace {

struct TapBranch {
    double weight = 1.0;
    StateVector state;            // dealer qubit is 0
    int participant_qubit = 1;    // qubit the participant ends up holding
};

std::vector<TapBranch> enumerate_tap_branches(const AdversaryConfig& adversary, BellLabel label) {
    const StateVector bell = prepare_decoy_pair(label);
    switch (adversary.kind) {
        case adv::Kind::None:
        case adv::Kind::Collusion:
            return {TapBranch{1.0, bell, 1}};
        case adv::Kind::Dcna:
            return {TapBranch{1.0, qsim::apply_cnot_with_fresh_ancilla(bell, 1), 1}};
        case adv::Kind::IrMeasure: {
            std::vector<TapBranch> branches;
            for (int b = 0; b < 2; ++b) {
                auto [prob, post] = qsim::collapse(bell, 1, b);
                if (prob > 0.0) branches.push_back(TapBranch{prob, std::move(post), 1});
            }
            return branches;
        }
        case adv::Kind::IrFake: {
            // the original transit qubit stays entangled with the dealer at
            // index 1; the forwarded fake qubit is appended at index 2
            std::vector<TapBranch> branches;
            const StateVector with_fake = qsim::append_zero_qubit(bell);
            branches.push_back(TapBranch{0.5, with_fake, 2});
            branches.push_back(
                TapBranch{0.5, qsim::apply_gate(with_fake, GateSpec::x(2)), 2});
            return branches;
        }
        case adv::Kind::Collective: {
            if (!adversary.collective)
                throw InvalidArgument("enumerate_tap_branches: missing CollectiveSpec");
            const GateSpec canonical = adv::build_collective_unitary(*adversary.collective);
            StateVector joint = bell;
            std::vector<int> targets{1};
            for (int i = 0; i < adversary.collective->ancilla_qubits(); ++i) {
                joint = qsim::append_zero_qubit(joint);
                targets.push_back(joint.num_qubits() - 1);
            }
            joint = qsim::apply_gate(joint, GateSpec::unitary(canonical.matrix, targets));
            return {TapBranch{1.0, std::move(joint), 1}};
        }
    }
    throw InternalError("enumerate_tap_branches: unknown adversary kind");
}

double branch_pass_mass(const TapBranch& branch, BellLabel label, CheckOp op) {
    StateVector s = branch.state;
    if (op == CheckOp::MH) {
        s = qsim::apply_gate(s, GateSpec::h(0));
        s = qsim::apply_gate(s, GateSpec::h(branch.participant_qubit));
    }
    const auto dist = qsim::outcome_distribution(s, {0, branch.participant_qubit});
    const Parity want = expected_parity(label, op);
    double mass = 0.0;
    for (const auto& [outcome, p] : dist) {
        const bool equal = outcome[0] == outcome[1];
        if ((want == Parity::Equal) == equal) mass += p;
    }
    return mass;
}

} // namespace

double exact_pair_escape_probability(const AdversaryConfig& adversary) {
    return 1.0 - 0.5 * (exact_pair_fail_probability(adversary, CheckOp::M) +
                        exact_pair_fail_probability(adversary, CheckOp::MH));
}

double exact_pair_fail_probability(const AdversaryConfig& adversary, CheckOp op) {
    static const BellLabel kLabels[] = {BellLabel::PhiPlus, BellLabel::PhiMinus,
                                        BellLabel::PsiPlus, BellLabel::PsiMinus};
    double pass = 0.0;
    for (BellLabel label : kLabels) {
        const auto branches = enumerate_tap_branches(adversary, label);
        double mass = 0.0;
        for (const TapBranch& branch : branches)
            mass += branch.weight * branch_pass_mass(branch, label, op);
        pass += 0.25 * mass;
    }
    return 1.0 - pass;
}

double exact_detection_probability(const AdversaryConfig& adversary, int pairs) {
    if (pairs < 0) throw InvalidArgument("exact_detection_probability: pairs must be >= 0");
    if (pairs == 0) return 0.0;
    const double escape = exact_pair_escape_probability(adversary);
    return 1.0 - std::pow(escape, pairs);
}

double paper_detection_formula(int decoys_per_participant) {
    if (decoys_per_participant < 0) throw InvalidArgument("paper_detection_formula: K must be >= 0");
    return 1.0 - std::pow(0.25, decoys_per_participant);
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

DetectionEstimate monte_carlo_detection(const SessionConfig& config,
                                        const AdversaryConfig& adversary, int trials) {
    if (trials < 1) throw InvalidArgument("monte_carlo_detection: trials must be >= 1");
    config.validate();

    const Rng root(config.seed);
    int detected = 0;
    for (int t = 0; t < trials; ++t) {
        SessionConfig cfg = config;
        cfg.seed = root.substream("trial/" + std::to_string(t)).seed();
        const SessionReport report = run_session(cfg, adversary);
        if (report.aborted) ++detected;
    }

    DetectionEstimate est;
    est.model = adversary.kind;
    est.decoys_per_participant = config.decoys_per_participant;
    est.pairs = config.participants * config.decoys_per_participant;
    est.trials = trials;
    est.detected_fraction = static_cast<double>(detected) / trials;
    est.standard_error =
        std::sqrt(est.detected_fraction * (1.0 - est.detected_fraction) / trials);
    est.exact_value = exact_detection_probability(adversary, est.pairs);
    est.paper_formula_value = paper_detection_formula(config.decoys_per_participant);
    return est;
}

DetectionEstimate monte_carlo_pair_detection(const AdversaryConfig& adversary, int pairs,
                                             int trials, std::uint64_t seed) {
    if (pairs < 1) throw InvalidArgument("monte_carlo_pair_detection: pairs must be >= 1");
    if (trials < 1) throw InvalidArgument("monte_carlo_pair_detection: trials must be >= 1");

    const Rng root(seed);
    int detected = 0;
    for (int t = 0; t < trials; ++t) {
        const Rng trial_root = root.substream("trial/" + std::to_string(t));
        Rng dealer = trial_root.substream("dealer");
        Rng participant = trial_root.substream("participant/0");
        Rng eve = trial_root.substream("adversary");
        auto eavesdropper = adv::make_adversary(adversary.kind, adversary.collective);

        bool fail = false;
        for (int p = 0; p < pairs && !fail; ++p) {
            QubitStore store;
            const auto label = static_cast<BellLabel>(dealer.index(4));
            const int g = store.add_group(prepare_decoy_pair(label));
            const QubitRef retained{g, 0};
            QubitRef held = eavesdropper->tap(store, QubitRef{g, 1}, 0, p, eve);

            const CheckOp op = participant.bit() ? CheckOp::MH : CheckOp::M;
            if (op == CheckOp::MH) store.apply_h(held);
            const int participant_bit = store.measure_z(held, participant);
            if (op == CheckOp::MH) store.apply_h(retained);
            const int dealer_bit = store.measure_z(retained, dealer);

            const bool equal = participant_bit == dealer_bit;
            fail = (expected_parity(label, op) == Parity::Equal) != equal;
        }
        if (fail) ++detected;
    }

    DetectionEstimate est;
    est.model = adversary.kind;
    est.decoys_per_participant = pairs;
    est.pairs = pairs;
    est.trials = trials;
    est.detected_fraction = static_cast<double>(detected) / trials;
    est.standard_error =
        std::sqrt(est.detected_fraction * (1.0 - est.detected_fraction) / trials);
    est.exact_value = exact_detection_probability(adversary, pairs);
    est.paper_formula_value = paper_detection_formula(pairs);
    return est;
}

// ---------------------------------------------------------------------------
// Information measures
// ---------------------------------------------------------------------------

double holevo_information(const std::vector<std::pair<double, Matrix>>& ensemble) {
    if (ensemble.empty()) throw InvalidArgument("holevo_information: empty ensemble");
    const std::size_t dim = ensemble.front().second.dim();
    double total = 0.0;
    for (const auto& [p, rho] : ensemble) {
        if (p < -1e-12) throw InvalidArgument("holevo_information: negative probability");
        if (rho.dim() != dim) throw InvalidArgument("holevo_information: mixed dimensions");
        if (!rho.is_density(1e-7)) throw InvalidArgument("holevo_information: invalid density operator");
        total += p;
    }
    if (std::abs(total - 1.0) > qsim::kTolNumeric)
        throw InvalidArgument("holevo_information: probabilities must sum to 1");

    Matrix average(dim);
    double mean_entropy = 0.0;
    for (const auto& [p, rho] : ensemble) {
        if (p <= 0.0) continue;
        average += rho.scaled(p);
        mean_entropy += p * qsim::von_neumann_entropy(rho);
    }
    return qsim::von_neumann_entropy(average) - mean_entropy;
}

std::vector<std::pair<double, Matrix>> dcna_message_ancilla_ensemble(int participants, int bit,
                                                                     int tapped_index) {
    const StateVector message = prepare_message_state(bit, participants);
    if (tapped_index < 0 || tapped_index >= participants)
        throw InvalidArgument("dcna_message_ancilla_ensemble: tapped index out of range");
    const StateVector tapped = qsim::apply_cnot_with_fresh_ancilla(message, tapped_index);
    const int ancilla = tapped.num_qubits() - 1;

    std::vector<std::pair<double, Matrix>> ensemble;
    for (int b = 0; b < 2; ++b) {
        auto [prob, post] = qsim::collapse(tapped, tapped_index, b);
        if (prob <= 0.0) continue;
        ensemble.emplace_back(prob, qsim::reduced_density(post, ancilla));
    }
    return ensemble;
}

double collective_max_holevo(const adv::CollectiveSpec& spec) {
    static const BellLabel kLabels[] = {BellLabel::PhiPlus, BellLabel::PhiMinus,
                                        BellLabel::PsiPlus, BellLabel::PsiMinus};
    const GateSpec canonical = adv::build_collective_unitary(spec);

    double worst = 0.0;
    for (BellLabel label : kLabels) {
        StateVector joint = prepare_decoy_pair(label);
        std::vector<int> targets{1};
        std::vector<int> ancillas;
        for (int i = 0; i < spec.ancilla_qubits(); ++i) {
            joint = qsim::append_zero_qubit(joint);
            targets.push_back(joint.num_qubits() - 1);
            ancillas.push_back(joint.num_qubits() - 1);
        }
        joint = qsim::apply_gate(joint, GateSpec::unitary(canonical.matrix, targets));

        for (CheckOp op : {CheckOp::M, CheckOp::MH}) {
            StateVector s = joint;
            if (op == CheckOp::MH) {
                s = qsim::apply_gate(s, GateSpec::h(0));
                s = qsim::apply_gate(s, GateSpec::h(1));
            }
            std::vector<std::pair<double, Matrix>> ensemble;
            for (int b = 0; b < 2; ++b) {
                auto [prob, post] = qsim::collapse(s, 1, b);
                if (prob <= 1e-15) continue;
                ensemble.emplace_back(prob, qsim::reduced_density_multi(post, ancillas));
            }
            // tiny renormalization guard; branch probabilities sum to 1
            double total = 0.0;
            for (auto& [p, rho] : ensemble) total += p;
            for (auto& [p, rho] : ensemble) p /= total;
            worst = std::max(worst, holevo_information(ensemble));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Collective sweep
// ---------------------------------------------------------------------------

std::vector<CollectiveSweepRow> collective_sweep(int random_draws, int zero_error_draws,
                                                 std::uint64_t seed) {
    if (random_draws < 0 || zero_error_draws < 0)
        throw InvalidArgument("collective_sweep: negative draw counts");
    Rng rng = Rng(seed).substream("collective-sweep");

    std::vector<std::pair<std::string, adv::CollectiveSpec>> specs;
    specs.emplace_back("corner-identity", adv::CollectiveSpec::identity_corner());
    specs.emplace_back("corner-cnot", adv::CollectiveSpec::cnot_equivalent());
    for (int i = 0; i < zero_error_draws; ++i)
        specs.emplace_back("zero-error", adv::CollectiveSpec::draw_zero_error(rng, i % 2 ? 4 : 2));
    const int structured = random_draws / 2;
    for (int i = 0; i < structured; ++i)
        specs.emplace_back("structured", adv::CollectiveSpec::draw_random_structured(rng, 4));
    for (int i = 0; i < random_draws - structured; ++i)
        specs.emplace_back("unitary", adv::CollectiveSpec::draw_random_unitary(rng));

    std::vector<CollectiveSweepRow> rows;
    rows.reserve(specs.size());
    int index = 0;
    for (auto& [kind, spec] : specs) {
        AdversaryConfig cfg;
        cfg.kind = adv::Kind::Collective;
        cfg.collective = spec;
        CollectiveSweepRow row;
        row.index = index++;
        row.kind = kind;
        row.exact_detection = exact_detection_probability(cfg, 1);
        row.holevo_bits = collective_max_holevo(spec);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Collusion statistics
// ---------------------------------------------------------------------------

CollusionEstimate monte_carlo_collusion(const SessionConfig& config, int trials) {
    if (trials < 1) throw InvalidArgument("monte_carlo_collusion: trials must be >= 1");
    config.validate();

    AdversaryConfig adversary;
    adversary.kind = adv::Kind::Collusion;

    const Rng root(config.seed);
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
        SessionConfig cfg = config;
        cfg.seed = root.substream("trial/" + std::to_string(t)).seed();
        const SessionReport report = run_session(cfg, adversary);
        if (report.eve_guess_correct && *report.eve_guess_correct) ++successes;
    }

    CollusionEstimate est;
    est.secret_len = config.secret_len;
    est.trials = trials;
    est.success_fraction = static_cast<double>(successes) / trials;
    est.standard_error =
        std::sqrt(est.success_fraction * (1.0 - est.success_fraction) / trials);
    est.expected = std::pow(0.5, config.secret_len);
    return est;
}

std::string detection_csv(const std::vector<DetectionEstimate>& rows, int participants,
                          int secret_len) {
    std::string out =
        "model,participants,secret_len,decoys,pairs,trials,detected_fraction,"
        "standard_error,exact,paper_formula\n";
    for (const DetectionEstimate& r : rows) {
        out += adv::to_string(r.model);
        out += ',';
        out += std::to_string(participants);
        out += ',';
        out += std::to_string(secret_len);
        out += ',';
        out += std::to_string(r.decoys_per_participant);
        out += ',';
        out += std::to_string(r.pairs);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += fmt_double(r.detected_fraction);
        out += ',';
        out += fmt_double(r.standard_error);
        out += ',';
        out += fmt_double(r.exact_value);
        out += ',';
        out += fmt_double(r.paper_formula_value);
        out += '\n';
    }
    return out;
}

} // namespace sqss::harness
