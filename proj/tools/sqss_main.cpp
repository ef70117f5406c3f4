// sqss: simulate the Bell-decoy semi-quantum secret-sharing scheme, mount
// channel attacks on it, and report detection/efficiency numbers.
//
// Exit codes: 0 completed protocol (or analysis), 2 protocol abort or failed
// validity check, 1 usage or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqss/efficiency.hpp"
#include "sqss/errors.hpp"
#include "sqss/harness.hpp"

namespace {

using sqss::Bits;
using sqss::SessionConfig;
using sqss::harness::AdversaryConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAbort = 2;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw sqss::InvalidArgument("cannot open output file '" + out_path + "'");
    out << text;
}

std::string fmt(double v) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf, buf + n);
}

AdversaryConfig make_adversary_config(const std::string& adversary, const std::string& ue_spec) {
    AdversaryConfig cfg;
    cfg.kind = sqss::adv::kind_from_string(adversary);
    if (cfg.kind == sqss::adv::Kind::Collective) {
        if (ue_spec.empty())
            throw sqss::InvalidArgument("--ue-spec is required when --adversary collective");
        cfg.collective = sqss::adv::CollectiveSpec::load_file(ue_spec);
    } else if (!ue_spec.empty()) {
        throw sqss::InvalidArgument("--ue-spec only applies to --adversary collective");
    }
    return cfg;
}

std::string run_text_summary(const sqss::harness::SessionReport& r) {
    std::string out;
    out += "participants: " + std::to_string(r.config.participants) + "\n";
    out += "secret:       " + sqss::bits_to_string(*r.config.secret) + "\n";
    out += "adversary:    " + sqss::adv::to_string(r.adversary) + "\n";
    out += "error rate:   " + fmt(r.error_rate) + "\n";
    out += std::string("aborted:      ") + (r.aborted ? "yes" : "no") + "\n";
    out += std::string("validity:     ") + (r.validity ? "pass" : "fail") + "\n";
    out += "recovered:    " + (r.recovered ? sqss::bits_to_string(*r.recovered) : "-") + "\n";
    if (r.eve_secret_guess)
        out += "eve guess:    " + sqss::bits_to_string(*r.eve_secret_guess) +
               (r.eve_guess_correct && *r.eve_guess_correct ? " (correct)" : " (wrong)") + "\n";
    return out;
}

int cmd_run(const SessionConfig& config, const AdversaryConfig& adversary,
            const std::string& output, const std::string& out_path,
            const std::string& replay_path) {
    const auto report = sqss::harness::run_session(config, adversary);
    if (output == "json")
        emit(sqss::harness::report_json(report), out_path);
    else if (output == "text")
        emit(run_text_summary(report), out_path);
    else
        throw sqss::InvalidArgument("run: --output must be json or text");
    if (!replay_path.empty())
        emit(sqss::harness::session_replay_json(report), replay_path);
    return (report.aborted || !report.validity) ? kExitAbort : kExitOk;
}

int cmd_sweep(SessionConfig config, const std::vector<std::string>& adversaries,
              const std::vector<int>& decoy_values, int trials, const std::string& ue_spec,
              const std::string& out_path) {
    std::vector<sqss::harness::DetectionEstimate> rows;
    const sqss::qsim::Rng root(config.seed);
    for (const std::string& name : adversaries) {
        const AdversaryConfig adversary = make_adversary_config(name, ue_spec);
        for (int k : decoy_values) {
            SessionConfig cfg = config;
            cfg.decoys_per_participant = k;
            cfg.seed = root.substream("sweep/" + name + "/" + std::to_string(k)).seed();
            rows.push_back(sqss::harness::monte_carlo_detection(cfg, adversary, trials));
        }
    }
    emit(sqss::harness::detection_csv(rows, config.participants, config.secret_len), out_path);
    return kExitOk;
}

int cmd_table(int participants, const std::string& output, const std::string& out_path) {
    const auto rows = sqss::eff::efficiency_table(participants);
    if (output == "csv")
        emit(sqss::eff::render_table_csv(rows, participants), out_path);
    else if (output == "text")
        emit(sqss::eff::render_table_text(rows, participants), out_path);
    else
        throw sqss::InvalidArgument("table: --output must be text or csv");
    return kExitOk;
}

int cmd_attack_taps(const std::string& name, const AdversaryConfig& adversary,
                    const SessionConfig& config, const std::vector<int>& decoy_values,
                    const std::string& out_path) {
    using namespace sqss::harness;
    std::string out = "attack analysis: " + name + "\n";
    const double fail_m = exact_pair_fail_probability(adversary, sqss::CheckOp::M);
    const double fail_mh = exact_pair_fail_probability(adversary, sqss::CheckOp::MH);
    const double per_pair = exact_detection_probability(adversary, 1);
    out += "per-pair detection (uniform op):   " + fmt(per_pair) + "\n";
    out += "per-pair detection given op M:     " + fmt(fail_m) + "\n";
    out += "per-pair detection given op MH:    " + fmt(fail_mh) + "\n";
    out += "totals over tapped pairs (M = " + std::to_string(config.participants) +
           " participants):\n";
    out += "decoys_per_participant,total_pairs,oracle_detection,closed_form_1_minus_quarter_pow_K\n";
    for (int k : decoy_values) {
        const int pairs = config.participants * k;
        out += std::to_string(k) + "," + std::to_string(pairs) + "," +
               fmt(exact_detection_probability(adversary, pairs)) + "," +
               fmt(paper_detection_formula(k)) + "\n";
    }
    if (adversary.kind == sqss::adv::Kind::Dcna) {
        const auto ensemble =
            dcna_message_ancilla_ensemble(config.participants, 0, 0);
        out += "ancilla information about a tapped message bit: " +
               fmt(holevo_information(ensemble)) + " bits\n";
    }
    emit(out, out_path);
    return kExitOk;
}

int cmd_attack_collective(int sweep_count, std::uint64_t seed, const std::string& out_path) {
    const auto rows = sqss::harness::collective_sweep(sweep_count, 20, seed);
    std::string out = "index,kind,exact_detection,holevo_bits\n";
    int zero_error_with_info = 0;
    int informative_undetectable = 0;
    for (const auto& r : rows) {
        out += std::to_string(r.index) + "," + r.kind + "," + fmt(r.exact_detection) + "," +
               fmt(r.holevo_bits) + "\n";
        if (r.exact_detection < 1e-9 && r.holevo_bits >= 1e-6) ++zero_error_with_info;
        if (r.holevo_bits > 0.01 && r.exact_detection <= 0.0) ++informative_undetectable;
    }
    out += "# specs: " + std::to_string(rows.size()) +
           ", zero-error-with-information: " + std::to_string(zero_error_with_info) +
           ", informative-yet-undetectable: " + std::to_string(informative_undetectable) + "\n";
    emit(out, out_path);
    return kExitOk;
}

int cmd_attack_collusion(const SessionConfig& config, const std::vector<int>& secret_lens,
                         int trials, const std::string& out_path) {
    std::string out = "secret_len,trials,success_fraction,standard_error,expected\n";
    const sqss::qsim::Rng root(config.seed);
    for (int n : secret_lens) {
        SessionConfig cfg = config;
        cfg.secret_len = n;
        cfg.secret.reset();
        cfg.seed = root.substream("collusion/" + std::to_string(n)).seed();
        const auto est = sqss::harness::monte_carlo_collusion(cfg, trials);
        out += std::to_string(est.secret_len) + "," + std::to_string(est.trials) + "," +
               fmt(est.success_fraction) + "," + fmt(est.standard_error) + "," +
               fmt(est.expected) + "\n";
    }
    emit(out, out_path);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-quantum secret sharing simulator and attack harness"};
    app.require_subcommand(1);

    int participants = 3;
    int secret_len = 16;
    int decoys = 16;
    double abort_threshold = 0.0;
    std::uint64_t seed = 0;
    std::string secret_bits;
    std::string adversary = "none";
    std::string ue_spec;
    std::string run_output = "json";
    std::string table_output = "text";
    std::string out_path;
    int trials = 10000;
    std::vector<int> decoy_values{1, 2, 4};
    std::vector<std::string> sweep_adversaries{"dcna", "ir-measure", "ir-fake"};
    std::vector<int> secret_lens{1, 2, 4, 8};
    int sweep_count = 200;

    auto add_session_flags = [&](CLI::App* cmd) {
        cmd->add_option("-m,--participants", participants, "participant count M");
        cmd->add_option("-n,--secret-len", secret_len, "secret length N in bits");
        cmd->add_option("--seed", seed, "session seed (64-bit)");
        cmd->add_option("--abort-threshold", abort_threshold, "tolerated failed-check fraction");
        cmd->add_option("-o,--out", out_path, "write output to a file instead of stdout");
    };

    CLI::App* run = app.add_subcommand("run", "run one session and print its report");
    add_session_flags(run);
    run->add_option("-k,--decoys", decoys, "decoy Bell pairs per participant K");
    run->add_option("--secret", secret_bits, "explicit secret bits (otherwise drawn from the seed)");
    run->add_option("--adversary", adversary, "none|dcna|ir-measure|ir-fake|collective|collusion");
    run->add_option("--ue-spec", ue_spec, "collective-attack unitary spec (JSON file)");
    run->add_option("--output", run_output, "json|text");
    std::string replay_path;
    run->add_option("--replay", replay_path, "also write the full session replay JSON here");

    CLI::App* sweep = app.add_subcommand("sweep", "detection sweep: adversary x decoys, CSV");
    add_session_flags(sweep);
    sweep->add_option("--adversary", sweep_adversaries, "adversaries to sweep");
    sweep->add_option("-k,--decoys", decoy_values, "decoy counts to sweep");
    sweep->add_option("-t,--trials", trials, "Monte Carlo sessions per grid point");
    sweep->add_option("--ue-spec", ue_spec, "collective-attack unitary spec (JSON file)");

    CLI::App* attack = app.add_subcommand("attack", "per-attack analysis report");
    add_session_flags(attack);
    attack->add_option("--adversary", adversary, "dcna|ir-measure|ir-fake|collective|collusion");
    attack->add_option("-k,--decoys", decoy_values, "decoy counts for the totals table");
    attack->add_option("-t,--trials", trials, "trials for collusion statistics");
    attack->add_option("--ue-spec", ue_spec, "collective-attack unitary spec (JSON file)");
    attack->add_option("--sweep-count", sweep_count, "random specs for the collective sweep");
    attack->add_option("--collusion-secret-lens", secret_lens, "secret lengths for collusion");

    CLI::App* table = app.add_subcommand("table", "qubit-efficiency comparison table");
    table->add_option("-m,--participants", participants, "participant count M");
    table->add_option("--output", table_output, "text|csv");
    table->add_option("-o,--out", out_path, "write output to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(run)) {
            SessionConfig config{participants, secret_len, decoys, abort_threshold, seed,
                                 std::nullopt};
            if (!secret_bits.empty()) config.secret = sqss::parse_bits(secret_bits);
            return cmd_run(config, make_adversary_config(adversary, ue_spec), run_output,
                           out_path, replay_path);
        }
        if (app.got_subcommand(sweep)) {
            SessionConfig config{participants, secret_len, decoys, abort_threshold, seed,
                                 std::nullopt};
            return cmd_sweep(config, sweep_adversaries, decoy_values, trials, ue_spec, out_path);
        }
        if (app.got_subcommand(attack)) {
            SessionConfig config{participants, secret_len, decoys, abort_threshold, seed,
                                 std::nullopt};
            const auto kind = sqss::adv::kind_from_string(adversary);
            if (kind == sqss::adv::Kind::Collective)
                return cmd_attack_collective(sweep_count, seed, out_path);
            if (kind == sqss::adv::Kind::Collusion)
                return cmd_attack_collusion(config, secret_lens, trials, out_path);
            if (kind == sqss::adv::Kind::None)
                throw sqss::InvalidArgument("attack: pick an adversary to analyze");
            return cmd_attack_taps(adversary, make_adversary_config(adversary, ue_spec), config,
                                   decoy_values, out_path);
        }
        if (app.got_subcommand(table)) {
            return cmd_table(participants, table_output, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
