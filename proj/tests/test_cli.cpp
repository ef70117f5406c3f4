#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sqss/adversary.hpp"

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Runs the CLI with stdout captured to a scratch file.
CmdResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string out_path = "cli_out_" + std::to_string(counter++) + ".txt";
    const std::string cmd = std::string(SQSS_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    std::remove(out_path.c_str());
    return r;
}

} // namespace

TEST_CASE("run: honest session exits 0 and recovers the secret") {
    const CmdResult r =
        run_cli("run --participants 3 --secret-len 8 --decoys 8 --adversary none --seed 7");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["aborted"] == false);
    CHECK(j["validity"] == true);
    CHECK(j["recovered"] == j["config"]["secret"]);
    CHECK(j["config"]["participants"] == 3);
}

TEST_CASE("run: identical invocations are byte-identical") {
    const std::string args =
        "run --participants 2 --secret-len 4 --decoys 3 --adversary dcna --seed 99";
    const CmdResult a = run_cli(args);
    const CmdResult b = run_cli(args);
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
}

TEST_CASE("run: exit code 2 signals an aborted or invalid session") {
    // CNOT taps on 3 pairs are detected with probability 1-(3/4)^3 ~ 0.58;
    // scan seeds for one aborted and one clean run and check the codes match
    bool saw_abort = false, saw_clean = false;
    for (int seed = 0; seed < 40 && !(saw_abort && saw_clean); ++seed) {
        const CmdResult r = run_cli("run --participants 3 --secret-len 2 --decoys 1 "
                                    "--adversary dcna --seed " + std::to_string(seed));
        const auto j = nlohmann::json::parse(r.out);
        const bool ok = j["aborted"] == false && j["validity"] == true;
        CHECK(r.exit_code == (ok ? 0 : 2));
        saw_abort |= !ok;
        saw_clean |= ok;
    }
    CHECK(saw_abort);
    CHECK(saw_clean);
}

TEST_CASE("run: collective requires a spec file and usage errors exit 1") {
    CHECK(run_cli("run --adversary collective").exit_code == 1);
    CHECK(run_cli("run --adversary martian").exit_code == 1);
    CHECK(run_cli("bogus-subcommand").exit_code == 1);
    CHECK(run_cli("run --secret-len 0").exit_code == 1);
}

TEST_CASE("run: text output summarizes the session") {
    const CmdResult r = run_cli("run --participants 2 --secret-len 2 --decoys 2 --seed 3 "
                                "--output text");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("recovered:") != std::string::npos);
}

TEST_CASE("sweep: CSV grid with exact oracle column") {
    const CmdResult r = run_cli("sweep --participants 2 --secret-len 2 --decoys 1 --decoys 2 "
                                "--adversary dcna --trials 300 --seed 5");
    REQUIRE(r.exit_code == 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "model,participants,secret_len,decoys,pairs,trials,detected_fraction,"
                    "standard_error,exact,paper_formula");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
        CHECK(line.rfind("dcna,2,2,", 0) == 0);
    }
    CHECK(rows == 2);

    CHECK(run_cli("sweep --trials 0").exit_code == 1);
}

TEST_CASE("table: text shows this scheme at 1/12 for three participants") {
    const CmdResult r = run_cli("table --participants 3 --output text");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("1/12") != std::string::npos);

    const CmdResult csv = run_cli("table --participants 2 --output csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.find("younes-2024,2,\"1/(3M)\",1/6") != std::string::npos);
    CHECK(csv.out.find("this-scheme,2,\"1/(4M)\",1/8") != std::string::npos);

    CHECK(run_cli("table --participants 1").exit_code == 1);
}

TEST_CASE("attack: tap analysis prints oracle and closed-form columns") {
    const CmdResult r = run_cli("attack --adversary dcna --participants 3 --decoys 1 --decoys 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("per-pair detection (uniform op):   0.25") != std::string::npos);
    CHECK(r.out.find("per-pair detection given op MH:    0.5") != std::string::npos);

    CHECK(run_cli("attack --adversary none").exit_code == 1);
}

TEST_CASE("attack: collusion statistics approach 2^-N") {
    const CmdResult r = run_cli("attack --adversary collusion --participants 2 "
                                "--collusion-secret-lens 1 --trials 400 --seed 11");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("secret_len,trials,success_fraction,standard_error,expected", 0) == 0);
    CHECK(r.out.find("\n1,400,") != std::string::npos);
}

TEST_CASE("attack: collective sweep emits spec rows") {
    const CmdResult r = run_cli("attack --adversary collective --sweep-count 10 --seed 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("index,kind,exact_detection,holevo_bits", 0) == 0);
    CHECK(r.out.find("corner-cnot") != std::string::npos);
    CHECK(r.out.find("informative-yet-undetectable: 0") != std::string::npos);
}

TEST_CASE("run: collective adversary loads a unitary spec file") {
    const std::string path = "cli_ue_spec.json";
    {
        std::ofstream out(path, std::ios::binary);
        out << sqss::adv::CollectiveSpec::cnot_equivalent().to_json();
    }
    const CmdResult r = run_cli("run --participants 2 --secret-len 2 --decoys 2 "
                                "--adversary collective --ue-spec " + path + " --seed 4");
    CHECK((r.exit_code == 0 || r.exit_code == 2));
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["config"]["adversary"] == "collective");
    CHECK(r.exit_code == ((j["aborted"] == false && j["validity"] == true) ? 0 : 2));

    // a broken spec file is a usage error
    {
        std::ofstream out(path, std::ios::binary);
        out << "{\"mode\":\"structured\"}";
    }
    CHECK(run_cli("run --adversary collective --ue-spec " + path).exit_code == 1);
    std::remove(path.c_str());
}
