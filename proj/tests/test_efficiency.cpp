#include <doctest.h>

#include <sstream>

#include "sqss/efficiency.hpp"
#include "sqss/errors.hpp"
#include "sqss/harness.hpp"

using namespace sqss;
using eff::ProtocolId;
using eff::Rational;

TEST_CASE("rationals normalize and compare exactly") {
    CHECK(Rational::of(2, 24) == Rational::of(1, 12));
    CHECK(Rational::of(1, -12) == Rational::of(-1, 12));
    CHECK(Rational::of(1, 12).to_string() == "1/12");
    CHECK(Rational::of(3, 1).to_string() == "3");
    CHECK(Rational::of(1, 13).less_than(Rational::of(1, 12)));
    CHECK_THROWS_AS(Rational::of(1, 0), InvalidArgument);
}

TEST_CASE("per-scheme efficiency values") {
    CHECK(eff::qubit_efficiency(ProtocolId::ThisWork, 3) == Rational::of(1, 12));
    CHECK(eff::qubit_efficiency(ProtocolId::Li2010, 2) == Rational::of(1, 32));
    CHECK(eff::qubit_efficiency(ProtocolId::Yang2013, 4) == Rational::of(1, 24));
    CHECK(eff::qubit_efficiency(ProtocolId::Yu2017, 5) == Rational::of(1, 34));
    CHECK(eff::qubit_efficiency(ProtocolId::Li2013, 3) == Rational::of(1, 72));
    CHECK(eff::qubit_efficiency(ProtocolId::Xie2015, 3) == Rational::of(1, 44));
    CHECK(eff::qubit_efficiency(ProtocolId::Li2020, 3) == Rational::of(1, 15));
    CHECK_THROWS_AS(eff::qubit_efficiency(ProtocolId::ThisWork, 1), InvalidArgument);
    // the power-of-two denominators overflow eventually and must say so
    CHECK_THROWS_AS(eff::qubit_efficiency(ProtocolId::Li2010, 80), InvalidArgument);
}

TEST_CASE("qubit count is (2N+2K)M and matches real allocations") {
    CHECK(eff::this_work_qubit_count(4, 4, 3) == 48);
    CHECK(eff::this_work_qubit_count(1, 1, 2) == 8);
    CHECK_THROWS_AS(eff::this_work_qubit_count(0, 1, 2), InvalidArgument);

    // with K=N the efficiency is N / count
    CHECK(Rational::of(4, eff::this_work_qubit_count(4, 4, 3)) ==
          eff::qubit_efficiency(ProtocolId::ThisWork, 3));

    qsim::Rng seeds(606);
    for (int trial = 0; trial < 5; ++trial) {
        SessionConfig cfg;
        cfg.participants = 2 + static_cast<int>(seeds.index(3));
        cfg.secret_len = 1 + static_cast<int>(seeds.index(8));
        cfg.decoys_per_participant = 1 + static_cast<int>(seeds.index(8));
        cfg.seed = seeds.next_u64();
        const auto report = harness::run_session(cfg, harness::AdversaryConfig{});
        CHECK(report.dealer_qubits_allocated ==
              eff::this_work_qubit_count(cfg.secret_len, cfg.decoys_per_participant,
                                         cfg.participants));
    }
}

TEST_CASE("comparison table reproduces the fixed rows in order") {
    const auto rows = eff::efficiency_table(2);
    REQUIRE(rows.size() == 9);
    CHECK(rows.front().id == ProtocolId::Li2010);
    CHECK(rows.back().id == ProtocolId::ThisWork);
    CHECK(rows.back().efficiency == Rational::of(1, 8));
    CHECK(rows[7].id == ProtocolId::Younes2024);
    CHECK(rows[7].efficiency == Rational::of(1, 6));
    CHECK(rows[6].id == ProtocolId::Ye2024);
    CHECK(rows[6].efficiency == Rational::of(1, 7));

    // feature flags: only the last two mitigate the Trojan horse; only
    // Younes2024 fails to mitigate the CNOT coupling
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].mitigates_trojan_horse == (i >= 7));
        CHECK(rows[i].mitigates_dcna == (rows[i].id != ProtocolId::Younes2024));
    }
    CHECK_THROWS_AS(eff::efficiency_table(1), InvalidArgument);
}

TEST_CASE("this scheme's efficiency strictly decreases with more participants") {
    for (int m = 2; m < 64; ++m) {
        CHECK(eff::qubit_efficiency(ProtocolId::ThisWork, m + 1)
                  .less_than(eff::qubit_efficiency(ProtocolId::ThisWork, m)));
    }
}

TEST_CASE("CSV round-trips to identical rationals") {
    const auto rows = eff::efficiency_table(3);
    const std::string csv = eff::render_table_csv(rows, 3);

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        REQUIRE(row_index < rows.size());
        // protocol id is the first field, efficiency the fourth
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            else if (c == ',' && !quoted) {
                fields.push_back(field);
                field.clear();
            } else field.push_back(c);
        }
        fields.push_back(field);
        REQUIRE(fields.size() == 7);
        CHECK(eff::protocol_id_from_string(fields[0]) == rows[row_index].id);
        const auto slash = fields[3].find('/');
        const Rational parsed =
            slash == std::string::npos
                ? Rational::of(std::stoll(fields[3]), 1)
                : Rational::of(std::stoll(fields[3].substr(0, slash)),
                               std::stoll(fields[3].substr(slash + 1)));
        CHECK(parsed == rows[row_index].efficiency);
        ++row_index;
    }
    CHECK(row_index == rows.size());

    const std::string text = eff::render_table_text(rows, 3);
    CHECK(text.find("1/12") != std::string::npos);
    CHECK_THROWS_AS(eff::protocol_id_from_string("nope"), InvalidArgument);
}
