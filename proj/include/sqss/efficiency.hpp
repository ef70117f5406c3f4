#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sqss::eff {

/// Exact rational with checked 64-bit arithmetic; overflow throws rather
/// than wrapping. No floating point anywhere in this module.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational of(std::int64_t num, std::int64_t den);

    bool operator==(const Rational&) const = default;
    bool less_than(const Rational& rhs) const;

    std::string to_string() const;  // "1/12", "3" for integers
    double to_double() const;
};

enum class ProtocolId {
    Li2010,
    Li2013,
    Yang2013,
    Xie2015,
    Yu2017,
    Li2020,
    Ye2024,
    Younes2024,
    ThisWork,
};

std::string to_string(ProtocolId id);
ProtocolId protocol_id_from_string(std::string_view text);

/// Shared-secret bits per generated qubit for the given scheme at M
/// participants, as an exact rational.
Rational qubit_efficiency(ProtocolId id, int participants);

/// Total qubits this scheme generates: (2N + 2K) * M.
std::int64_t this_work_qubit_count(std::int64_t secret_len, std::int64_t decoys,
                                   std::int64_t participants);

struct ComparisonRow {
    ProtocolId id;
    std::string name;
    std::string resources;
    std::string abilities;
    bool mitigates_trojan_horse = false;
    bool mitigates_dcna = false;
    bool specific_secret = false;
    std::string formula;  // efficiency as a function of M
    Rational efficiency;  // evaluated at the requested M
};

/// One row per compared scheme, in the fixed comparison order.
std::vector<ComparisonRow> efficiency_table(int participants);

std::string render_table_text(const std::vector<ComparisonRow>& rows, int participants);
std::string render_table_csv(const std::vector<ComparisonRow>& rows, int participants);

} // namespace sqss::eff
