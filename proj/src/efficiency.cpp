#include "sqss/efficiency.hpp"

#include <iterator>
#include <numeric>

#include "sqss/errors.hpp"

namespace sqss::eff {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out))
        throw InvalidArgument("efficiency: value overflows 64-bit arithmetic");
    return out;
}

std::int64_t checked_pow2(std::int64_t exponent) {
    if (exponent < 0 || exponent > 62)
        throw InvalidArgument("efficiency: power of two overflows 64-bit arithmetic");
    return std::int64_t{1} << exponent;
}

} // namespace

Rational Rational::of(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidArgument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

bool Rational::less_than(const Rational& rhs) const {
    // denominators are positive after normalization
    return checked_mul(num, rhs.den) < checked_mul(rhs.num, den);
}

std::string Rational::to_string() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

double Rational::to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
}

std::string to_string(ProtocolId id) {
    switch (id) {
        case ProtocolId::Li2010: return "li-2010";
        case ProtocolId::Li2013: return "li-2013";
        case ProtocolId::Yang2013: return "yang-2013";
        case ProtocolId::Xie2015: return "xie-2015";
        case ProtocolId::Yu2017: return "yu-2017";
        case ProtocolId::Li2020: return "li-2020";
        case ProtocolId::Ye2024: return "ye-2024";
        case ProtocolId::Younes2024: return "younes-2024";
        case ProtocolId::ThisWork: return "this-scheme";
    }
    throw InternalError("to_string: unknown protocol id");
}

ProtocolId protocol_id_from_string(std::string_view text) {
    if (text == "li-2010") return ProtocolId::Li2010;
    if (text == "li-2013") return ProtocolId::Li2013;
    if (text == "yang-2013") return ProtocolId::Yang2013;
    if (text == "xie-2015") return ProtocolId::Xie2015;
    if (text == "yu-2017") return ProtocolId::Yu2017;
    if (text == "li-2020") return ProtocolId::Li2020;
    if (text == "ye-2024") return ProtocolId::Ye2024;
    if (text == "younes-2024") return ProtocolId::Younes2024;
    if (text == "this-scheme") return ProtocolId::ThisWork;
    throw InvalidArgument("unknown protocol id '" + std::string(text) + "'");
}

Rational qubit_efficiency(ProtocolId id, int participants) {
    if (participants < 2) throw InvalidArgument("qubit_efficiency: need at least 2 participants");
    const std::int64_t m = participants;
    switch (id) {
        case ProtocolId::Li2010:
            return Rational::of(1, checked_mul(checked_pow2(m), 3 * m + 2));
        case ProtocolId::Li2013:
            return Rational::of(1, checked_mul(checked_pow2(m), 3 * m));
        case ProtocolId::Yang2013:
            return Rational::of(1, 6 * m);
        case ProtocolId::Xie2015:
            return Rational::of(1, checked_mul(checked_pow2(m - 1), 3 * m + 2));
        case ProtocolId::Yu2017:
            return Rational::of(1, 6 * m + 4);
        case ProtocolId::Li2020:
            return Rational::of(1, 5 * m);
        case ProtocolId::Ye2024:
            return Rational::of(1, 3 * m + 1);
        case ProtocolId::Younes2024:
            return Rational::of(1, 3 * m);
        case ProtocolId::ThisWork:
            return Rational::of(1, 4 * m);
    }
    throw InvalidArgument("qubit_efficiency: unknown protocol id");
}

std::int64_t this_work_qubit_count(std::int64_t secret_len, std::int64_t decoys,
                                   std::int64_t participants) {
    if (secret_len < 1 || decoys < 1) throw InvalidArgument("this_work_qubit_count: N, K must be >= 1");
    if (participants < 2) throw InvalidArgument("this_work_qubit_count: need at least 2 participants");
    return checked_mul(2 * secret_len + 2 * decoys, participants);
}

std::vector<ComparisonRow> efficiency_table(int participants) {
    if (participants < 2) throw InvalidArgument("efficiency_table: need at least 2 participants");

    const std::string gen_measure_reflect =
        "generate Z states; measure in Z; reflect";
    struct Entry {
        ProtocolId id;
        const char* name;
        const char* resources;
        std::string abilities;
        bool trojan;
        bool dcna;
        bool specific;
        const char* formula;
    };
    const Entry entries[] = {
        {ProtocolId::Li2010, "Li et al. (2010)", "multi-qubit entangled states",
         gen_measure_reflect, false, true, false, "1/(2^M (3M+2))"},
        {ProtocolId::Li2013, "Li et al. (2013)", "single qubits", gen_measure_reflect, false, true,
         false, "1/(2^M 3M)"},
        {ProtocolId::Yang2013, "Yang et al. (2013)", "single qubits", gen_measure_reflect, false,
         true, false, "1/(6M)"},
        {ProtocolId::Xie2015, "Xie et al. (2015)", "multi-qubit entangled states",
         gen_measure_reflect, false, true, true, "1/(2^(M-1) (3M+2))"},
        {ProtocolId::Yu2017, "Yu et al. (2017)", "multi-qubit entangled states",
         gen_measure_reflect, false, true, false, "1/(6M+4)"},
        {ProtocolId::Li2020, "Li et al. (2020)", "Bell states", gen_measure_reflect, false, true,
         false, "1/(5M)"},
        {ProtocolId::Ye2024, "Ye et al. (2024)", "entangled states + single qubits",
         gen_measure_reflect, false, true, true, "1/(3M+1)"},
        {ProtocolId::Younes2024, "Younes et al. (2024)", "entangled states + single qubits",
         gen_measure_reflect, true, false, true, "1/(3M)"},
        {ProtocolId::ThisWork, "This scheme", "entangled states + Bell states",
         "measure in Z; apply H", true, true, true, "1/(4M)"},
    };

    std::vector<ComparisonRow> rows;
    rows.reserve(std::size(entries));
    for (const Entry& e : entries) {
        ComparisonRow row;
        row.id = e.id;
        row.name = e.name;
        row.resources = e.resources;
        row.abilities = e.abilities;
        row.mitigates_trojan_horse = e.trojan;
        row.mitigates_dcna = e.dcna;
        row.specific_secret = e.specific;
        row.formula = e.formula;
        row.efficiency = qubit_efficiency(e.id, participants);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

} // namespace

std::string render_table_text(const std::vector<ComparisonRow>& rows, int participants) {
    std::string out = "Qubit-efficiency comparison at M = " + std::to_string(participants) + "\n";
    const std::size_t name_w = 22, form_w = 20, eta_w = 12, flag_w = 8;
    out += pad("protocol", name_w) + pad("efficiency", form_w) + pad("value", eta_w) +
           pad("trojan", flag_w) + pad("dcna", flag_w) + "secret\n";
    for (const ComparisonRow& r : rows) {
        out += pad(r.name, name_w);
        out += pad(r.formula, form_w);
        out += pad(r.efficiency.to_string(), eta_w);
        out += pad(r.mitigates_trojan_horse ? "yes" : "no", flag_w);
        out += pad(r.mitigates_dcna ? "yes" : "no", flag_w);
        out += r.specific_secret ? "specific" : "unspecific";
        out += '\n';
    }
    return out;
}

std::string render_table_csv(const std::vector<ComparisonRow>& rows, int participants) {
    std::string out =
        "protocol,participants,formula,efficiency,mitigates_trojan_horse,mitigates_dcna,"
        "specific_secret\n";
    for (const ComparisonRow& r : rows) {
        out += to_string(r.id);
        out += ',';
        out += std::to_string(participants);
        out += ',';
        out += '"' + r.formula + '"';
        out += ',';
        out += r.efficiency.to_string();
        out += ',';
        out += r.mitigates_trojan_horse ? "true" : "false";
        out += ',';
        out += r.mitigates_dcna ? "true" : "false";
        out += ',';
        out += r.specific_secret ? "true" : "false";
        out += '\n';
    }
    return out;
}

} // namespace sqss::eff
