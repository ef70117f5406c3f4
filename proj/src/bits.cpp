#include "sqss/bits.hpp"

#include "sqss/errors.hpp"

namespace sqss {

Bits parse_bits(std::string_view text) {
    Bits out;
    out.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw InvalidArgument("parse_bits: characters must be 0 or 1");
        out.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return out;
}

std::string bits_to_string(const Bits& bits) {
    std::string out(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) out[i] = static_cast<char>('0' + (bits[i] & 1));
    return out;
}

Bits random_bits(qsim::Rng& rng, std::size_t count) {
    Bits out(count);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng.bit());
    return out;
}

Bits xor_bits(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) throw InvalidArgument("xor_bits: length mismatch");
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

Bits bits_at(const Bits& bits, const std::vector<std::size_t>& positions) {
    Bits out;
    out.reserve(positions.size());
    for (std::size_t p : positions) {
        if (p >= bits.size()) throw InvalidArgument("bits_at: position out of range");
        out.push_back(bits[p]);
    }
    return out;
}

} // namespace sqss
