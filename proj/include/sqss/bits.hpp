#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sqss/qsim/rng.hpp"

namespace sqss {

/// Classical bit string; each element is 0 or 1.
using Bits = std::vector<std::uint8_t>;

Bits parse_bits(std::string_view text);
std::string bits_to_string(const Bits& bits);

Bits random_bits(qsim::Rng& rng, std::size_t count);

Bits xor_bits(const Bits& a, const Bits& b);

/// Reads `bits` at the given positions (callers keep them ascending).
Bits bits_at(const Bits& bits, const std::vector<std::size_t>& positions);

} // namespace sqss
