#pragma once

#include <stdexcept>
#include <string>

namespace sqss {

/// Caller passed a value that violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A state that correct code can never reach (e.g. sampling selected a
/// zero-probability measurement branch).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A party deviated from the protocol contract (wrong sequence length,
/// reconstruction attempted after a failed validity check, ...).
class ProtocolViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sqss
