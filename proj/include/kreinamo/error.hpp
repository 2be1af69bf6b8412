#pragma once

#include <stdexcept>
#include <string>

namespace kreinamo {

/// Rejected input: out-of-domain arguments, malformed configuration, violated
/// preconditions. Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver its contract (non-convergence,
/// bracket failure, singular system). Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kreinamo
