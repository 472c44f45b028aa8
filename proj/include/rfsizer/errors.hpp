#pragma once

#include <stdexcept>
#include <string>

namespace rfsizer {

// Base class for all toolkit errors so callers can catch everything at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad key, bad value or bad combination in a key=value config.
struct ConfigError : Error {
    using Error::Error;
};

// Names/order/units do not match a block's canonical schema.
struct SchemaError : Error {
    using Error::Error;
};

// VCO startup condition gm*R_p >= 1 violated.
struct OscillationFailure : Error {
    using Error::Error;
};

// Malformed text input; carries a 1-based line number.
struct ParseError : Error {
    ParseError(const std::string& msg, int line)
        : Error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
    int line_number;
};

// Model container damaged: bad magic, truncated stream or checksum mismatch.
struct CorruptionError : Error {
    using Error::Error;
};

// Divergence, non-convergence or degenerate training input.
struct TrainingError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace rfsizer
