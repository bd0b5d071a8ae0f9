#pragma once

#include <stdexcept>
#include <string>

namespace hsi {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing or unreadable files.
struct FileError : Error {
    using Error::Error;
};

// Malformed or unsupported file contents (dtype, byte order, interleave).
struct FormatError : Error {
    using Error::Error;
};

// Dimension disagreements: header vs payload, ref vs est, model vs input.
struct ShapeError : Error {
    using Error::Error;
};

// Invalid configuration values caught before any compute starts.
struct ConfigError : Error {
    using Error::Error;
};

// Numeric failures: non-finite data, degenerate denominators.
struct NumericError : Error {
    using Error::Error;
};

// Training aborted (non-finite loss); carries the iteration it happened at.
struct TrainingError : Error {
    int iteration;
    TrainingError(const std::string& msg, int iter) : Error(msg), iteration(iter) {}
};

} // namespace hsi
