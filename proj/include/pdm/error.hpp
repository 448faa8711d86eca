#pragma once

#include <stdexcept>
#include <string>

namespace pdm {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments; the CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

/// Input data that does not match what an operation expects
/// (length mismatch, schema mismatch, single-class input, bad horizon).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace pdm
