#pragma once

#include <stdexcept>
#include <string>

namespace cpdp {

// All recoverable failures in the library are reported as cpdp::Error.
// The subclasses exist so callers can distinguish bad inputs (files,
// config) from training/selection failures without parsing messages.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& msg) : Error(msg) {}
};

}  // namespace cpdp
