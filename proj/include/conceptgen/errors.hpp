#pragma once

#include <stdexcept>
#include <string>

namespace conceptgen {

// Error categories map 1:1 onto CLI exit codes (see tools/main.cpp).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Bad flags, bad config files, missing auth tokens. Exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(message) {}
};

// Unreadable or malformed inputs, shape mismatches, unknown names. Exit code 3.
class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error(message) {}
};

// Non-finite losses, degenerate metrics, collapsed sampling. Exit code 4.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error(message) {}
};

// Endpoint transport failures after retries, malformed responses. Exit code 5.
class EndpointError : public Error {
public:
    explicit EndpointError(const std::string& message) : Error(message) {}
};

}  // namespace conceptgen
