#pragma once

#include <stdexcept>
#include <string>

namespace cmb {

// Bad or inconsistent configuration, detected before any stepping starts.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values detected while stepping; the run is aborted.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cmb
