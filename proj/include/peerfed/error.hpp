#pragma once

#include <stdexcept>
#include <string>

namespace peerfed {

/// Base error for all library failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (maps to CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace peerfed
