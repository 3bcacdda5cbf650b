#pragma once

#include <stdexcept>
#include <string>

namespace inferedge {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent profile data.
class ProfileError : public Error {
public:
    using Error::Error;
};

/// Lookup into a profile store with an unknown key or an out-of-range index.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Invalid scenario, reward, or trainer configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Shape or numeric failure inside the neural network code.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace inferedge
