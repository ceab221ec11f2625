#pragma once

#include <stdexcept>
#include <string>

namespace rpne {

// Base for every error the engine reports to callers.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A case batch exceeded the per-individual case cap of a backend submission.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Every sampled training target was invalid.
class DegenerateDomain : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace rpne
