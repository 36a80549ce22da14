#pragma once

#include <stdexcept>
#include <string>

namespace fairsense {

// Error taxonomy. Everything derives from Error so callers can catch the
// whole family; the CLI maps any of these to exit code 1.

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration: bad network spec, incompatible model pair,
// baseline/model digest mismatch.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A caller-supplied value is out of contract (dimension mismatch, bad
// fraction, k out of range, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// The data itself is unusable: non-binary target, unparseable cell,
// non-binary protected column.
class DataError : public Error {
public:
    using Error::Error;
};

// Schema file problems: missing column, unknown kind, bad JSON shape.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Training or evaluation produced NaN/Inf.
class NumericError : public Error {
public:
    using Error::Error;
};

// A metric has no defined value on this input (single-class AUC, zero
// positive rate in both groups). Reported, usually not fatal.
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

} // namespace fairsense
