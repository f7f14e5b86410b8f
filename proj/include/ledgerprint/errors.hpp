#pragma once

#include <stdexcept>
#include <string>

namespace ledgerprint {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV, JSONL, config files). Messages carry a line number.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or incomplete data (e.g. a transaction without a label).
class DataError : public Error {
public:
    using Error::Error;
};

/// Precondition violation on an algorithmic operation (empty dataset, width mismatch).
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace ledgerprint
