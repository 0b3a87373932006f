#pragma once

#include <stdexcept>
#include <string>

namespace concord {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid option or argument combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unusable input data: empty datasets, degenerate columns, value or shape
/// violations.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content.
class ParseError : public DataError {
 public:
  using DataError::DataError;
};

/// Filesystem failure.
class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// The input fails an estimatability requirement (disconnected provider
/// graph, level-1 violation) or the imputation system cannot be factorized.
class EstimatabilityError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace concord
