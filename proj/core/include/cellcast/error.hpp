#pragma once

#include <stdexcept>
#include <string>

namespace cellcast {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data, configuration or file content violates a contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Model file carries a format version this build cannot read.
class VersionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Model file is truncated or its checksum does not match.
class CorruptFileError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace cellcast
