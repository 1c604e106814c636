#pragma once

#include <stdexcept>
#include <string>

namespace elsort {

/// Base class for all elsort errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent run configuration. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure: open, read, write, allocate. CLI exit code 3.
class IoError : public Error {
public:
    using Error::Error;
};

/// File length or layout violates the fixed 100-byte record format.
class MalformedFileError : public Error {
public:
    using Error::Error;
};

/// A key byte falls outside the printable ASCII range 32..126.
class NonPrintableKeyError : public Error {
public:
    using Error::Error;
};

/// An operation that requires input received none.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Training sample too small to fit a model.
class InsufficientSampleError : public Error {
public:
    using Error::Error;
};

/// A single partition is larger than the memory budget.
class OversizedPartitionError : public Error {
public:
    using Error::Error;
};

/// A sort buffer received more records than it was sized for.
class PartitionOverflowError : public Error {
public:
    using Error::Error;
};

} // namespace elsort
