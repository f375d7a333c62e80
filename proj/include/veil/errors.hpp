#pragma once

#include <stdexcept>
#include <string>

namespace veil {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- configuration / usage errors -------------------------------------------

struct InvalidSpec : Error {
    using Error::Error;
};

struct EmptyDataset : Error {
    EmptyDataset() : Error("dataset is empty") {}
};

struct FanoutExceedsBuckets : Error {
    using Error::Error;
};

struct RecordTooWide : Error {
    using Error::Error;
};

struct ParityError : Error {
    using Error::Error;
};

struct NegativeFakeCount : Error {
    using Error::Error;
};

struct LenderTooSmall : Error {
    using Error::Error;
};

struct OverlapInfeasible : Error {
    using Error::Error;
};

struct BucketIdOutOfRange : Error {
    using Error::Error;
};

struct NotFound : Error {
    using Error::Error;
};

// File-system problems (missing/unreadable/unwritable paths).
struct IoError : Error {
    using Error::Error;
};

// --- integrity errors --------------------------------------------------------
// Anything derived from IntegrityError means stored or fetched bytes cannot be
// trusted; the CLI maps these to a dedicated exit code.

struct IntegrityError : Error {
    using Error::Error;
};

struct VersionMismatch : IntegrityError {
    using IntegrityError::IntegrityError;
};

struct ChecksumFailure : IntegrityError {
    using IntegrityError::IntegrityError;
};

struct TruncatedFile : IntegrityError {
    using IntegrityError::IntegrityError;
};

struct DecryptionFailure : IntegrityError {
    using IntegrityError::IntegrityError;
};

}  // namespace veil
