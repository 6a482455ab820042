#pragma once

#include <stdexcept>
#include <string>

namespace brep {

/// Base of every error the kernel throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The file is readable HDF5 but does not follow the part layout.
class FormatError : public Error {
public:
    using Error::Error;
};

/// The file could not be opened, created or read at the HDF5 level.
class IoError : public Error {
public:
    using Error::Error;
};

/// A part handed to the writer has invariant violations.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A curve or surface parameter lies outside its interval or trim domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation was requested for an "Other" entity with no registered fallback,
/// or nesting exceeded the evaluation depth limit.
class UnsupportedKind : public Error {
public:
    using Error::Error;
};

/// The surface jet is degenerate (|Su x Sv| below threshold), so there is no normal.
class SingularJet : public Error {
public:
    using Error::Error;
};

/// A loop's half-edges do not chain into a closed cycle.
class OpenLoop : public Error {
public:
    using Error::Error;
};

/// A child entity is referenced by two parents where only one is allowed.
class InconsistentTopology : public Error {
public:
    using Error::Error;
};

class UnknownMutation : public Error {
public:
    using Error::Error;
};

}  // namespace brep
