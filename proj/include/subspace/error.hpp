#pragma once

#include <stdexcept>
#include <string>

namespace subspace {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text or binary payload (CSV rows, PGM headers, config files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Incompatible matrix/image dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input violates the experimental protocol (missing classes, empty training set, ...).
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Fewer usable eigenpairs than requested.
class RankError : public Error {
public:
    using Error::Error;
};

/// Degenerate operator: zero constraint matrix, identical samples, ...
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter value (nonpositive heat-kernel width, zero Kronecker factor, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (missing file, unreadable/unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace subspace
