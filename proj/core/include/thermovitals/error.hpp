#pragma once

#include <stdexcept>
#include <string>

namespace thermovitals {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Caller passed something invalid: bad argument, bad spec, bad config.
/// The CLI maps these to exit code 2.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(what) {}
};

/// A frequency band cannot be analysed at the given sampling rate, or no
/// spectrum bin falls inside it.
class BandError : public ArgumentError {
public:
    explicit BandError(const std::string& what) : ArgumentError(what) {}
};

/// Input data is malformed: bad magic, invalid header, corrupt payload,
/// unusable ground truth. The CLI maps these to exit code 3.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// File does not decode as the expected format.
class FormatError : public DataError {
public:
    explicit FormatError(const std::string& what) : DataError(what) {}
};

/// File decodes structurally but its payload is truncated or inconsistent.
class CorruptionError : public DataError {
public:
    explicit CorruptionError(const std::string& what) : DataError(what) {}
};

/// Filesystem-level failure (missing file, unwritable path).
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace thermovitals
