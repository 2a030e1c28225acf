#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evs {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller violated a precondition (bad argument, dimension mismatch, ...).
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

/// Filesystem/OS level failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Malformed file contents. Carries the byte (or line) offset of the problem.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_ = 0;
};

/// Channel estimate too small to invert; names the offending subcarrier.
class SingularEqualizer : public Error {
public:
    explicit SingularEqualizer(int subcarrier_index)
        : Error("singular equalizer: channel estimate vanishes on subcarrier " +
                std::to_string(subcarrier_index)),
          subcarrier_(subcarrier_index) {}
    int subcarrier() const { return subcarrier_; }

private:
    int subcarrier_ = 0;
};

/// Pilot accumulator collapsed to zero; no phase can be extracted.
class DegenerateEstimate : public Error {
public:
    explicit DegenerateEstimate(const std::string& msg) : Error(msg) {}
};

/// Not enough samples for the requested operation.
class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

}  // namespace evs
