#pragma once

#include <stdexcept>
#include <string>

namespace trendlex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Violated precondition or invalid configuration value.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Remote embedder unreachable, timed out, or spoke the protocol wrongly.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Recorded-response cache has no entry for a requested sequence.
class CacheMiss : public Error {
public:
    using Error::Error;
};

/// A pipeline stage failed; `stage()` names it ("load", "trending", ...).
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)), detail_(what) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string stage_;
    std::string detail_;
};

}  // namespace trendlex
