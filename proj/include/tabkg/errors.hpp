#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tabkg {

/// Malformed input in a line-oriented or structured source.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}

    /// 1-based line number, 0 when not line-oriented.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Invalid configuration: unknown formats, out-of-range parameters, untrainable inputs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (indices, dimensions, unknown ids).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace tabkg
