#pragma once

#include <stdexcept>
#include <string>

namespace ranslice {

// Input rejected before anything ran: bad syntax, bad values, bad setup.
// The CLI maps these to exit code 1.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything below signals a failure while running (exit code 2).
class DomainError : public std::domain_error {
    using std::domain_error::domain_error;
};

// A caller broke an operation's precondition. These are bugs.
class ContractViolation : public std::logic_error {
    using std::logic_error::logic_error;
};

// M/M/1 backhaul queue with arrival rate at or above service rate.
class UnstableQueue : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LoadError : public std::runtime_error {
public:
    enum class Kind { Version, Malformed, Arity, Metadata };
    LoadError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace ranslice
