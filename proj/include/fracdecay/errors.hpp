#pragma once

#include <stdexcept>
#include <string>

namespace fracdecay {

// Numerical failure with a structured, human-readable diagnostic.
// Thrown when an algorithm cannot deliver its promised accuracy
// (non-convergence, positivity loss, method disagreement, ...).
class ComputationError : public std::runtime_error {
public:
    explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

// A constructed object violates one of its documented invariants.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

// Bad command line, config file or option value; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracdecay
