#pragma once

#include <stdexcept>
#include <string>

namespace propcomp {

/// Argument outside the mathematical domain of an operation (negative output,
/// invalid distribution parameter, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Production technology with increasing returns to scale; the derived cost
/// would be concave.
class ReturnsToScaleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Caller broke an operation's precondition (too few agents, bad epsilons).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested scheme is not defined for this profile.
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A root finder or bracket search gave up. Carries the last bracket.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double lower, double upper)
        : std::runtime_error(what), lower_(lower), upper_(upper) {}

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

}  // namespace propcomp
