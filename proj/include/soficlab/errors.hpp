#pragma once

#include <stdexcept>
#include <string>

namespace soficlab {

// Base class for all library errors. Subclasses mirror the failure modes of
// the public operations so callers can map them onto exit codes / reports.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A group element was requested outside the window a sofic map is defined on.
class SupportTooSmallError : public Error {
public:
    explicit SupportTooSmallError(const std::string& what) : Error(what) {}
};

// A windowed point does not carry enough coordinates for the requested reads.
class InsufficientWindowError : public Error {
public:
    explicit InsufficientWindowError(const std::string& what) : Error(what) {}
};

class LengthMismatchError : public Error {
public:
    explicit LengthMismatchError(const std::string& what) : Error(what) {}
};

class EmptyRestrictionError : public Error {
public:
    explicit EmptyRestrictionError(const std::string& what) : Error(what) {}
};

// Exact (exponential) computation requested beyond the configured cap.
class TooLargeError : public Error {
public:
    explicit TooLargeError(const std::string& what) : Error(what) {}
};

// Generator images contradict the group law on the requested support.
class InconsistentHomError : public Error {
public:
    explicit InconsistentHomError(const std::string& what) : Error(what) {}
};

// Rejection sampling could not produce the requested number of configurations.
class ExhaustedTriesError : public Error {
public:
    explicit ExhaustedTriesError(const std::string& what) : Error(what) {}
};

// The randomized-domination hypothesis fails for the requested parameters.
class HypothesisViolatedError : public Error {
public:
    explicit HypothesisViolatedError(const std::string& what) : Error(what) {}
};

// The parameter planner could not certify a window for the given measure.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::string failed_constraint)
        : Error(what), constraint(std::move(failed_constraint)) {}
    std::string constraint;
};

// A check that requires an established precondition was called without it.
class PreconditionUnverifiedError : public Error {
public:
    explicit PreconditionUnverifiedError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace soficlab
