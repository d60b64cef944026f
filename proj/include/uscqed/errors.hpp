#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace uscqed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EigensolverFailure : public Error {
public:
    using Error::Error;
};

/// A density-matrix invariant (trace, Hermiticity, positivity) was violated
/// during time stepping.
class InvariantViolation : public Error {
public:
    InvariantViolation(long step, double time, std::string invariant, double value)
        : Error("invariant '" + invariant + "' violated at step " + std::to_string(step) +
                " (t = " + std::to_string(time) + "): value " + std::to_string(value)),
          step_(step),
          time_(time),
          invariant_(std::move(invariant)),
          value_(value) {}

    long step() const noexcept { return step_; }
    double time() const noexcept { return time_; }
    const std::string& invariant() const noexcept { return invariant_; }
    double value() const noexcept { return value_; }

private:
    long step_;
    double time_;
    std::string invariant_;
    double value_;
};

/// The generator has more than one stationary state.
class DegenerateSteadyState : public Error {
public:
    using Error::Error;
};

class PseudoSteadyStateNotReached : public Error {
public:
    using Error::Error;
};

/// A perturbative formula was evaluated outside the range where it yields
/// physical (positive) rates.
class OutOfValidity : public Error {
public:
    using Error::Error;
};

}  // namespace uscqed
