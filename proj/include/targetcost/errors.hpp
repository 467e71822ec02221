#pragma once

#include <stdexcept>
#include <string>

namespace targetcost {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent inputs supplied by a caller (mismatched horizons, p, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested problem size cannot be represented (overflow, allocation).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ODE trajectory left the admissible box [-0.01, 1.01].
class RangeError : public std::runtime_error {
public:
    RangeError(const std::string& what, double y) : std::runtime_error(what), y_(y) {}
    double at() const noexcept { return y_; }

private:
    double y_;
};

/// An ODE trajectory blew up (|g| > 2 or |g'| > 1e6).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double y) : std::runtime_error(what), y_(y) {}
    double at() const noexcept { return y_; }

private:
    double y_;
};

/// Shooting could not bracket or converge to the boundary conditions.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace targetcost
