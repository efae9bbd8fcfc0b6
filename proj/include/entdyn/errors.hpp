// errors.hpp: Exception types shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace entdyn {

// Rejected input parameter. `code` is a stable machine-readable name.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string code, const std::string& message)
        : std::invalid_argument(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Quadrature, root finding or eigensolver failed to reach its target.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& message, double achieved = 0.0)
        : std::runtime_error(message), achieved_(achieved) {}

    // Error estimate (or bracket width) reached when the routine gave up.
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Moments violating (n + 1/2)^2 >= |sigma|^2 or a non-positive symplectic radicand.
class PhysicalityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Two independent routes disagree beyond tolerance.
class ConsistencyError : public std::runtime_error {
public:
    ConsistencyError(const std::string& message, double discrepancy)
        : std::runtime_error(message), discrepancy_(discrepancy) {}

    double discrepancy() const noexcept { return discrepancy_; }

private:
    double discrepancy_;
};

// File could not be created, written or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace entdyn
