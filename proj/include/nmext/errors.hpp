#pragma once

#include <stdexcept>
#include <string>

namespace nmext {

// Shape or value outside an operation's domain (bad modulus, wrong vector
// length, symbol out of range). Fail fast; nothing is silently reduced.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Multiplicative inverse of zero.
struct DivisionByZero : DomainError {
    explicit DivisionByZero(const std::string& what) : DomainError(what) {}
};

// A requested enumeration or search exceeds the configured desk-scale budget.
// The message carries the computed size so the caller can see how far off it is.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed its convergence contract.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// An adversary callback misbehaved: returned an out-of-shape message, or drew
// randomness inside an exhaustive (deterministic) experiment.
struct AdversaryError : std::runtime_error {
    explicit AdversaryError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nmext
