#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace s1flow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or structurally inconsistent input.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of a formula (f <= 0, area <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A closed-form solution was evaluated at or past its finite-time singularity.
class SingularityError : public DomainError {
public:
    SingularityError(const std::string& what, double t_star)
        : DomainError(what), t_star_(t_star) {}

    double t_star() const noexcept { return t_star_; }

private:
    double t_star_;
};

/// Ill-conditioned numerics (singular metric matrix and the like).
class NumericalError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw InvalidInputError(std::string(name) + " is not finite");
    }
}

} // namespace detail

} // namespace s1flow
