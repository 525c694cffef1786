#pragma once

#include <stdexcept>
#include <string>

namespace nlll {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or input violates a documented precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A gamma-function argument landed on a non-positive integer.
class GammaPoleError : public Error {
public:
    explicit GammaPoleError(double argument)
        : Error("gamma pole at argument " + std::to_string(argument)), argument_(argument) {}

    double argument() const noexcept { return argument_; }

private:
    double argument_;
};

/// The requested channel sits on a parameter point with no closed form
/// (e.g. the free-fermion point xi = 1).
class DegenerateChannelError : public Error {
public:
    using Error::Error;
};

class CapExceededError : public Error {
public:
    using Error::Error;
};

/// A computed quantity came out NaN or infinite.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace nlll
