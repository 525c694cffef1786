#pragma once

#include <cmath>
#include <limits>

namespace nlll {

/// A real number stored as (log|x|, sign(x)). Products of gamma functions and
/// Cauchy-determinant factors are accumulated in this form so that large
/// positions (p ~ 1e4) and large exponents neither overflow nor underflow.
struct LogSigned {
    double log_abs = 0.0;
    int sign = 1; // +1, -1, or 0 for an exact zero

    static constexpr LogSigned one() noexcept { return {0.0, 1}; }
    static constexpr LogSigned zero() noexcept {
        return {-std::numeric_limits<double>::infinity(), 0};
    }
    static LogSigned from(double x) noexcept {
        if (x == 0.0) return zero();
        return {std::log(std::fabs(x)), x > 0.0 ? 1 : -1};
    }

    bool is_zero() const noexcept { return sign == 0; }
    double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
    /// |x|^2, returned as a plain real.
    double squared() const noexcept { return sign == 0 ? 0.0 : std::exp(2.0 * log_abs); }

    LogSigned& operator*=(const LogSigned& o) noexcept {
        if (sign == 0 || o.sign == 0) return *this = zero();
        log_abs += o.log_abs;
        sign *= o.sign;
        return *this;
    }
    /// Division by an exact zero is the caller's bug; the result is +/-inf.
    LogSigned& operator/=(const LogSigned& o) noexcept {
        if (sign == 0) return *this;
        log_abs -= o.log_abs;
        sign *= (o.sign == 0 ? 1 : o.sign);
        return *this;
    }
    LogSigned inverse() const noexcept { return LogSigned{-log_abs, sign}; }
};

inline LogSigned operator*(LogSigned a, const LogSigned& b) noexcept { return a *= b; }
inline LogSigned operator/(LogSigned a, const LogSigned& b) noexcept { return a /= b; }

/// True when x is 0, -1, -2, ...
bool is_gamma_pole(double x) noexcept;

/// log|Gamma(x)| with sign. Negative non-integer arguments go through the
/// reflection formula. Throws GammaPoleError at non-positive integers.
LogSigned log_gamma(double x);

/// Gamma(x + n) / Gamma(x) as a log-signed value (the Pochhammer symbol).
LogSigned log_gamma_ratio(double x, double n);

} // namespace nlll
