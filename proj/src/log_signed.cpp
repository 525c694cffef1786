#include "nlll/log_signed.hpp"

#include <math.h>

#include <numbers>

#include "nlll/errors.hpp"

namespace nlll {

namespace {

// sin(pi x) with the argument reduced to [-1, 1] first, so that the result
// keeps full relative accuracy for large |x|.
double sin_pi(double x) noexcept {
    double r = std::fmod(x, 2.0);
    if (r > 1.0) r -= 2.0;
    else if (r < -1.0) r += 2.0;
    return std::sin(std::numbers::pi * r);
}

// log|Gamma(x)| for x > 0. lgamma_r avoids the global signgam.
double lgamma_positive(double x) noexcept {
    int s = 0;
    return ::lgamma_r(x, &s);
}

} // namespace

bool is_gamma_pole(double x) noexcept { return x <= 0.0 && x == std::floor(x); }

LogSigned log_gamma(double x) {
    if (!std::isfinite(x)) throw NumericError("log_gamma: non-finite argument");
    if (is_gamma_pole(x)) throw GammaPoleError(x);
    if (x > 0.0) return {lgamma_positive(x), 1};

    // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    const double s = sin_pi(x);
    return {std::log(std::numbers::pi) - std::log(std::fabs(s)) - lgamma_positive(1.0 - x),
            s > 0.0 ? 1 : -1};
}

LogSigned log_gamma_ratio(double x, double n) {
    if (n == 0.0) {
        if (is_gamma_pole(x)) throw GammaPoleError(x);
        return LogSigned::one();
    }
    return log_gamma(x + n) / log_gamma(x);
}

} // namespace nlll
