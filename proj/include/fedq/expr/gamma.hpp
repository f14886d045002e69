#pragma once

#include <cmath>
#include <optional>

namespace fedq::expr {

inline constexpr double kIntegerTolerance = 1e-9;

/// True when x is within kIntegerTolerance of an integer <= 0, i.e. a pole of Gamma.
inline bool is_gamma_pole(double x) {
    if (x > kIntegerTolerance) return false;
    return std::abs(x - std::round(x)) <= kIntegerTolerance;
}

/// Sign of Gamma(x) for x away from the poles.
inline double gamma_sign(double x) {
    if (x > 0.0) return 1.0;
    const double k = std::ceil(-x);
    return std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0;
}

/// Gamma(a) / Gamma(b) through log-gamma with explicit sign tracking.
/// Returns 0 when b sits at a pole; std::nullopt when a does.
inline std::optional<double> gamma_ratio(double a, double b) {
    if (is_gamma_pole(a)) return std::nullopt;
    if (is_gamma_pole(b)) return 0.0;
    const double mag = std::exp(std::lgamma(a) - std::lgamma(b));
    return gamma_sign(a) * gamma_sign(b) * mag;
}

} // namespace fedq::expr
