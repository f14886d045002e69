#pragma once

// Independent numerical evaluation of the left Caputo derivative of order
// alpha in (0,1) with base point 0:
//
//   (1/Gamma(1-alpha)) * int_0^x (x - s)^(-alpha) f'(s) ds
//
// The kernel singularity at s = x is removed by t = (x - s)^(1-alpha), which
// turns the integral into (1/(1-alpha)) * int_0^{x^(1-alpha)} f'(x - t^(1/(1-alpha))) dt.
// A possible algebraic singularity of f' at s = 0 is left to the
// double-exponential (tanh-sinh) trapezoid rule, whose graded mesh clusters
// nodes at both ends.

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "fedq/errors.hpp"
#include "fedq/expr/gamma.hpp"

namespace fedq::quadrature {

struct QuadratureSpec {
    double tolerance = 1e-8;
    int max_subdivisions = 1 << 16;

    void validate() const {
        if (!(tolerance > 0.0)) throw MalformedInput("quadrature tolerance must be positive");
        if (max_subdivisions < 16) throw MalformedInput("quadrature needs at least 16 subdivisions");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int nodes = 0;
};

namespace detail {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kSinhRange = 4.5;

/// Tanh-sinh sum at step h, over odd multiples only or all multiples of h.
/// The integrand receives (distance to left end, distance to right end) on [0, length].
template <class Fn>
double tanh_sinh_level(const Fn& integrand, double length, double h, bool odd_only, int& nodes) {
    double sum = 0.0;
    const int kmax = static_cast<int>(std::ceil(kSinhRange / h));
    for (int k = -kmax; k <= kmax; ++k) {
        if (odd_only && (k % 2 == 0)) continue;
        const double s = k * h;
        const double q = kHalfPi * std::sinh(s);
        const double cq = std::cosh(q);
        const double w = length / 2.0 * kHalfPi * std::cosh(s) / (cq * cq);
        if (w == 0.0 || !std::isfinite(w)) continue;
        const double left = length / (1.0 + std::exp(-2.0 * q));
        const double right = length / (1.0 + std::exp(2.0 * q));
        if (left <= 0.0 || right <= 0.0) continue;
        sum += w * integrand(left, right);
        ++nodes;
    }
    return sum;
}

} // namespace detail

/// Caputo derivative at `x` of a function whose classical derivative is `derivative`.
inline QuadratureResult caputo_quad(const std::function<double(double)>& derivative, double x, double alpha,
                                    const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(x > 0.0)) throw MalformedInput("caputo_quad needs x > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw MalformedInput("caputo_quad needs alpha in (0,1)");

    const double beta = 1.0 - alpha;
    const double length = std::pow(x, beta);
    // t in [0, length]; the source point s = x * (1 - (t/length)^(1/beta)).
    auto integrand = [&](double /*left*/, double right) {
        const double rel = right / length;
        const double s = -x * std::expm1(std::log1p(-rel) / beta);
        if (!(s > 0.0)) return 0.0;
        return derivative(s);
    };

    const double scale = 1.0 / (beta * std::tgamma(beta));
    int nodes = 0;
    double h = 0.5;
    double raw = detail::tanh_sinh_level(integrand, length, h, false, nodes);
    double estimate = scale * raw * h;
    double previous = estimate;
    while (true) {
        h /= 2.0;
        raw += detail::tanh_sinh_level(integrand, length, h, true, nodes);
        previous = estimate;
        estimate = scale * raw * h;
        const double err = std::abs(estimate - previous);
        if (err == 0.0 || err <= spec.tolerance * std::abs(estimate))
            return QuadratureResult{estimate, err, nodes};
        if (nodes > spec.max_subdivisions) {
            std::ostringstream os;
            os.precision(17);
            os << "caputo quadrature did not converge: last estimates " << previous << ", " << estimate;
            throw QuadratureFailure(os.str(), previous, estimate);
        }
    }
}

/// |closed form - quadrature| / |quadrature| for f(s) = s^p, p > 0.
inline double power_rule_residual(double p, double alpha, double x, const QuadratureSpec& spec = {}) {
    if (!(p > 0.0)) throw MalformedInput("power_rule_residual needs p > 0");
    const auto quad = caputo_quad([p](double s) { return p * std::pow(s, p - 1.0); }, x, alpha, spec);
    const double closed = *expr::gamma_ratio(p + 1.0, p + 1.0 - alpha) * std::pow(x, p - alpha);
    return std::abs(closed - quad.value) / std::max(std::abs(quad.value), 1e-300);
}

} // namespace fedq::quadrature
