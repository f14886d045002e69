#pragma once

#include <map>
#include <vector>

#include "fedq/geometry/bundle.hpp"
#include "fedq/wick/product.hpp"

namespace fedq::fedosov {

using expr::Complex;
using expr::Signomial;
using forms::FormMask;
using geometry::GeometryBundle;
using wick::WickElement;
using wick::WickKey;
using wick::ZDeg;

/// delta(a) = e^k ^ d a / d z^k
inline WickElement delta(const WickElement& a, std::size_t dim2) {
    WickElement out(a.field_dim());
    for (const auto& [k, c] : a.terms()) {
        for (std::size_t var = 0; var < dim2; ++var) {
            const unsigned m = wick::z_get(k.z, var);
            if (m == 0) continue;
            const int sign = forms::wedge_sign(forms::single(var), k.form);
            if (sign == 0) continue;
            out.add_term({k.v, wick::z_shift(k.z, var, -1), k.form | forms::single(var)},
                         static_cast<double>(sign * static_cast<int>(m)) * c);
        }
    }
    return out;
}

/// delta^-1(a) = (1/(p+q)) z^k i(e_k) a on the (deg_s, deg_a) = (p, q) part; zero when p = q = 0.
inline WickElement delta_inv(const WickElement& a, std::size_t dim2) {
    WickElement out(a.field_dim());
    for (const auto& [k, c] : a.terms()) {
        const auto g = wick::gradings(k);
        if (g.deg_a == 0) continue;
        const double scale = 1.0 / static_cast<double>(g.deg_s + g.deg_a);
        for (std::size_t var = 0; var < dim2; ++var) {
            const auto [sign, rest] = forms::interior(var, k.form);
            if (sign == 0) continue;
            out.add_term({k.v, wick::z_shift(k.z, var, 1), rest}, (scale * sign) * c);
        }
    }
    return out;
}

/// Projection onto deg_s = deg_a = 0, keeping every power of v.
inline WickElement sigma(const WickElement& a) {
    return a.filter([](const WickKey& k) { return k.z == 0 && k.form == 0; });
}

/// sigma(a) as a v-series: entry r is the coefficient of v^r.
inline std::vector<Signomial> sigma_series(const WickElement& a, int max_v) {
    std::vector<Signomial> out(static_cast<std::size_t>(max_v + 1), Signomial(a.field_dim()));
    for (const auto& [k, c] : a.terms())
        if (k.z == 0 && k.form == 0 && k.v <= max_v) out[static_cast<std::size_t>(k.v)] += c;
    return out;
}

/// Exterior-covariant derivative on the Wick bundle,
///   D(c Z e^I) = e^a ^ (e_a(c) Z - c Gamma(g, a, b) z^b dZ/dz^g) e^I + c Z d(e^I).
inline WickElement dconn_apply(const WickElement& a, const GeometryBundle& geo) {
    const std::size_t dim2 = geo.dim2();
    const auto& gamma = geo.dconn.gamma;
    WickElement out(a.field_dim());
    for (const auto& [k, c] : a.terms()) {
        for (std::size_t al = 0; al < dim2; ++al) {
            const int sign = forms::wedge_sign(forms::single(al), k.form);
            if (sign == 0) continue;
            const FormMask form = k.form | forms::single(al);
            const Signomial dc = geo.frame.apply(c, al);
            if (!dc.is_zero()) out.add_term({k.v, k.z, form}, static_cast<double>(sign) * dc);
            for (std::size_t g = 0; g < dim2; ++g) {
                const unsigned m = wick::z_get(k.z, g);
                if (m == 0) continue;
                const ZDeg lowered = wick::z_shift(k.z, g, -1);
                for (std::size_t b = 0; b < dim2; ++b) {
                    const auto& gab = gamma(g, al, b);
                    if (gab.is_zero()) continue;
                    out.add_term({k.v, wick::z_shift(lowered, b, 1), form},
                                 static_cast<double>(-sign * static_cast<int>(m)) * (gab * c));
                }
            }
        }
        if (k.form != 0) {
            for (const auto& [mask, coef] : forms::coframe_d(k.form, geo.w())) out.add_term({k.v, k.z, mask}, coef * c);
        }
    }
    return out;
}

/// T = (1/2) z^g theta_gt T'^t_ab e^a ^ e^b with T' the vector-valued torsion
/// D_X Y - D_Y X - [X, Y] (minus the stored component-list convention).
inline WickElement torsion_element(const GeometryBundle& geo) {
    const std::size_t dim2 = geo.dim2();
    const auto& t = geo.torsion.components;
    const auto& theta = geo.symp.theta_lower;
    WickElement out(geo.field_dim());
    for (std::size_t a = 0; a < dim2; ++a) {
        for (std::size_t b = a + 1; b < dim2; ++b) {
            const FormMask form = forms::single(a) | forms::single(b);
            for (std::size_t g = 0; g < dim2; ++g) {
                Signomial c(geo.field_dim());
                for (std::size_t tau = 0; tau < dim2; ++tau)
                    if (!theta(g, tau).is_zero() && !t(tau, a, b).is_zero()) c -= theta(g, tau) * t(tau, a, b);
                out.add_term({0, wick::z_unit(g), form}, c);
            }
        }
    }
    return out;
}

/// R = (1/4) z^g z^f theta_gt R^t_fab e^a ^ e^b.
inline WickElement curvature_element(const GeometryBundle& geo) {
    const std::size_t dim2 = geo.dim2();
    const auto& r = geo.curvature.components;
    const auto& theta = geo.symp.theta_lower;
    WickElement out(geo.field_dim());
    for (std::size_t a = 0; a < dim2; ++a) {
        for (std::size_t b = a + 1; b < dim2; ++b) {
            const FormMask form = forms::single(a) | forms::single(b);
            for (std::size_t g = 0; g < dim2; ++g) {
                for (std::size_t f = 0; f < dim2; ++f) {
                    Signomial c(geo.field_dim());
                    for (std::size_t tau = 0; tau < dim2; ++tau)
                        if (!theta(g, tau).is_zero() && !r(tau, f, a, b).is_zero()) c += theta(g, tau) * r(tau, f, a, b);
                    out.add_term({0, wick::z_mul(wick::z_unit(g), wick::z_unit(f)), form}, 0.5 * c);
                }
            }
        }
    }
    return out;
}

/// theta_ga z^g e^a; delta = (i/v) ad of this element.
inline WickElement delta_generator(const GeometryBundle& geo) {
    const std::size_t dim2 = geo.dim2();
    WickElement out(geo.field_dim());
    for (std::size_t g = 0; g < dim2; ++g)
        for (std::size_t a = 0; a < dim2; ++a)
            out.add_term({0, wick::z_unit(g), forms::single(a)}, geo.symp.theta_lower(g, a));
    return out;
}

} // namespace fedq::fedosov
