#pragma once

#include <span>

#include "fedq/forms/coframe.hpp"
#include "fedq/geometry/bundle.hpp"

namespace fedq::chern {

using expr::Complex;
using expr::Signomial;
using forms::FormMask;
using geometry::GeometryBundle;
using geometry::Point;

/// Differential form on the N-adapted co-frame: coefficient per strictly increasing index set.
struct AdaptedForm {
    int degree = 0;
    forms::FormTerms components;

    [[nodiscard]] bool is_zero() const { return components.empty(); }

    [[nodiscard]] Signomial component(FormMask m) const {
        auto it = components.find(m);
        return it == components.end() ? Signomial() : it->second;
    }

    [[nodiscard]] double max_abs_at(std::span<const Point> points) const {
        double m = 0.0;
        for (const auto& [mask, c] : components) m = std::max(m, expr::max_abs_at(c, points));
        return m;
    }

    friend AdaptedForm operator+(AdaptedForm a, const AdaptedForm& b) {
        for (const auto& [m, c] : b.components) forms::accumulate(a.components, m, c);
        return a;
    }
    friend AdaptedForm operator-(AdaptedForm a, const AdaptedForm& b) {
        for (const auto& [m, c] : b.components) forms::accumulate(a.components, m, -c);
        return a;
    }
    friend AdaptedForm operator*(Complex s, const AdaptedForm& a) {
        AdaptedForm out{a.degree, {}};
        for (const auto& [m, c] : a.components) forms::accumulate(out.components, m, s * c);
        return out;
    }
};

inline AdaptedForm zero_form(const Signomial& f) {
    AdaptedForm out{0, {}};
    forms::accumulate(out.components, 0, f);
    return out;
}

/// d(c e^I) = e_a(c) e^a ^ e^I + c d(e^I), with d e^c = -sum_{a<b} w^c_ab e^a ^ e^b.
inline AdaptedForm exterior_derivative(const AdaptedForm& form, const geometry::Frame& frame,
                                       const expr::SigTensor<3>& w) {
    const std::size_t dim2 = frame.dim();
    AdaptedForm out{form.degree + 1, {}};
    for (const auto& [mask, c] : form.components) {
        for (std::size_t a = 0; a < dim2; ++a) {
            const int sign = forms::wedge_sign(forms::single(a), mask);
            if (sign == 0) continue;
            const Signomial dc = frame.apply(c, a);
            if (!dc.is_zero()) forms::accumulate(out.components, mask | forms::single(a), static_cast<double>(sign) * dc);
        }
        if (mask != 0)
            for (const auto& [m, coef] : forms::coframe_d(mask, w)) forms::accumulate(out.components, m, coef * c);
    }
    return out;
}

inline AdaptedForm exterior_derivative(const AdaptedForm& form, const GeometryBundle& geo) {
    return exterior_derivative(form, geo.frame, geo.w());
}

/// tr(J R(e_a, e_b)) = J^p_t R^t_{p a b}.
inline Signomial trace_j_curvature(const GeometryBundle& geo, std::size_t a, std::size_t b) {
    const std::size_t dim2 = geo.dim2();
    Signomial out(geo.field_dim());
    for (std::size_t t = 0; t < dim2; ++t)
        for (std::size_t p = 0; p < dim2; ++p) {
            const double j = geo.symp.j(p, t);
            if (j != 0.0 && !geo.curvature.components(t, p, a, b).is_zero())
                out += j * geo.curvature.components(t, p, a, b);
        }
    return out;
}

/// gamma = -(1/4) J^p_t R^t_{p a b} e^a ^ e^b.
inline AdaptedForm chern_weyl(const GeometryBundle& geo) {
    const std::size_t dim2 = geo.dim2();
    AdaptedForm out{2, {}};
    for (std::size_t a = 0; a < dim2; ++a)
        for (std::size_t b = a + 1; b < dim2; ++b)
            forms::accumulate(out.components, forms::single(a) | forms::single(b), -0.5 * trace_j_curvature(geo, a, b));
    return out;
}

struct LemmaForms {
    AdaptedForm mu;     ///< (1/6) J^p_t T^t_{p b} e^b
    AdaptedForm lambda; ///< d mu
    AdaptedForm kappa;  ///< -(i/8) J^p_t R^t_{p a b} e^a ^ e^b - i lambda
};

inline LemmaForms lemma_forms(const GeometryBundle& geo) {
    const std::size_t dim2 = geo.dim2();
    LemmaForms out;
    out.mu.degree = 1;
    for (std::size_t b = 0; b < dim2; ++b) {
        Signomial c(geo.field_dim());
        for (std::size_t t = 0; t < dim2; ++t)
            for (std::size_t p = 0; p < dim2; ++p) {
                const double j = geo.symp.j(p, t);
                if (j != 0.0 && !geo.torsion.components(t, p, b).is_zero()) c += j * geo.torsion.components(t, p, b);
            }
        forms::accumulate(out.mu.components, forms::single(b), (1.0 / 6.0) * c);
    }
    out.lambda = exterior_derivative(out.mu, geo);
    out.kappa.degree = 2;
    for (std::size_t a = 0; a < dim2; ++a)
        for (std::size_t b = a + 1; b < dim2; ++b)
            forms::accumulate(out.kappa.components, forms::single(a) | forms::single(b),
                              Complex(0.0, -0.25) * trace_j_curvature(geo, a, b));
    out.kappa = out.kappa - Complex(0.0, 1.0) * out.lambda;
    return out;
}

/// Representative -(1/(2i)) gamma of the zero-degree class coefficient. Only the
/// representative form is computed, not its cohomology class.
inline AdaptedForm c0_representative(const AdaptedForm& gamma) { return Complex(0.0, 0.5) * gamma; }

} // namespace fedq::chern
