#pragma once

#include <vector>

#include "fedq/geometry/dconnection.hpp"

namespace fedq::geometry {

/// Almost complex structure on the adapted frame: J(e_i) = -e_{n+i}, J(e_{n+i}) = e_i.
/// `J(c, b)` is the component of e_c in J(e_b); entries are exact constants.
inline std::vector<double> almost_complex_matrix(std::size_t n) {
    std::vector<double> j(4 * n * n, 0.0);
    const std::size_t d = 2 * n;
    for (std::size_t i = 0; i < n; ++i) {
        j[(n + i) * d + i] = -1.0;
        j[i * d + (n + i)] = 1.0;
    }
    return j;
}

/// theta, its inverse, and Lambda = theta^-1 - i g^-1 on the adapted frame.
struct AlmostSymplectic {
    std::size_t n = 0;
    SigMatrix theta_lower; ///< theta_ab = g(J e_a, e_b)
    SigMatrix theta_upper; ///< inverse matrix of theta_lower
    SigMatrix lambda;      ///< Lambda^ab
    std::vector<double> J; ///< row-major 2n x 2n, J(c, b) = J[c * 2n + b]

    [[nodiscard]] double j(std::size_t c, std::size_t b) const { return J[c * 2 * n + b]; }
};

/// theta = g(J., .): block [[0, -g], [g, 0]] in (h, v) ordering, so that the
/// Poisson bracket of the flat configuration has {x, y} = +1.
inline AlmostSymplectic almost_symplectic(const MetricBlocks& metric) {
    const std::size_t n = metric.n;
    const std::size_t dim2 = 2 * n;
    const std::size_t dim = metric.full.data().empty() ? 0 : metric.full(0, 0).dim();
    AlmostSymplectic s;
    s.n = n;
    s.J = almost_complex_matrix(n);
    s.theta_lower = SigMatrix(dim2, dim);
    s.theta_upper = SigMatrix(dim2, dim);
    s.lambda = SigMatrix(dim2, dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            s.theta_lower(i, n + k) = -metric.h(i, k);
            s.theta_lower(n + k, i) = metric.h(i, k);
            s.theta_upper(i, n + k) = metric.h_inv(i, k);
            s.theta_upper(n + k, i) = -metric.h_inv(i, k);
        }
    }
    for (std::size_t a = 0; a < dim2; ++a)
        for (std::size_t b = 0; b < dim2; ++b)
            s.lambda(a, b) = s.theta_upper(a, b) - Complex(0.0, 1.0) * metric.full_inv(a, b);
    return s;
}

/// {f, g} = theta^ab e_a(f) e_b(g).
inline Signomial poisson_bracket(const Signomial& f, const Signomial& g, const AlmostSymplectic& symp,
                                 const Frame& frame) {
    const std::size_t dim2 = frame.dim();
    std::vector<Signomial> ef(dim2), eg(dim2);
    for (std::size_t a = 0; a < dim2; ++a) {
        ef[a] = frame.apply(f, a);
        eg[a] = frame.apply(g, a);
    }
    Signomial out(frame.dim());
    for (std::size_t a = 0; a < dim2; ++a)
        for (std::size_t b = 0; b < dim2; ++b)
            if (!symp.theta_upper(a, b).is_zero() && !ef[a].is_zero() && !eg[b].is_zero())
                out += symp.theta_upper(a, b) * ef[a] * eg[b];
    return out;
}

/// omega = (1/2) (D_{y^i} L) e^i; returns the n components on the h-co-frame.
inline std::vector<Signomial> lagrange_one_form(const LagrangianSpec& spec, expr::CaputoAudit* audit = nullptr) {
    const auto n = static_cast<std::size_t>(spec.ctx.n);
    std::vector<Signomial> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * base_derivative(spec.lagrangian, n + i, spec.ctx, audit);
    return out;
}

/// Nijenhuis components N^c_ab of J built from the frame brackets,
///   N(X, Y) = [JX, JY] - J[JX, Y] - J[X, JY] - [X, Y];
/// J has constant components, so only the structure coefficients w enter.
inline SigTensor<3> nijenhuis_tensor(const AlmostSymplectic& symp, const SigTensor<3>& w, std::size_t field_dim) {
    const std::size_t dim2 = 2 * symp.n;
    SigTensor<3> out(dim2, field_dim);
    for (std::size_t c = 0; c < dim2; ++c) {
        for (std::size_t a = 0; a < dim2; ++a) {
            for (std::size_t b = 0; b < dim2; ++b) {
                Signomial acc(field_dim);
                for (std::size_t m = 0; m < dim2; ++m) {
                    const double jma = symp.j(m, a);
                    const double jmb = symp.j(m, b);
                    for (std::size_t v = 0; v < dim2; ++v) {
                        const double jvb = symp.j(v, b);
                        if (jma != 0.0 && jvb != 0.0 && !w(c, m, v).is_zero()) acc += (jma * jvb) * w(c, m, v);
                    }
                    for (std::size_t k = 0; k < dim2; ++k) {
                        const double jck = symp.j(c, k);
                        if (jck == 0.0) continue;
                        if (jma != 0.0 && !w(k, m, b).is_zero()) acc -= (jck * jma) * w(k, m, b);
                        if (jmb != 0.0 && !w(k, a, m).is_zero()) acc -= (jck * jmb) * w(k, a, m);
                    }
                }
                acc -= w(c, a, b);
                out(c, a, b) = acc;
            }
        }
    }
    return out;
}

/// max over components and sample points of |N^c_ab - 4 T^c_ab|.
inline double nijenhuis_residual(const AlmostSymplectic& symp, const TorsionTensor& t, const SigTensor<3>& w,
                                 std::size_t field_dim, std::span<const Point> sample_points) {
    const auto nij = nijenhuis_tensor(symp, w, field_dim);
    double worst = 0.0;
    nij.for_each_index([&](const std::array<std::size_t, 3>& idx) {
        const Signomial diff = nij.at(idx) - 4.0 * t.components.at(idx);
        if (!diff.is_zero()) worst = std::max(worst, expr::max_abs_at(diff, sample_points));
    });
    return worst;
}

} // namespace fedq::geometry
