#pragma once

#include "fedq/geometry/nconnection.hpp"

namespace fedq::geometry {

/// Canonical d-connection. `gamma(c, a, b)` is the component of e_c in D_{e_a} e_b
/// on the 2n adapted frame; the four blocks are views into it:
///   L^i_jk = gamma(i, k, j),       L^a_bk = gamma(n+a, k, n+b),
///   C^i_jc = gamma(i, n+c, j),     C^a_bc = gamma(n+a, n+c, n+b).
struct DConnection {
    std::size_t n = 0;
    std::size_t field_dim = 0;
    SigTensor<3> gamma;

    [[nodiscard]] const Signomial& L_h(std::size_t i, std::size_t j, std::size_t k) const { return gamma(i, k, j); }
    [[nodiscard]] const Signomial& L_v(std::size_t a, std::size_t b, std::size_t k) const {
        return gamma(n + a, k, n + b);
    }
    [[nodiscard]] const Signomial& C_h(std::size_t i, std::size_t j, std::size_t c) const {
        return gamma(i, n + c, j);
    }
    [[nodiscard]] const Signomial& C_v(std::size_t a, std::size_t b, std::size_t c) const {
        return gamma(n + a, n + c, n + b);
    }
};

/// Koszul-form coefficients on each block:
///   L^i_jk = (1/2) g^ir (e_k g_jr + e_j g_kr - e_r g_jk),
///   C^a_bc = (1/2) g^ad (e_c g_bd + e_b g_cd - e_d g_bc) with v-frames.
/// The cross blocks L^a_bk and C^i_jc repeat these under a <-> i.
inline DConnection canonical_d_connection(const MetricBlocks& metric, const Frame& frame) {
    const std::size_t n = metric.n;
    const std::size_t dim = frame.dim();
    DConnection d;
    d.n = n;
    d.field_dim = dim;
    d.gamma = SigTensor<3>(2 * n, dim);

    // Frame derivatives of the (shared) metric block along h- and v-directions.
    SigTensor<3> eh(n, dim), ev(n, dim); // e_k g_ij stored as (k, i, j)
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (metric.h(i, j).is_zero()) continue;
                eh(k, i, j) = frame.apply(metric.h(i, j), k);
                ev(k, i, j) = frame.apply(metric.h(i, j), n + k);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                Signomial lh(dim), cv(dim);
                for (std::size_t r = 0; r < n; ++r) {
                    if (metric.h_inv(i, r).is_zero()) continue;
                    lh += metric.h_inv(i, r) * (eh(k, j, r) + eh(j, k, r) - eh(r, j, k));
                    cv += metric.h_inv(i, r) * (ev(k, j, r) + ev(j, k, r) - ev(r, j, k));
                }
                lh = 0.5 * lh;
                cv = 0.5 * cv;
                d.gamma(i, k, j) = lh;
                d.gamma(n + i, k, n + j) = lh;
                d.gamma(i, n + k, j) = cv;
                d.gamma(n + i, n + k, n + j) = cv;
            }
        }
    }
    return d;
}

/// Torsion components in the convention of the canonical list
///   T^i_jk = 0, T^a_bc = 0, T^i_ja = C^i_ja, T^a_ij = Omega^a_ij, T^a_ib = e_b N^a_i - L^a_bi,
/// i.e. T(e_a, e_b) = -T^c_ab e_c for the vector-valued torsion
/// T(X, Y) = D_X Y - D_Y X - [X, Y].
struct TorsionTensor {
    SigTensor<3> components; ///< T^c_ab stored as (c, a, b)
};

inline TorsionTensor torsion(const DConnection& d, const SigTensor<3>& w) {
    const std::size_t dim2 = d.gamma.extent();
    TorsionTensor t;
    t.components = SigTensor<3>(dim2, d.field_dim);
    for (std::size_t c = 0; c < dim2; ++c)
        for (std::size_t a = 0; a < dim2; ++a)
            for (std::size_t b = 0; b < dim2; ++b)
                t.components(c, a, b) = d.gamma(c, b, a) - d.gamma(c, a, b) + w(c, a, b);
    return t;
}

/// R^t_{m a b}: R(e_a, e_b) e_m = R^t_{m a b} e_t with R(X,Y) = [D_X, D_Y] - D_[X,Y].
/// In block form this is the R (hh), P (hv) and S (vv) curvature of the d-connection.
struct CurvatureTensor {
    SigTensor<4> components; ///< stored as (t, m, a, b)
};

inline CurvatureTensor curvature(const DConnection& d, const SigTensor<3>& w, const Frame& frame) {
    const std::size_t dim2 = d.gamma.extent();
    const std::size_t dim = frame.dim();
    CurvatureTensor r;
    r.components = SigTensor<4>(dim2, dim);
    const auto& g = d.gamma;
    for (std::size_t t = 0; t < dim2; ++t) {
        for (std::size_t m = 0; m < dim2; ++m) {
            for (std::size_t a = 0; a < dim2; ++a) {
                for (std::size_t b = 0; b < dim2; ++b) {
                    if (a == b) continue;
                    Signomial acc(dim);
                    if (!g(t, b, m).is_zero()) acc += frame.apply(g(t, b, m), a);
                    if (!g(t, a, m).is_zero()) acc -= frame.apply(g(t, a, m), b);
                    for (std::size_t v = 0; v < dim2; ++v) {
                        if (!g(t, a, v).is_zero() && !g(v, b, m).is_zero()) acc += g(t, a, v) * g(v, b, m);
                        if (!g(t, b, v).is_zero() && !g(v, a, m).is_zero()) acc -= g(t, b, v) * g(v, a, m);
                        if (!w(v, a, b).is_zero() && !g(t, v, m).is_zero()) acc -= w(v, a, b) * g(t, v, m);
                    }
                    r.components(t, m, a, b) = acc;
                }
            }
        }
    }
    return r;
}

} // namespace fedq::geometry
