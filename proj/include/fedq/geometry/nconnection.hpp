#pragma once

#include <algorithm>
#include <vector>

#include "fedq/geometry/metric.hpp"

namespace fedq::geometry {

struct NConnection {
    std::vector<Signomial> semispray; ///< G^k
    SigMatrix coeffs;                 ///< N^a_j stored as coeffs(a, j)
    SigTensor<3> curvature;           ///< Omega^a_ij stored as curvature(a, i, j)
};

/// Euler-Lagrange semi-spray G^k = (1/4) g^kk [ y^h D_{y^k} (D_{x^h} L) - D_{x^k} L ].
inline std::vector<Signomial> semi_spray(const LagrangianSpec& spec, const MetricBlocks& metric,
                                         expr::CaputoAudit* audit = nullptr) {
    const auto& ctx = spec.ctx;
    const auto n = static_cast<std::size_t>(ctx.n);
    const std::size_t dim = ctx.dim();
    std::vector<Signomial> dx(n);
    for (std::size_t h = 0; h < n; ++h) dx[h] = base_derivative(spec.lagrangian, h, ctx, audit);
    std::vector<Signomial> g(n, Signomial(dim));
    for (std::size_t k = 0; k < n; ++k) {
        Signomial bracket = -dx[k];
        for (std::size_t h = 0; h < n; ++h) {
            if (dx[h].is_zero()) continue;
            bracket += Signomial::variable(dim, n + h) * base_derivative(dx[h], n + k, ctx, audit);
        }
        g[k] = 0.25 * (metric.h_inv(k, k) * bracket);
    }
    return g;
}

/// Anholonomy coefficients w^c_ab of the adapted frame, [e_a, e_b] = w^c_ab e_c.
/// The only non-zero blocks are w^{v}_{hh} = Omega and w^{v}_{hv} = e_v(N).
inline SigTensor<3> anholonomy_coefficients(const NConnection& nc, const Frame& frame) {
    const auto& ctx = frame.context();
    const auto n = static_cast<std::size_t>(ctx.n);
    const std::size_t dim = ctx.dim();
    SigTensor<3> w(2 * n, dim);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) w(n + a, i, j) = nc.curvature(a, i, j);
            for (std::size_t b = 0; b < n; ++b) {
                const Signomial ebn = frame.apply(nc.coeffs(a, i), n + b);
                w(n + a, i, n + b) = ebn;
                w(n + a, n + b, i) = -ebn;
            }
        }
    }
    return w;
}

/// N^a_j = D_{y^j} G^a and Omega^a_ij = e_j(N^a_i) - e_i(N^a_j).
inline NConnection n_connection(std::vector<Signomial> semispray, const AlphaContext& ctx,
                                expr::CaputoAudit* audit = nullptr) {
    const auto n = static_cast<std::size_t>(ctx.n);
    const std::size_t dim = ctx.dim();
    NConnection nc;
    nc.semispray = std::move(semispray);
    nc.coeffs = SigMatrix(n, dim);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t j = 0; j < n; ++j) nc.coeffs(a, j) = base_derivative(nc.semispray[a], n + j, ctx, audit);

    const Frame frame(ctx, nc.coeffs, audit);
    nc.curvature = SigTensor<3>(n, dim);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Signomial om = frame.apply(nc.coeffs(a, i), j) - frame.apply(nc.coeffs(a, j), i);
                nc.curvature(a, i, j) = om;
                nc.curvature(a, j, i) = -om;
            }
        }
    }
    return nc;
}

/// e_index(f) for the frame built from `nc`.
inline Signomial adapted_derivative(const Signomial& f, std::size_t index, const NConnection& nc,
                                    const AlphaContext& ctx) {
    return Frame(ctx, nc.coeffs).apply(f, index);
}

/// Anholonomy data plus the measured commutator mismatch
///   max_{probe, a, b, point} |([e_a, e_b] - w^c_ab e_c)(f)|.
/// Exact at alpha = 1; at alpha < 1 Caputo operators are not derivations and
/// the residual is a diagnostic.
struct Anholonomy {
    SigTensor<3> w;
    double residual = 0.0;
    std::size_t skipped_probes = 0; ///< probes whose Caputo images hit a gamma pole
};

inline std::vector<Signomial> default_probe_fields(const AlphaContext& ctx) {
    const auto n = static_cast<std::size_t>(ctx.n);
    const std::size_t dim = ctx.dim();
    std::vector<Signomial> probes;
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> e(dim, 0.0);
        e[i] = 2.0;
        probes.push_back(Signomial::monomial(1.0, e));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(dim, 0.0);
        e[i] = 1.5;
        e[n + i] = 2.5;
        probes.push_back(Signomial::monomial(1.0, e));
        std::vector<double> f(dim, 0.0);
        f[i] = 3.0;
        f[(n + i + 1) % dim] = 1.0;
        probes.push_back(Signomial::monomial(0.5, f));
    }
    return probes;
}

inline Anholonomy anholonomy(const NConnection& nc, const Frame& frame, std::span<const Point> sample_points,
                             std::span<const Signomial> probes) {
    Anholonomy out;
    out.w = anholonomy_coefficients(nc, frame);
    const std::size_t dim2 = frame.dim();
    for (const auto& f : probes) {
        double probe_residual = 0.0;
        try {
            std::vector<Signomial> ef(dim2);
            for (std::size_t c = 0; c < dim2; ++c) ef[c] = frame.apply(f, c);
            for (std::size_t a = 0; a < dim2; ++a) {
                for (std::size_t b = a + 1; b < dim2; ++b) {
                    Signomial mismatch = frame.apply(ef[b], a) - frame.apply(ef[a], b);
                    for (std::size_t c = 0; c < dim2; ++c) {
                        if (!out.w(c, a, b).is_zero()) mismatch -= out.w(c, a, b) * ef[c];
                    }
                    if (!mismatch.is_zero())
                        probe_residual = std::max(probe_residual, expr::max_abs_at(mismatch, sample_points));
                }
            }
        } catch (const FractionalDomainError&) {
            ++out.skipped_probes;
            continue;
        }
        out.residual = std::max(out.residual, probe_residual);
    }
    return out;
}

} // namespace fedq::geometry
