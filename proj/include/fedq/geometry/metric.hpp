#pragma once

#include <sstream>
#include <span>
#include <vector>

#include "fedq/errors.hpp"
#include "fedq/geometry/frame.hpp"

namespace fedq::geometry {

using Point = std::vector<double>;

/// A regular (fractional) Lagrangian L(x, y).
struct LagrangianSpec {
    Signomial lagrangian;
    AlphaContext ctx;
};

/// Hessian metric in h- and v-blocks. The v-block carries the same entries as the
/// h-block under the index identification a <-> i.
struct MetricBlocks {
    std::size_t n = 0;
    SigMatrix h;        ///< g_ij, n x n
    SigMatrix h_inv;    ///< g^ij
    SigMatrix full;     ///< diag(g, g) on the 2n adapted frame
    SigMatrix full_inv; ///< diag(g^-1, g^-1)
};

/// g_ij = (1/4)(D_i D_j + D_j D_i) L with y-derivatives. Only diagonal
/// single-monomial Hessians are accepted; they invert exactly.
inline MetricBlocks hessian_metric(const LagrangianSpec& spec, std::span<const Point> sample_points = {},
                                   expr::CaputoAudit* audit = nullptr) {
    const auto& ctx = spec.ctx;
    ctx.validate();
    const auto n = static_cast<std::size_t>(ctx.n);
    const std::size_t dim = ctx.dim();
    if (spec.lagrangian.dim() != 0 && spec.lagrangian.dim() != dim)
        throw MalformedInput("lagrangian dimension does not match 2n");

    std::vector<Signomial> first(n);
    for (std::size_t a = 0; a < n; ++a) first[a] = base_derivative(spec.lagrangian, n + a, ctx, audit);

    MetricBlocks m;
    m.n = n;
    m.h = SigMatrix(n, dim);
    m.h_inv = SigMatrix(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Signomial dij = base_derivative(first[j], n + i, ctx, audit);
            const Signomial dji = base_derivative(first[i], n + j, ctx, audit);
            m.h(i, j) = 0.25 * (dij + dji);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && !m.h(i, j).is_zero()) {
                std::ostringstream os;
                os << "Hessian metric has a non-zero off-diagonal entry g(" << i << "," << j
                   << ") = " << m.h(i, j).to_string() << "; only diagonal metrics are supported";
                throw OutsideExpressionClass(os.str());
            }
        }
        const auto& gii = m.h(i, i);
        if (gii.is_zero())
            throw RegularityError("Hessian metric entry g(" + std::to_string(i) + "," + std::to_string(i) +
                                  ") vanishes identically");
        if (gii.size() != 1) {
            std::ostringstream os;
            os << "Hessian metric entry g(" << i << "," << i << ") = " << gii.to_string()
               << " is not a single monomial";
            throw OutsideExpressionClass(os.str());
        }
        for (const auto& p : sample_points) {
            if (std::abs(expr::eval_at(gii, p)) == 0.0)
                throw RegularityError("Hessian metric degenerates at a sample point");
        }
        m.h_inv(i, i) = expr::reciprocal(gii);
    }

    m.full = SigMatrix(2 * n, dim);
    m.full_inv = SigMatrix(2 * n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m.full(i, j) = m.h(i, j);
            m.full(n + i, n + j) = m.h(i, j);
            m.full_inv(i, j) = m.h_inv(i, j);
            m.full_inv(n + i, n + j) = m.h_inv(i, j);
        }
    }
    return m;
}

} // namespace fedq::geometry
