#pragma once

#include <cstddef>

#include "fedq/expr/signomial.hpp"
#include "fedq/expr/tensor.hpp"

namespace fedq::geometry {

using expr::AlphaContext;
using expr::Complex;
using expr::Signomial;
using expr::SigMatrix;
using expr::SigTensor;

/// Coordinate index helpers: u = (x^0..x^{n-1}, y^0..y^{n-1}).
inline std::size_t h_index(std::size_t i) { return i; }
inline std::size_t v_index(const AlphaContext& ctx, std::size_t a) { return static_cast<std::size_t>(ctx.n) + a; }

/// Base (Caputo or classical) derivative along coordinate `coord`.
inline Signomial base_derivative(const Signomial& f, std::size_t coord, const AlphaContext& ctx,
                                 expr::CaputoAudit* audit = nullptr) {
    return expr::caputo(f, coord, ctx, audit);
}

/// N-adapted frame e_j = d_j - N^a_j d_a, e_b = d_b acting on signomials.
class Frame {
public:
    Frame() = default;
    /// `nonlinear(a, j)` holds N^a_j.
    Frame(AlphaContext ctx, SigMatrix nonlinear, expr::CaputoAudit* audit = nullptr)
        : ctx_(ctx), n_(std::move(nonlinear)), audit_(audit) {}

    [[nodiscard]] const AlphaContext& context() const { return ctx_; }
    [[nodiscard]] std::size_t dim() const { return ctx_.dim(); }
    [[nodiscard]] const SigMatrix& nonlinear() const { return n_; }
    [[nodiscard]] expr::CaputoAudit* audit() const { return audit_; }

    [[nodiscard]] Signomial derivative(const Signomial& f, std::size_t coord) const {
        return base_derivative(f, coord, ctx_, audit_);
    }

    /// e_index(f).
    [[nodiscard]] Signomial apply(const Signomial& f, std::size_t index) const {
        const auto n = static_cast<std::size_t>(ctx_.n);
        if (index >= n) return derivative(f, index);
        Signomial out = derivative(f, index);
        for (std::size_t a = 0; a < n; ++a) {
            const auto& coeff = n_(a, index);
            if (coeff.is_zero()) continue;
            out -= coeff * derivative(f, n + a);
        }
        return out;
    }

private:
    AlphaContext ctx_;
    SigMatrix n_;
    expr::CaputoAudit* audit_ = nullptr;
};

} // namespace fedq::geometry
