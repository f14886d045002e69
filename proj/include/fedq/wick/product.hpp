#pragma once

#include <map>
#include <optional>
#include <utility>

#include "fedq/expr/tensor.hpp"
#include "fedq/wick/element.hpp"

namespace fedq::wick {

using expr::SigMatrix;

namespace detail {

/// One contraction pattern of the fiber monomials z^A and z^B:
/// (iv/2)^r / r! (Lambda d_z)^r z^A (d_z)^r z^B restricted to the result
/// monomial `z`, with the v^r factor kept separate.
struct Contraction {
    int r = 0;
    ZDeg z = 0;
    Signomial coeff;
};

/// All contractions of z^A with z^B. States (remaining A, remaining B) merge
/// across orderings, so the cost is polynomial in the fiber degrees.
inline std::vector<Contraction> contractions(ZDeg za, ZDeg zb, const SigMatrix& lambda, std::size_t field_dim) {
    const std::size_t dim2 = lambda.extent();
    std::vector<Contraction> out;
    std::map<std::pair<ZDeg, ZDeg>, Signomial> level;
    level.emplace(std::make_pair(za, zb), Signomial::constant(field_dim, 1.0));
    for (int r = 0; !level.empty(); ++r) {
        for (const auto& [state, c] : level) out.push_back({r, z_mul(state.first, state.second), c});
        std::map<std::pair<ZDeg, ZDeg>, Signomial> next;
        const Complex step = Complex(0.0, 0.5) / static_cast<double>(r + 1);
        for (const auto& [state, c] : level) {
            for (std::size_t a = 0; a < dim2; ++a) {
                const unsigned ka = z_get(state.first, a);
                if (ka == 0) continue;
                for (std::size_t b = 0; b < dim2; ++b) {
                    const unsigned kb = z_get(state.second, b);
                    if (kb == 0 || lambda(a, b).is_zero()) continue;
                    const auto key = std::make_pair(z_shift(state.first, a, -1), z_shift(state.second, b, -1));
                    const Signomial term = (step * static_cast<double>(ka * kb)) * (lambda(a, b) * c);
                    auto [it, inserted] = next.try_emplace(key, term);
                    if (!inserted) it->second += term;
                }
            }
        }
        level = std::move(next);
    }
    return out;
}

} // namespace detail

/// Fiberwise Wick product
///   a o b = sum_r (iv/2)^r / r! Lambda^{a1 b1} .. Lambda^{ar br} (d_a1..d_ar a)(d_b1..d_br b),
/// with co-frame factors multiplied by the wedge product. Terms of total degree
/// above `max_degree` are not computed.
inline WickElement wick_product(const WickElement& a, const WickElement& b, const SigMatrix& lambda,
                                std::optional<int> max_degree = std::nullopt) {
    const std::size_t field_dim = a.field_dim() ? a.field_dim() : b.field_dim();
    WickElement out(field_dim);
    if (a.is_zero() || b.is_zero()) return out;
    std::map<std::pair<ZDeg, ZDeg>, std::vector<detail::Contraction>> cache;
    for (const auto& [ka, ca] : a.terms()) {
        const int deg_a = gradings(ka).total;
        for (const auto& [kb, cb] : b.terms()) {
            if (max_degree && deg_a + gradings(kb).total > *max_degree) continue;
            const int sign = forms::wedge_sign(ka.form, kb.form);
            if (sign == 0) continue;
            auto it = cache.find({ka.z, kb.z});
            if (it == cache.end())
                it = cache.emplace(std::make_pair(ka.z, kb.z), detail::contractions(ka.z, kb.z, lambda, field_dim))
                         .first;
            const Signomial cab = static_cast<double>(sign) * (ca * cb);
            for (const auto& con : it->second)
                out.add_term({ka.v + kb.v + con.r, con.z, ka.form | kb.form}, con.coeff * cab);
        }
    }
    return out;
}

/// Graded commutator [a, b] = a o b - (-1)^{|a||b|} b o a, split over form degrees.
inline WickElement graded_commutator(const WickElement& a, const WickElement& b, const SigMatrix& lambda,
                                     std::optional<int> max_degree = std::nullopt) {
    WickElement out(a.field_dim() ? a.field_dim() : b.field_dim());
    for (int p : a.form_degrees()) {
        const WickElement ap = a.form_part(p);
        for (int q : b.form_degrees()) {
            const WickElement bq = b.form_part(q);
            out += wick_product(ap, bq, lambda, max_degree);
            const WickElement ba = wick_product(bq, ap, lambda, max_degree);
            if ((p * q) % 2) out += ba;
            else out -= ba;
        }
    }
    return out;
}

/// ad(a) = [a, .]
inline auto ad_wick(const WickElement& a, const SigMatrix& lambda, std::optional<int> max_degree = std::nullopt) {
    return [a, &lambda, max_degree](const WickElement& b) { return graded_commutator(a, b, lambda, max_degree); };
}

} // namespace fedq::wick
