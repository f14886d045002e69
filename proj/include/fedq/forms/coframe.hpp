#pragma once

// Antisymmetric products of N-adapted co-frame elements e^0..e^{2n-1}, encoded
// as bitmasks of strictly increasing index sets.

#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "fedq/expr/tensor.hpp"

namespace fedq::forms {

using FormMask = std::uint32_t;
using expr::Signomial;

inline int form_degree(FormMask m) { return std::popcount(m); }

inline FormMask single(std::size_t index) { return FormMask{1} << index; }

/// Sign of e^I ^ e^J relative to e^(I|J); 0 when the sets overlap.
inline int wedge_sign(FormMask a, FormMask b) {
    if (a & b) return 0;
    int swaps = 0;
    for (FormMask rest = b; rest; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        // elements of a that must move past e^j
        swaps += std::popcount(a >> (j + 1));
    }
    return (swaps % 2) ? -1 : 1;
}

/// Interior product i(e_index) e^I = sign * e^(I \ index); sign 0 if index not in I.
inline std::pair<int, FormMask> interior(std::size_t index, FormMask m) {
    const FormMask bit = single(index);
    if (!(m & bit)) return {0, 0};
    const int before = std::popcount(m & (bit - 1));
    return {(before % 2) ? -1 : 1, m & ~bit};
}

/// Ordered indices of a mask.
inline std::vector<std::size_t> indices(FormMask m) {
    std::vector<std::size_t> out;
    for (; m; m &= m - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    return out;
}

using FormTerms = std::map<FormMask, Signomial>;

inline void accumulate(FormTerms& into, FormMask m, const Signomial& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = into.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) into.erase(it);
    }
}

/// d(e^I) for a product of co-frame elements, given structure coefficients
/// w(c, a, b) with [e_a, e_b] = w^c_ab e_c, so that d e^c = -sum_{a<b} w^c_ab e^a ^ e^b.
inline FormTerms coframe_d(FormMask m, const expr::SigTensor<3>& w) {
    FormTerms out;
    const auto idx = indices(m);
    const std::size_t dim = w.extent();
    for (std::size_t s = 0; s < idx.size(); ++s) {
        FormMask before = 0, after = 0;
        for (std::size_t t = 0; t < idx.size(); ++t) {
            if (t < s) before |= single(idx[t]);
            if (t > s) after |= single(idx[t]);
        }
        const double pos_sign = (s % 2) ? -1.0 : 1.0;
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = a + 1; b < dim; ++b) {
                const auto& coef = w(idx[s], a, b);
                if (coef.is_zero()) continue;
                const FormMask pair = single(a) | single(b);
                const int s1 = wedge_sign(before, pair);
                if (s1 == 0) continue;
                const int s2 = wedge_sign(before | pair, after);
                if (s2 == 0) continue;
                accumulate(out, before | pair | after, (-pos_sign * s1 * s2) * coef);
            }
        }
    }
    return out;
}

} // namespace fedq::forms
