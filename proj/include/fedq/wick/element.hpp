#pragma once

// Formal Wick-algebra elements: finite sums of
//   c(u) * v^k * (z^0)^{m_0} ... (z^{2n-1})^{m_{2n-1}} * e^{I}
// with signomial coefficients c, fiber exponents m and co-frame index sets I.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "fedq/forms/coframe.hpp"

namespace fedq::wick {

using expr::Complex;
using expr::Signomial;
using forms::FormMask;

/// Fiber exponents packed eight bits per variable (2n <= 8).
using ZDeg = std::uint64_t;

inline constexpr std::size_t kMaxFiberVariables = 8;

inline unsigned z_get(ZDeg z, std::size_t var) { return static_cast<unsigned>((z >> (8 * var)) & 0xffu); }

inline ZDeg z_shift(ZDeg z, std::size_t var, int delta) {
    const int now = static_cast<int>(z_get(z, var)) + delta;
    return (z & ~(ZDeg{0xff} << (8 * var))) | (static_cast<ZDeg>(now) << (8 * var));
}

inline ZDeg z_unit(std::size_t var) { return ZDeg{1} << (8 * var); }

/// Degree-wise sum of fiber exponents; no carry since each field stays below 256.
inline ZDeg z_mul(ZDeg a, ZDeg b) { return a + b; }

inline int z_degree(ZDeg z) {
    int s = 0;
    for (std::size_t v = 0; v < kMaxFiberVariables; ++v) s += static_cast<int>(z_get(z, v));
    return s;
}

inline ZDeg z_from(std::span<const unsigned> exps) {
    ZDeg z = 0;
    for (std::size_t v = 0; v < exps.size(); ++v) z = z_shift(z, v, static_cast<int>(exps[v]));
    return z;
}

struct WickKey {
    int v = 0;
    ZDeg z = 0;
    FormMask form = 0;

    friend bool operator<(const WickKey& a, const WickKey& b) {
        return std::tie(a.v, a.z, a.form) < std::tie(b.v, b.z, b.form);
    }
    friend bool operator==(const WickKey& a, const WickKey& b) = default;
};

struct Gradings {
    int deg_v = 0;
    int deg_s = 0;
    int deg_a = 0;
    int total = 0; ///< Deg = 2 deg_v + deg_s
};

inline Gradings gradings(const WickKey& k) {
    const int s = z_degree(k.z);
    return {k.v, s, forms::form_degree(k.form), 2 * k.v + s};
}

class WickElement {
public:
    using TermMap = std::map<WickKey, Signomial>;

    WickElement() = default;
    explicit WickElement(std::size_t field_dim) : field_dim_(field_dim) {}

    static WickElement scalar(const Signomial& c) {
        WickElement w(c.dim());
        w.add_term({}, c);
        return w;
    }

    static WickElement monomial(const Signomial& c, int v, ZDeg z, FormMask form) {
        WickElement w(c.dim());
        w.add_term({v, z, form}, c);
        return w;
    }

    /// The fiber coordinate z^var with unit coefficient.
    static WickElement fiber(std::size_t field_dim, std::size_t var) {
        return monomial(Signomial::constant(field_dim, 1.0), 0, z_unit(var), 0);
    }

    [[nodiscard]] std::size_t field_dim() const { return field_dim_; }
    [[nodiscard]] const TermMap& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }

    [[nodiscard]] const Signomial* find(const WickKey& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? nullptr : &it->second;
    }

    void add_term(const WickKey& k, const Signomial& c) {
        if (c.is_zero()) return;
        if (field_dim_ == 0) field_dim_ = c.dim();
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    /// Terms satisfying `keep`.
    [[nodiscard]] WickElement filter(const std::function<bool(const WickKey&)>& keep) const {
        WickElement out(field_dim_);
        for (const auto& [k, c] : terms_)
            if (keep(k)) out.terms_.emplace(k, c);
        return out;
    }

    /// Part of total degree Deg = `deg`.
    [[nodiscard]] WickElement degree_part(int deg) const {
        return filter([deg](const WickKey& k) { return gradings(k).total == deg; });
    }

    [[nodiscard]] WickElement form_part(int deg_a) const {
        return filter([deg_a](const WickKey& k) { return forms::form_degree(k.form) == deg_a; });
    }

    /// Terms with Deg <= `max_deg`.
    [[nodiscard]] WickElement truncated(int max_deg) const {
        return filter([max_deg](const WickKey& k) { return gradings(k).total <= max_deg; });
    }

    [[nodiscard]] int max_total_degree() const {
        int m = -1;
        for (const auto& [k, c] : terms_) m = std::max(m, gradings(k).total);
        return m;
    }

    /// Sorted distinct form degrees present.
    [[nodiscard]] std::vector<int> form_degrees() const {
        std::vector<int> out;
        for (const auto& [k, c] : terms_) {
            const int d = forms::form_degree(k.form);
            if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    WickElement& operator+=(const WickElement& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    WickElement& operator-=(const WickElement& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }

    friend WickElement operator+(WickElement a, const WickElement& b) { return a += b; }
    friend WickElement operator-(WickElement a, const WickElement& b) { return a -= b; }
    friend WickElement operator-(const WickElement& a) { return Complex(-1.0) * a; }

    friend WickElement operator*(Complex s, const WickElement& a) {
        WickElement out(a.field_dim_);
        if (s == Complex(0.0)) return out;
        for (const auto& [k, c] : a.terms_) out.terms_.emplace(k, s * c);
        return out;
    }

    /// Multiplication by a scalar field (commutes with every factor).
    friend WickElement operator*(const Signomial& s, const WickElement& a) {
        WickElement out(a.field_dim_ ? a.field_dim_ : s.dim());
        for (const auto& [k, c] : a.terms_) out.add_term(k, s * c);
        return out;
    }

private:
    std::size_t field_dim_ = 0;
    TermMap terms_;
};

/// Largest |coefficient(u)| over terms and sample points.
inline double max_abs_at(const WickElement& a, std::span<const std::vector<double>> points) {
    double m = 0.0;
    for (const auto& [k, c] : a.terms()) m = std::max(m, expr::max_abs_at(c, points));
    return m;
}

/// Largest coefficient magnitude over all terms (no evaluation).
inline double max_abs_coeff(const WickElement& a) {
    double m = 0.0;
    for (const auto& [k, c] : a.terms()) m = std::max(m, c.max_abs_coeff());
    return m;
}

/// Multiplication by i/v. The v^0 part must vanish.
inline WickElement i_over_v(const WickElement& a) {
    WickElement out(a.field_dim());
    for (const auto& [k, c] : a.terms()) {
        if (k.v == 0) throw ComputationError("division by v of an element with a v^0 component");
        out.add_term({k.v - 1, k.z, k.form}, Complex(0.0, 1.0) * c);
    }
    return out;
}

} // namespace fedq::wick
