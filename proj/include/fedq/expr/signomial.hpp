#pragma once

// Signomial scalar fields: finite sums of complex-weighted monomials with real
// exponents in the 2n coordinates u = (x^1..x^n, y^1..y^n).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fedq/errors.hpp"
#include "fedq/expr/gamma.hpp"

namespace fedq::expr {

using Complex = std::complex<double>;
using Exponents = std::vector<double>;

/// Terms whose magnitude falls below this fraction of the largest magnitude
/// entering an arithmetic step are dropped.
inline constexpr double kDeadZone = 1e-13;

/// Two exponents closer than this are the same exponent.
inline constexpr double kExponentTolerance = 1e-9;

struct Term {
    Complex coeff;
    Exponents exps;
};

/// Fractional order and base dimension. alpha == 1 selects classical derivatives.
struct AlphaContext {
    double alpha = 1.0;
    int n = 1;

    [[nodiscard]] bool classical() const { return alpha == 1.0; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(2 * n); }

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw MalformedInput("alpha out of range (0,1]");
        if (n < 1) throw MalformedInput("n must be >= 1");
    }
};

/// Counts Caputo applications on exponents outside the convergent region p > 0.
struct CaputoAudit {
    std::size_t outside_convergent = 0;
};

namespace detail {

inline bool exps_less(const Exponents& a, const Exponents& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - kExponentTolerance) return true;
        if (a[i] > b[i] + kExponentTolerance) return false;
    }
    return false;
}

inline bool exps_equal(const Exponents& a, const Exponents& b) {
    return !exps_less(a, b) && !exps_less(b, a);
}

inline bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

} // namespace detail

class Signomial {
public:
    /// The zero field; compatible with any dimension.
    Signomial() = default;
    explicit Signomial(std::size_t dim) : dim_(dim) {}

    static Signomial constant(std::size_t dim, Complex c) {
        return from_terms(dim, {Term{c, Exponents(dim, 0.0)}});
    }

    static Signomial variable(std::size_t dim, std::size_t index, Complex c = 1.0) {
        Exponents e(dim, 0.0);
        e.at(index) = 1.0;
        return from_terms(dim, {Term{c, std::move(e)}});
    }

    static Signomial monomial(Complex c, Exponents e) {
        const std::size_t dim = e.size();
        return from_terms(dim, {Term{c, std::move(e)}});
    }

    /// Canonicalizes raw terms: like exponents merge, dead-zone terms drop.
    static Signomial from_terms(std::size_t dim, std::vector<Term> raw) {
        double ref = 0.0;
        for (const auto& t : raw) {
            if (t.exps.size() != dim) throw MalformedInput("exponent vector length does not match dimension");
            if (!detail::is_finite(t.coeff)) throw MalformedInput("non-finite coefficient");
            for (double p : t.exps)
                if (!std::isfinite(p)) throw MalformedInput("non-finite exponent");
            ref = std::max(ref, std::abs(t.coeff));
        }
        return canonical(dim, std::move(raw), ref);
    }

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }

    [[nodiscard]] double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
        return m;
    }

    /// Coefficient of the constant monomial (zero if absent).
    [[nodiscard]] Complex constant_part() const {
        for (const auto& t : terms_) {
            if (std::all_of(t.exps.begin(), t.exps.end(), [](double p) { return std::abs(p) <= kExponentTolerance; }))
                return t.coeff;
        }
        return 0.0;
    }

    /// Exact arithmetic result coefficient lookup by exponent vector.
    [[nodiscard]] Complex coefficient(const Exponents& e) const {
        for (const auto& t : terms_)
            if (detail::exps_equal(t.exps, e)) return t.coeff;
        return 0.0;
    }

    friend Signomial operator+(const Signomial& a, const Signomial& b) {
        const std::size_t dim = common_dim(a, b);
        std::vector<Term> raw;
        raw.reserve(a.size() + b.size());
        raw.insert(raw.end(), a.terms_.begin(), a.terms_.end());
        raw.insert(raw.end(), b.terms_.begin(), b.terms_.end());
        return canonical(dim, std::move(raw), std::max(a.max_abs_coeff(), b.max_abs_coeff()));
    }

    friend Signomial operator-(const Signomial& a) {
        Signomial r = a;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }

    friend Signomial operator-(const Signomial& a, const Signomial& b) { return a + (-b); }

    friend Signomial operator*(const Signomial& a, const Signomial& b) {
        const std::size_t dim = common_dim(a, b);
        if (a.is_zero() || b.is_zero()) return Signomial(dim);
        std::vector<Term> raw;
        raw.reserve(a.size() * b.size());
        double ref = 0.0;
        for (const auto& ta : a.terms_) {
            for (const auto& tb : b.terms_) {
                Term t{ta.coeff * tb.coeff, ta.exps};
                for (std::size_t i = 0; i < dim; ++i) {
                    t.exps[i] += tb.exps[i];
                    if (t.exps[i] == 0.0) t.exps[i] = 0.0;
                }
                ref = std::max(ref, std::abs(t.coeff));
                raw.push_back(std::move(t));
            }
        }
        return canonical(dim, std::move(raw), ref);
    }

    friend Signomial operator*(Complex c, const Signomial& a) {
        if (c == Complex(0.0)) return Signomial(a.dim_);
        Signomial r = a;
        for (auto& t : r.terms_) t.coeff *= c;
        return r;
    }
    friend Signomial operator*(const Signomial& a, Complex c) { return c * a; }

    Signomial& operator+=(const Signomial& o) { return *this = *this + o; }
    Signomial& operator-=(const Signomial& o) { return *this = *this - o; }
    Signomial& operator*=(const Signomial& o) { return *this = *this * o; }

    [[nodiscard]] std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        os.precision(10);
        bool first = true;
        for (const auto& t : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << t.coeff.real();
            if (t.coeff.imag() != 0.0) os << (t.coeff.imag() < 0 ? "-" : "+") << std::abs(t.coeff.imag()) << "i";
            os << ")";
            for (std::size_t i = 0; i < t.exps.size(); ++i)
                if (t.exps[i] != 0.0) os << "*u" << i << "^" << t.exps[i];
        }
        return os.str();
    }

private:
    static std::size_t common_dim(const Signomial& a, const Signomial& b) {
        if (a.dim_ == 0) return b.dim_;
        if (b.dim_ == 0 || a.dim_ == b.dim_) return a.dim_;
        throw MalformedInput("signomial dimension mismatch");
    }

    static Signomial canonical(std::size_t dim, std::vector<Term> raw, double ref) {
        std::stable_sort(raw.begin(), raw.end(),
                         [](const Term& a, const Term& b) { return detail::exps_less(a.exps, b.exps); });
        Signomial out(dim);
        const double cut = kDeadZone * ref;
        for (auto& t : raw) {
            if (!out.terms_.empty() && detail::exps_equal(out.terms_.back().exps, t.exps)) {
                out.terms_.back().coeff += t.coeff;
            } else {
                if (!out.terms_.empty() && std::abs(out.terms_.back().coeff) <= cut) out.terms_.pop_back();
                out.terms_.push_back(std::move(t));
            }
        }
        if (!out.terms_.empty() && std::abs(out.terms_.back().coeff) <= cut) out.terms_.pop_back();
        return out;
    }

    std::size_t dim_ = 0;
    std::vector<Term> terms_;
};

inline Signomial normalize(std::size_t dim, std::vector<Term> raw) { return Signomial::from_terms(dim, std::move(raw)); }
inline Signomial add(const Signomial& a, const Signomial& b) { return a + b; }
inline Signomial mul(const Signomial& a, const Signomial& b) { return a * b; }
inline Signomial scale(const Signomial& a, Complex c) { return c * a; }

/// Equality up to the dead zone: a - b canonicalizes to the empty field.
inline bool term_equal(const Signomial& a, const Signomial& b) { return (a - b).is_zero(); }

/// Classical partial derivative in coordinate `coord`.
inline Signomial partial_int(const Signomial& a, std::size_t coord) {
    std::vector<Term> raw;
    raw.reserve(a.size());
    for (const auto& t : a.terms()) {
        const double p = t.exps.at(coord);
        if (std::abs(p) <= kExponentTolerance) continue;
        Term d{t.coeff * p, t.exps};
        d.exps[coord] = p - 1.0;
        if (d.exps[coord] == 0.0) d.exps[coord] = 0.0;
        raw.push_back(std::move(d));
    }
    return Signomial::from_terms(a.dim(), std::move(raw));
}

/// Left Caputo derivative of order alpha (base point 0) by the generalized power rule
///   u^p -> Gamma(p+1)/Gamma(p+1-alpha) u^(p-alpha).
inline Signomial caputo(const Signomial& a, std::size_t coord, const AlphaContext& ctx, CaputoAudit* audit = nullptr) {
    if (ctx.classical()) return partial_int(a, coord);
    const double alpha = ctx.alpha;
    std::vector<Term> raw;
    raw.reserve(a.size());
    for (const auto& t : a.terms()) {
        const double p = t.exps.at(coord);
        if (std::abs(p) <= kExponentTolerance) continue;
        const auto ratio = gamma_ratio(p + 1.0, p + 1.0 - alpha);
        if (!ratio) {
            std::ostringstream os;
            os << "Caputo derivative in coordinate " << coord << " hits a gamma pole at exponent " << p
               << " (term " << Signomial::from_terms(a.dim(), {t}).to_string() << ")";
            throw FractionalDomainError(os.str());
        }
        if (audit && p < 0.0) ++audit->outside_convergent;
        if (*ratio == 0.0) continue;
        Term d{t.coeff * *ratio, t.exps};
        d.exps[coord] = p - alpha;
        raw.push_back(std::move(d));
    }
    return Signomial::from_terms(a.dim(), std::move(raw));
}

/// Reciprocal of a single-term signomial.
inline Signomial reciprocal(const Signomial& a) {
    if (a.size() != 1)
        throw OutsideExpressionClass("reciprocal requires exactly one term, got " + std::to_string(a.size()));
    const auto& t = a.terms().front();
    Exponents e = t.exps;
    for (auto& p : e) p = (p == 0.0) ? 0.0 : -p;
    return Signomial::from_terms(a.dim(), {Term{1.0 / t.coeff, std::move(e)}});
}

/// Point evaluation; every coordinate must be strictly positive.
inline Complex eval_at(const Signomial& a, std::span<const double> point) {
    if (a.dim() != 0 && point.size() != a.dim()) throw MalformedInput("evaluation point has wrong dimension");
    std::vector<double> logs(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (!(point[i] > 0.0)) throw EvaluationDomainError("evaluation point has a non-positive coordinate");
        logs[i] = std::log(point[i]);
    }
    Complex sum = 0.0;
    for (const auto& t : a.terms()) {
        double s = 0.0;
        for (std::size_t i = 0; i < t.exps.size(); ++i) s += t.exps[i] * logs[i];
        sum += t.coeff * std::exp(s);
    }
    return sum;
}

/// Largest |a(u)| over the given points.
inline double max_abs_at(const Signomial& a, std::span<const std::vector<double>> points) {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, std::abs(eval_at(a, p)));
    return m;
}

} // namespace fedq::expr
