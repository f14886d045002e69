#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fedq/fedosov/operators.hpp"

namespace fedq::fedosov {

using geometry::Point;

struct DegreeResidual {
    int degree = 0;      ///< total degree of the r component solved at this step
    double value = 0.0;  ///< max |delta r - (T + R + D r - (i/v) r o r)| at Deg - 1 over sample points
};

/// Solution of delta r = T + R + D r - (i/v) r o r, one component per total degree.
struct FedosovState {
    std::shared_ptr<const GeometryBundle> geo;
    std::vector<Point> sample_points;
    WickElement torsion_elem;
    WickElement curvature_elem;
    std::map<int, WickElement> r; ///< Deg -> component, Deg = 2..max_degree
    std::vector<DegreeResidual> residuals;
    int max_degree = 0;    ///< requested
    int solved_degree = 1; ///< highest total degree actually solved
    std::string stop_reason; ///< why solving stopped before max_degree, if it did

    [[nodiscard]] std::size_t dim2() const { return geo->dim2(); }
    [[nodiscard]] const expr::SigMatrix& lambda() const { return geo->symp.lambda; }

    [[nodiscard]] const WickElement& component(int deg) const {
        static const WickElement empty;
        auto it = r.find(deg);
        return it == r.end() ? empty : it->second;
    }

    [[nodiscard]] WickElement total() const {
        WickElement out(geo->field_dim());
        for (const auto& [d, c] : r) out += c;
        return out;
    }

    [[nodiscard]] double max_residual() const {
        double m = 0.0;
        for (const auto& d : residuals) m = std::max(m, d.value);
        return m;
    }
};

struct SolveOptions {
    bool strict = false;
    double tolerance = 1e-9;
    /// Stop at the first degree whose Caputo derivatives hit a gamma pole instead of throwing.
    bool allow_partial = false;
};

/// Sum over k + l = deg + 2 (k, l >= 2) of r^(k) o r^(l).
inline WickElement r_square_part(const FedosovState& s, int deg) {
    WickElement out(s.geo->field_dim());
    for (const auto& [k, rk] : s.r) {
        const int l = deg + 2 - k;
        if (l < 2) continue;
        const auto it = s.r.find(l);
        if (it == s.r.end()) continue;
        out += wick::wick_product(rk, it->second, s.lambda(), deg + 2);
    }
    return out.degree_part(deg + 2);
}

/// Right-hand side of the defining equation at total degree `deg`, using the
/// components of r currently stored.
inline WickElement defining_rhs(const FedosovState& s, int deg) {
    WickElement rhs = s.torsion_elem.degree_part(deg) + s.curvature_elem.degree_part(deg);
    rhs += dconn_apply(s.component(deg), *s.geo);
    const WickElement sq = r_square_part(s, deg);
    if (!sq.is_zero()) rhs -= wick::i_over_v(sq);
    return rhs;
}

/// r^(m) = delta^-1 (T + R + D r - (i/v) r o r)^(m-1) for m = 2..max_degree.
inline FedosovState solve_r(std::shared_ptr<const GeometryBundle> geo, int max_degree,
                            std::vector<Point> sample_points, const SolveOptions& opts = {}) {
    if (max_degree < 2) throw MalformedInput("Fedosov recursion needs total degree >= 2");
    FedosovState s;
    s.geo = std::move(geo);
    s.sample_points = std::move(sample_points);
    s.torsion_elem = torsion_element(*s.geo);
    s.curvature_elem = curvature_element(*s.geo);
    s.max_degree = max_degree;
    const std::size_t dim2 = s.dim2();
    for (int m = 2; m <= max_degree; ++m) {
        WickElement rhs;
        try {
            rhs = defining_rhs(s, m - 1);
        } catch (const FractionalDomainError& e) {
            const std::string msg = "Fedosov recursion at total degree " + std::to_string(m) + ": " + e.what();
            if (!opts.allow_partial) throw FractionalDomainError(msg);
            s.stop_reason = msg;
            break;
        }
        WickElement rm = delta_inv(rhs, dim2);
        const WickElement mismatch = delta(rm, dim2) - rhs;
        const double res = wick::max_abs_at(mismatch, s.sample_points);
        s.residuals.push_back({m, res});
        s.solved_degree = m;
        if (!rm.is_zero()) s.r.emplace(m, std::move(rm));
        if (opts.strict && !(res < opts.tolerance)) {
            std::ostringstream os;
            os << "Fedosov equation residual " << res << " at total degree " << m << " exceeds " << opts.tolerance;
            throw FlatnessObstruction(os.str(), m, res);
        }
    }
    return s;
}

/// Total degree up to which r must be known for Deg <= `order` of the star product.
inline int required_r_degree(int order) { return std::max(order + 2, 2 * order + 1); }

/// D = -delta + D - (i/v) ad(r), components of total degree <= `max_out`.
inline WickElement flat_d(const WickElement& a, const FedosovState& s, int max_out) {
    const std::size_t dim2 = s.dim2();
    const WickElement src = a.truncated(max_out + 1);
    WickElement out = -delta(src, dim2);
    out += dconn_apply(src.truncated(max_out), *s.geo);
    WickElement comm(a.field_dim());
    for (const auto& [deg, rc] : s.r) {
        if (deg - 2 > max_out) break;
        comm += wick::graded_commutator(rc, src, s.lambda(), max_out + 2);
    }
    if (!comm.is_zero()) out -= wick::i_over_v(comm);
    return out.truncated(max_out);
}

/// Probe elements: every fiber monomial with deg_s <= max_s times 1 or e^a, with
/// coefficients drawn from `fields` by a seeded generator.
inline std::vector<WickElement> probe_elements(std::size_t dim2, std::span<const Signomial> fields, int max_s,
                                               unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, fields.empty() ? 0 : fields.size() - 1);
    std::vector<ZDeg> monos{0};
    for (int d = 1; d <= max_s; ++d) {
        std::vector<ZDeg> next;
        for (ZDeg z : monos) {
            if (wick::z_degree(z) != d - 1) continue;
            // extend only with variables >= the last one used, so each monomial appears once
            std::size_t last = 0;
            for (std::size_t v = 0; v < dim2; ++v)
                if (wick::z_get(z, v)) last = v;
            for (std::size_t v = (d == 1 ? 0 : last); v < dim2; ++v) next.push_back(wick::z_shift(z, v, 1));
        }
        monos.insert(monos.end(), next.begin(), next.end());
    }
    std::vector<WickElement> out;
    for (ZDeg z : monos) {
        for (int f = -1; f < static_cast<int>(dim2); ++f) {
            const FormMask form = f < 0 ? 0 : forms::single(static_cast<std::size_t>(f));
            out.push_back(WickElement::monomial(fields[pick(rng)], 0, z, form));
        }
    }
    return out;
}

/// A probe-based measurement. Probes whose Caputo derivatives hit a gamma pole
/// are skipped and counted.
struct ProbeResidual {
    double value = 0.0;
    std::size_t skipped = 0;
};

/// max over probes of |D^2 a| on components of total degree <= `max_deg` that
/// the solved part of r determines completely.
inline ProbeResidual flat_d_square_residual(const FedosovState& s, std::span<const WickElement> probes,
                                            int max_deg) {
    ProbeResidual out;
    for (const auto& a : probes) {
        const int base = a.max_total_degree();
        const int cap = std::min(max_deg, base + s.solved_degree - 3);
        if (cap < base - 2) continue;
        try {
            const WickElement once = flat_d(a, s, cap + 1);
            const WickElement twice = flat_d(once, s, cap);
            out.value = std::max(out.value, wick::max_abs_at(twice, s.sample_points));
        } catch (const FractionalDomainError&) {
            ++out.skipped;
        }
    }
    return out;
}

/// [D, delta] a - (i/v) ad(T) a and D^2 a + (i/v) ad(R) a over probes, plus the
/// probe-free identities delta T = 0, delta R = D T and the gauge diagnostic D delta^-1 r.
struct OperatorIdentityResiduals {
    ProbeResidual commutator_torsion;
    ProbeResidual square_curvature;
    double delta_torsion = 0.0;
    ProbeResidual delta_curvature;
    ProbeResidual gauge;
};

namespace detail {

template <class F>
ProbeResidual guarded(F&& fn) {
    try {
        return {fn(), 0};
    } catch (const FractionalDomainError&) {
        return {0.0, 1};
    }
}

} // namespace detail

inline OperatorIdentityResiduals operator_identities(const FedosovState& s, std::span<const WickElement> probes) {
    const std::size_t dim2 = s.dim2();
    const auto& geo = *s.geo;
    OperatorIdentityResiduals out;
    for (const auto& a : probes) {
        try {
            const WickElement lhs = dconn_apply(delta(a, dim2), geo) + delta(dconn_apply(a, geo), dim2);
            const WickElement rhs = wick::i_over_v(wick::graded_commutator(s.torsion_elem, a, s.lambda()));
            out.commutator_torsion.value =
                std::max(out.commutator_torsion.value, wick::max_abs_at(lhs - rhs, s.sample_points));
        } catch (const FractionalDomainError&) {
            ++out.commutator_torsion.skipped;
        }
        try {
            const WickElement lhs = dconn_apply(dconn_apply(a, geo), geo);
            const WickElement rhs = -wick::i_over_v(wick::graded_commutator(s.curvature_elem, a, s.lambda()));
            out.square_curvature.value =
                std::max(out.square_curvature.value, wick::max_abs_at(lhs - rhs, s.sample_points));
        } catch (const FractionalDomainError&) {
            ++out.square_curvature.skipped;
        }
    }
    out.delta_torsion = wick::max_abs_at(delta(s.torsion_elem, dim2), s.sample_points);
    out.delta_curvature = detail::guarded([&] {
        return wick::max_abs_at(delta(s.curvature_elem, dim2) - dconn_apply(s.torsion_elem, geo), s.sample_points);
    });
    out.gauge = detail::guarded(
        [&] { return wick::max_abs_at(dconn_apply(delta_inv(s.total(), dim2), geo), s.sample_points); });
    return out;
}

/// Flat section with sigma(tau(f)) = f, built degree by degree:
///   tau^(k+1) = delta^-1 ( D tau^(k) - (i/v) sum_l ad(r^(l+2)) tau^(k-l) ).
struct Lift {
    WickElement element;
    int degree = 0; ///< components of total degree <= degree are present
    std::string stop_reason;
};

inline Lift lift(const Signomial& f, const FedosovState& s, int max_deg, bool allow_partial = false) {
    const std::size_t dim2 = s.dim2();
    Lift out;
    std::vector<WickElement> parts;
    parts.push_back(WickElement::scalar(f));
    // tau^(k+1) uses r up to total degree k + 2.
    const int reachable = std::min(max_deg, s.solved_degree - 1);
    if (reachable < max_deg) {
        out.stop_reason = "Fedosov connection solved only through total degree " + std::to_string(s.solved_degree);
        if (!allow_partial) throw FractionalDomainError(out.stop_reason + ": " + s.stop_reason);
    }
    for (int k = 0; k + 1 <= reachable; ++k) {
        try {
            WickElement rhs = dconn_apply(parts[static_cast<std::size_t>(k)], *s.geo);
            WickElement comm(f.dim());
            for (int l = 0; l <= k; ++l) {
                const WickElement& rl = s.component(l + 2);
                if (rl.is_zero()) continue;
                comm += wick::graded_commutator(rl, parts[static_cast<std::size_t>(k - l)], s.lambda(), k + 2);
            }
            comm = comm.degree_part(k + 2);
            if (!comm.is_zero()) rhs -= wick::i_over_v(comm);
            parts.push_back(delta_inv(rhs.degree_part(k), dim2));
        } catch (const FractionalDomainError& e) {
            const std::string msg = "lift at total degree " + std::to_string(k + 1) + ": " + e.what();
            if (!allow_partial) throw FractionalDomainError(msg);
            out.stop_reason = msg;
            break;
        }
    }
    out.degree = static_cast<int>(parts.size()) - 1;
    out.element = WickElement(f.dim());
    for (auto& p : parts) out.element += p;
    return out;
}

inline WickElement tau_lift(const Signomial& f, const FedosovState& s, int max_deg) {
    return lift(f, s, max_deg).element;
}

/// Coefficients C_r(f, g), r = 0..order, of f * g = sigma(tau(f) o tau(g)).
/// C_r is complete when both lifts reach total degree 2r.
struct StarCoefficients {
    Signomial f;
    Signomial g;
    std::vector<Signomial> c;
    int complete_order = 0;
};

inline std::vector<Signomial> star_from_lifts(const WickElement& tf, const WickElement& tg, const FedosovState& s,
                                              int order) {
    const auto prod = wick::wick_product(tf.truncated(2 * order), tg.truncated(2 * order), s.lambda(), 2 * order);
    return sigma_series(prod, order);
}

inline StarCoefficients star(const Signomial& f, const Signomial& g, const FedosovState& s, int order,
                             bool allow_partial = false) {
    const Lift lf = lift(f, s, 2 * order, allow_partial);
    const Lift lg = lift(g, s, 2 * order, allow_partial);
    StarCoefficients out{f, g, {}, std::min(lf.degree, lg.degree) / 2};
    out.c = star_from_lifts(lf.element, lg.element, s, order);
    return out;
}

/// Product of two v-series through v^order: sum_{p+q+r = k} C_r(a_p, b_q).
inline std::vector<Signomial> star_series(std::span<const Signomial> a, std::span<const Signomial> b,
                                          const FedosovState& s, int order) {
    const std::size_t dim = s.geo->field_dim();
    std::vector<Signomial> out(static_cast<std::size_t>(order + 1), Signomial(dim));
    std::vector<WickElement> ta, tb;
    for (const auto& x : a) ta.push_back(tau_lift(x, s, 2 * order));
    for (const auto& x : b) tb.push_back(tau_lift(x, s, 2 * order));
    for (std::size_t p = 0; p < ta.size() && p <= static_cast<std::size_t>(order); ++p) {
        for (std::size_t q = 0; q < tb.size() && p + q <= static_cast<std::size_t>(order); ++q) {
            if (a[p].is_zero() || b[q].is_zero()) continue;
            const int rest = order - static_cast<int>(p + q);
            const auto c = star_from_lifts(ta[p], tb[q], s, rest);
            for (int r = 0; r <= rest; ++r) out[p + q + static_cast<std::size_t>(r)] += c[static_cast<std::size_t>(r)];
        }
    }
    return out;
}

/// max |D tau(f)| over components of total degree <= max_deg.
inline ProbeResidual tau_flatness_residual(const WickElement& tf, const FedosovState& s, int max_deg) {
    return detail::guarded([&] { return wick::max_abs_at(flat_d(tf, s, max_deg), s.sample_points); });
}

} // namespace fedq::fedosov
