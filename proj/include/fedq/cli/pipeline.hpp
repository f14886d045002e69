#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fedq/chern/forms.hpp"
#include "fedq/cli/report.hpp"
#include "fedq/fedosov/solver.hpp"
#include "fedq/quadrature/caputo_quad.hpp"

namespace fedq::cli {

using geometry::GeometryBundle;
using expr::Complex;
using wick::WickElement;

struct PipelineOptions {
    std::vector<std::string> suites = suite_names();
    std::optional<int> order; ///< overrides the configured truncation order
};

namespace detail {

/// Worst |a| over the sample points, 0 for the empty signomial.
inline double worst(const Signomial& a, std::span<const Point> pts) { return a.is_zero() ? 0.0 : expr::max_abs_at(a, pts); }

/// Accumulates a term-level identity over many components.
struct TermAccumulator {
    std::span<const Point> points;
    Measurement m{0.0, true, {}};

    void add(const Signomial& diff) {
        if (diff.is_zero()) return;
        m.term_zero = false;
        m.value = std::max(m.value, worst(diff, points));
    }
};

class Recorder {
public:
    Recorder(Report& report, const RunSpec& spec, const std::vector<std::string>& suites)
        : report_(report), spec_(spec) {
        for (const auto& def : check_catalog()) {
            if (std::find(suites.begin(), suites.end(), def.suite) == suites.end()) continue;
            report_.invariants.push_back({def.name, def.suite, def.tier, 0.0, threshold_for(def, spec), "not_run", {}});
        }
    }

    void record(const std::string& name, const Measurement& m) {
        for (auto& c : report_.invariants)
            if (c.name == name) {
                c = judge(check_def(name), m, spec_);
                return;
            }
    }

    [[nodiscard]] bool any_failed() const {
        return std::any_of(report_.invariants.begin(), report_.invariants.end(),
                           [](const CheckResult& c) { return c.status == "fail"; });
    }

private:
    Report& report_;
    const RunSpec& spec_;
};

// ---- caputo ----

inline void caputo_suite(const RunSpec& spec, Recorder& rec) {
    std::vector<double> alphas{0.3, 0.5, 0.9};
    if (spec.alpha < 1.0 && std::find(alphas.begin(), alphas.end(), spec.alpha) == alphas.end())
        alphas.push_back(spec.alpha);
    double worst_rel = 0.0;
    std::size_t cases = 0;
    for (double alpha : alphas) {
        const expr::AlphaContext ctx{alpha, 1};
        for (double p : {0.5, 1.0, 2.0, 3.7}) {
            const Signomial f = Signomial::monomial(1.0, {p, 0.0});
            const Signomial d = expr::caputo(f, 0, ctx);
            for (double x : {0.5, 1.0, 2.0}) {
                const double closed = expr::eval_at(d, std::vector<double>{x, 1.0}).real();
                const auto quad = quadrature::caputo_quad([p](double s) { return p * std::pow(s, p - 1.0); }, x, alpha);
                worst_rel = std::max(worst_rel, std::abs(closed - quad.value) / std::abs(quad.value));
                ++cases;
            }
        }
    }
    rec.record("caputo_power_rule", {worst_rel, std::nullopt, std::to_string(cases) + " grid cases"});

    TermAccumulator acc{};
    const std::vector<Point> pts{{1.0, 1.0}};
    acc.points = pts;
    alphas.push_back(1.0);
    for (double alpha : alphas)
        for (std::size_t coord = 0; coord < 2; ++coord)
            acc.add(expr::caputo(Signomial::constant(2, 7.0), coord, {alpha, 1}));
    rec.record("caputo_constant", acc.m);
}

// ---- geometry ----

inline void geometry_suite(const GeometryBundle& b, std::span<const Point> pts, Recorder& rec) {
    const std::size_t d = b.dim2();
    const std::size_t n = b.n();
    TermAccumulator inv{pts}, dg{pts}, dj{pts}, jsq{pts}, theta{pts}, tors{pts}, curv{pts};
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t c = 0; c < d; ++c) {
            Signomial gg(b.field_dim()), theta_from_g(b.field_dim());
            double jj = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                gg += b.metric.full(a, r) * b.metric.full_inv(r, c);
                jj += b.symp.j(a, r) * b.symp.j(r, c);
                theta_from_g += b.symp.j(r, a) * b.metric.full(r, c);
            }
            inv.add(gg - Signomial::constant(b.field_dim(), a == c ? 1.0 : 0.0));
            jsq.add(Signomial::constant(b.field_dim(), jj + (a == c ? 1.0 : 0.0)));
            theta.add(b.symp.theta_lower(a, c) - theta_from_g);
            for (std::size_t e = 0; e < d; ++e) {
                Signomial g_par = b.frame.apply(b.metric.full(a, e), c);
                Signomial j_par(b.field_dim());
                for (std::size_t r = 0; r < d; ++r) {
                    g_par -= b.dconn.gamma(r, c, a) * b.metric.full(r, e);
                    g_par -= b.dconn.gamma(r, c, e) * b.metric.full(a, r);
                    j_par += b.symp.j(a, r) * b.dconn.gamma(r, c, e);
                    j_par -= b.symp.j(r, e) * b.dconn.gamma(a, c, r);
                }
                dg.add(g_par);
                dj.add(j_par);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                tors.add(b.torsion.components(i, j, k));
                tors.add(b.torsion.components(n + i, n + j, n + k));
            }
    b.curvature.components.for_each_index([&](const std::array<std::size_t, 4>& idx) {
        curv.add(b.curvature.components.at(idx) + b.curvature.components(idx[0], idx[1], idx[3], idx[2]));
    });
    rec.record("metric_inverse", inv.m);
    rec.record("metric_compatibility", dg.m);
    rec.record("j_compatibility", dj.m);
    rec.record("j_square", jsq.m);
    rec.record("theta_metric", theta.m);
    rec.record("torsion_pure_blocks", tors.m);
    rec.record("curvature_antisymmetry", curv.m);

    Measurement anh{b.anholonomy.residual, std::nullopt, {}};
    if (b.anholonomy.skipped_probes) anh.detail = std::to_string(b.anholonomy.skipped_probes) + " probes skipped at gamma poles";
    rec.record("anholonomy_brackets", anh);
    rec.record("nijenhuis_torsion",
               {geometry::nijenhuis_residual(b.symp, b.torsion, b.w(), b.field_dim(), pts), std::nullopt, {}});
}

inline OJson indexed_components(const auto& tensor) {
    OJson out = OJson::array();
    tensor.for_each_index([&](const auto& idx) {
        const auto& c = tensor.at(idx);
        if (c.is_zero()) return;
        OJson i = OJson::array();
        for (auto x : idx) i.push_back(x);
        out.push_back({{"index", std::move(i)}, {"terms", terms_json(c)}});
    });
    return out;
}

inline OJson geometry_summary(const GeometryBundle& b) {
    OJson out;
    out["lagrangian"] = terms_json(b.spec.lagrangian);
    out["metric"] = indexed_components(b.metric.h);
    out["metric_inverse"] = indexed_components(b.metric.h_inv);
    out["n_connection"] = indexed_components(b.nc.coeffs);
    out["anholonomy"] = indexed_components(b.w());
    out["d_connection"] = indexed_components(b.dconn.gamma);
    out["torsion"] = indexed_components(b.torsion.components);
    out["curvature"] = indexed_components(b.curvature.components);
    out["anholonomy_residual"] = b.anholonomy.residual;
    out["anholonomy_skipped_probes"] = b.anholonomy.skipped_probes;
    out["caputo_outside_convergent"] = b.audit ? b.audit->outside_convergent : 0;
    return out;
}

// ---- algebra ----

inline WickElement random_element(std::mt19937_64& rng, std::size_t dim2, double alpha) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> small(0, 2);
    std::uniform_int_distribution<std::size_t> var(0, dim2 - 1);
    const double exps[3] = {0.0, 1.0, alpha};
    WickElement out(dim2);
    const int terms = 1 + small(rng);
    for (int t = 0; t < terms; ++t) {
        wick::ZDeg z = 0;
        for (int k = small(rng); k > 0; --k) z = wick::z_shift(z, var(rng), 1);
        forms::FormMask form = 0;
        for (int k = small(rng); k > 0; --k) form |= forms::single(var(rng));
        expr::Exponents e(dim2);
        for (auto& x : e) x = exps[small(rng)];
        const Complex c(coeff(rng), coeff(rng));
        out.add_term({small(rng) % 2, z, form}, Signomial::monomial(c, e));
    }
    return out;
}

inline void algebra_suite(const GeometryBundle& b, std::uint64_t seed, Recorder& rec) {
    constexpr std::size_t kElements = 100;
    const std::size_t d = b.dim2();
    const auto& lam = b.symp.lambda;
    std::mt19937_64 rng(seed ^ 0x5eed'a15e'b4a0ULL);
    std::vector<WickElement> el;
    for (std::size_t k = 0; k < kElements; ++k) el.push_back(random_element(rng, d, b.spec.ctx.alpha));

    double dsq = 0.0, hodge = 0.0, deriv = 0.0, assoc = 0.0, jacobi = 0.0;
    for (std::size_t k = 0; k < kElements; ++k) {
        const auto& a = el[k];
        const auto& c1 = el[(k + 1) % kElements];
        const auto& c2 = el[(k + 2) % kElements];
        dsq = std::max(dsq, wick::max_abs_coeff(fedosov::delta(fedosov::delta(a, d), d)));
        const WickElement h = fedosov::delta(fedosov::delta_inv(a, d), d) + fedosov::delta_inv(fedosov::delta(a, d), d) +
                              fedosov::sigma(a) - a;
        hodge = std::max(hodge, wick::max_abs_coeff(h));

        WickElement der = fedosov::delta(wick::wick_product(a, c1, lam), d);
        der -= wick::wick_product(fedosov::delta(a, d), c1, lam);
        for (int p : a.form_degrees()) {
            const WickElement ap = a.form_part(p);
            const WickElement t = wick::wick_product(ap, fedosov::delta(c1, d), lam);
            if (p % 2) der += t;
            else der -= t;
        }
        deriv = std::max(deriv, wick::max_abs_coeff(der));

        const WickElement lhs = wick::wick_product(wick::wick_product(a, c1, lam), c2, lam);
        const WickElement rhs = wick::wick_product(a, wick::wick_product(c1, c2, lam), lam);
        assoc = std::max(assoc, wick::max_abs_coeff(lhs - rhs));

        // [a, [b, c]] = [[a, b], c] + (-1)^{|a||b|} [b, [a, c]] on form-homogeneous parts
        WickElement jac(d);
        for (int p : a.form_degrees())
            for (int q : c1.form_degrees()) {
                const WickElement ap = a.form_part(p), bq = c1.form_part(q);
                jac += wick::graded_commutator(ap, wick::graded_commutator(bq, c2, lam), lam);
                jac -= wick::graded_commutator(wick::graded_commutator(ap, bq, lam), c2, lam);
                const WickElement t = wick::graded_commutator(bq, wick::graded_commutator(ap, c2, lam), lam);
                if ((p * q) % 2) jac += t;
                else jac -= t;
            }
        jacobi = std::max(jacobi, wick::max_abs_coeff(jac));
    }
    const std::string detail = std::to_string(kElements) + " seeded elements";
    rec.record("delta_squared", {dsq, std::nullopt, detail});
    rec.record("hodge_identity", {hodge, std::nullopt, detail});
    rec.record("delta_derivation", {deriv, std::nullopt, detail});
    rec.record("wick_associativity", {assoc, std::nullopt, detail});
    rec.record("graded_jacobi", {jacobi, std::nullopt, detail});
}

// ---- fedosov and star ----

inline int probe_fiber_degree(std::size_t n) { return n <= 2 ? 3 : 2; }

inline Measurement probe_measurement(const fedosov::ProbeResidual& p) {
    Measurement m{p.value, std::nullopt, {}};
    if (p.skipped) m.detail = std::to_string(p.skipped) + " probes skipped at gamma poles";
    return m;
}

inline Measurement term_measurement(const std::vector<Signomial>& diffs, std::span<const Point> pts) {
    TermAccumulator acc{pts};
    for (const auto& x : diffs) acc.add(x);
    return acc.m;
}

inline double series_gap(const std::vector<Signomial>& a, const std::vector<Signomial>& b, std::span<const Point> pts) {
    double m = 0.0;
    for (std::size_t r = 0; r < std::min(a.size(), b.size()); ++r) m = std::max(m, worst(a[r] - b[r], pts));
    return m;
}

inline void fedosov_suite(const RunSpec& spec, std::shared_ptr<const GeometryBundle> geo, int order, Report& report,
                          Recorder& rec) {
    const auto& pts = spec.sample_points;
    const bool partial = spec.mode == Mode::diagnostic;
    const int r_degree = fedosov::required_r_degree(order);
    fedosov::SolveOptions opts;
    opts.strict = spec.mode == Mode::strict;
    opts.tolerance = threshold_for(check_def("fedosov_equation"), spec);
    opts.allow_partial = partial;
    const auto s = fedosov::solve_r(geo, r_degree, pts, opts);

    OJson fed;
    fed["requested_degree"] = r_degree;
    fed["solved_degree"] = s.solved_degree;
    fed["stop_reason"] = s.stop_reason.empty() ? OJson(nullptr) : OJson(s.stop_reason);
    OJson res = OJson::array();
    for (const auto& dr : s.residuals) res.push_back({{"degree", dr.degree}, {"value", dr.value}});
    fed["residuals"] = std::move(res);
    OJson sizes = OJson::array();
    for (const auto& [deg, c] : s.r) sizes.push_back({{"degree", deg}, {"terms", c.size()}});
    fed["r_terms"] = std::move(sizes);
    report.fedosov = fed;
    rec.record("fedosov_equation", {s.max_residual(), std::nullopt,
                                    "degrees 2.." + std::to_string(s.solved_degree) + " of " + std::to_string(r_degree)});

    const auto fields = geometry::default_probe_fields(spec.ctx());
    const auto probes = fedosov::probe_elements(s.dim2(), fields, probe_fiber_degree(geo->n()), spec.seed);
    const auto ops = fedosov::operator_identities(s, probes);
    rec.record("dconn_delta_commutator", probe_measurement(ops.commutator_torsion));
    rec.record("dconn_square", probe_measurement(ops.square_curvature));
    rec.record("delta_torsion", {ops.delta_torsion, std::nullopt, {}});
    rec.record("delta_curvature", probe_measurement(ops.delta_curvature));
    const auto sq = fedosov::flat_d_square_residual(s, probes, order + 2);
    auto sq_m = probe_measurement(sq);
    sq_m.detail = std::to_string(probes.size()) + " probes up to degree " + std::to_string(order + 2) +
                  (sq_m.detail.empty() ? "" : ", " + sq_m.detail);
    rec.record("flat_connection_square", sq_m);
    report.fedosov["probes"] = probes.size();
    report.fedosov["gauge_diagnostic"] = ops.gauge.value;

    const Signomial one = Signomial::constant(geo->field_dim(), 1.0);
    const auto lf = fedosov::lift(spec.f, s, 2 * order, partial);
    const auto lg = fedosov::lift(spec.g, s, 2 * order, partial);
    const auto l1 = fedosov::lift(one, s, 2 * order, partial);
    const int complete = std::min(lf.degree, lg.degree) / 2;
    report.fedosov["lift_degree"] = std::min(lf.degree, lg.degree);
    if (!lf.stop_reason.empty()) report.fedosov["lift_stop_reason"] = lf.stop_reason;

    TermAccumulator sig{pts};
    for (const auto* l : {&lf, &lg}) {
        const WickElement diff = fedosov::sigma(l->element) - WickElement::scalar(l == &lf ? spec.f : spec.g);
        for (const auto& [k, c] : diff.terms()) sig.add(c);
    }
    rec.record("sigma_tau", sig.m);
    fedosov::ProbeResidual flat_f = fedosov::tau_flatness_residual(lf.element, s, std::max(lf.degree - 1, 0));
    const fedosov::ProbeResidual flat_g = fedosov::tau_flatness_residual(lg.element, s, std::max(lg.degree - 1, 0));
    flat_f.value = std::max(flat_f.value, flat_g.value);
    flat_f.skipped += flat_g.skipped;
    rec.record("tau_flatness", probe_measurement(flat_f));

    const auto c_fg = fedosov::star_from_lifts(lf.element, lg.element, s, order);
    const auto c_gf = fedosov::star_from_lifts(lg.element, lf.element, s, order);
    rec.record("star_c0", term_measurement({c_fg[0] - spec.f * spec.g}, pts));

    std::vector<Signomial> unit;
    for (const auto& c : {fedosov::star_from_lifts(l1.element, lf.element, s, order),
                          fedosov::star_from_lifts(lf.element, l1.element, s, order)}) {
        unit.push_back(c[0] - spec.f);
        for (std::size_t r = 1; r < c.size(); ++r) unit.push_back(c[r]);
    }
    rec.record("star_unit", term_measurement(unit, pts));

    Measurement comm{0.0, std::nullopt, {}};
    try {
        const Signomial pb = geometry::poisson_bracket(spec.f, spec.g, geo->symp, geo->frame);
        comm.value = worst(c_fg[1] - c_gf[1] - Complex(0.0, 1.0) * pb, pts);
    } catch (const FractionalDomainError& e) {
        if (!partial) throw;
        comm.value = NAN;
        comm.detail = e.what();
    }
    rec.record("star_commutator", comm);

    // (f * g) * f = f * (g * f) through v^m, lowering m when a lift hits a gamma pole.
    Measurement assoc{0.0, std::nullopt, {}};
    for (int m = std::min(order, complete); m >= 0; --m) {
        try {
            const std::vector<Signomial> fg(c_fg.begin(), c_fg.begin() + m + 1);
            const std::vector<Signomial> gf(c_gf.begin(), c_gf.begin() + m + 1);
            const std::vector<Signomial> f1{spec.f};
            const auto lhs = fedosov::star_series(fg, f1, s, m);
            const auto rhs = fedosov::star_series(f1, gf, s, m);
            assoc.value = series_gap(lhs, rhs, pts);
            assoc.detail = "(f*g)*f vs f*(g*f) through v^" + std::to_string(m);
            break;
        } catch (const FractionalDomainError& e) {
            if (!partial) throw;
        }
    }
    rec.record("star_associativity", assoc);

    OJson star;
    star["order"] = order;
    star["complete_order"] = complete;
    star["f"] = terms_json(spec.f);
    star["g"] = terms_json(spec.g);
    OJson coeffs = OJson::array();
    for (std::size_t r = 0; r < c_fg.size(); ++r)
        coeffs.push_back({{"r", r}, {"complete", static_cast<int>(r) <= complete}, {"terms", terms_json(c_fg[r])}});
    star["coefficients"] = std::move(coeffs);
    report.star = std::move(star);
}

// ---- chern ----

inline void chern_suite(const RunSpec& spec, const GeometryBundle& b, Report& report, Recorder& rec) {
    const auto& pts = spec.sample_points;
    const bool partial = spec.mode == Mode::diagnostic;
    const auto gamma = chern::chern_weyl(b);
    const auto c0 = chern::c0_representative(gamma);
    OJson ch;
    ch["gamma"] = form_json(gamma);
    ch["c0_representative"] = form_json(c0);

    auto guarded = [&](const char* name, const std::function<double()>& fn) {
        Measurement m{0.0, std::nullopt, {}};
        try {
            m.value = fn();
        } catch (const FractionalDomainError& e) {
            if (!partial) throw;
            m.value = NAN;
            m.detail = e.what();
        }
        rec.record(name, m);
    };
    guarded("chern_weyl_closed", [&] { return chern::exterior_derivative(gamma, b).max_abs_at(pts); });
    guarded("lemma_assembly", [&] {
        const auto lf = chern::lemma_forms(b);
        ch["mu"] = form_json(lf.mu);
        ch["lambda"] = form_json(lf.lambda);
        ch["kappa"] = form_json(lf.kappa);
        return (lf.kappa + Complex(0.0, 1.0) * lf.lambda - Complex(0.0, 0.5) * gamma).max_abs_at(pts);
    });
    report.chern = std::move(ch);
}

inline bool wants(const std::vector<std::string>& suites, const char* s) {
    return std::find(suites.begin(), suites.end(), s) != suites.end();
}

} // namespace detail

/// Runs the selected suites in the order caputo, geometry, algebra, fedosov, chern.
/// Computation errors stop the run with exit code 2 and keep what was produced;
/// in strict mode a failed check stops the run after its stage with exit code 1.
inline Report run_pipeline(const RunSpec& spec, const PipelineOptions& opt = {}) {
    Report report;
    report.config_hash = fnv1a(spec.canonical);
    report.seed = spec.seed;
    const int order = opt.order.value_or(spec.truncation_order);
    report.config = {{"alpha", spec.alpha},
                     {"n", spec.n},
                     {"truncation_order", order},
                     {"mode", to_string(spec.mode)},
                     {"suites", opt.suites},
                     {"sample_points", spec.sample_points.size()}};
    detail::Recorder rec(report, spec, opt.suites);
    std::string stage;
    auto stage_done = [&] {
        if (spec.mode == Mode::strict && rec.any_failed()) {
            report.exit_code = 1;
            report.failed_stage = stage;
            return false;
        }
        return true;
    };
    try {
        if (detail::wants(opt.suites, "caputo")) {
            stage = "caputo";
            detail::caputo_suite(spec, rec);
            if (!stage_done()) return report;
        }
        const bool need_geometry = detail::wants(opt.suites, "geometry") || detail::wants(opt.suites, "algebra") ||
                                   detail::wants(opt.suites, "fedosov") || detail::wants(opt.suites, "chern");
        if (!need_geometry) {
            if (rec.any_failed()) report.exit_code = 1;
            return report;
        }
        stage = "geometry";
        auto geo = std::make_shared<const GeometryBundle>(geometry::build_geometry(spec.lagrangian_spec(), spec.sample_points));
        report.geometry = detail::geometry_summary(*geo);
        if (detail::wants(opt.suites, "geometry")) {
            detail::geometry_suite(*geo, spec.sample_points, rec);
            if (!stage_done()) return report;
        }
        if (detail::wants(opt.suites, "algebra")) {
            stage = "algebra";
            detail::algebra_suite(*geo, spec.seed, rec);
            if (!stage_done()) return report;
        }
        if (detail::wants(opt.suites, "fedosov")) {
            stage = "fedosov";
            detail::fedosov_suite(spec, geo, order, report, rec);
            if (!stage_done()) return report;
        }
        if (detail::wants(opt.suites, "chern")) {
            stage = "chern";
            detail::chern_suite(spec, *geo, report, rec);
            if (!stage_done()) return report;
        }
    } catch (const ComputationError& e) {
        report.exit_code = 2;
        report.error = e.what();
        report.failed_stage = stage;
        return report;
    }
    if (rec.any_failed()) report.exit_code = 1;
    return report;
}

} // namespace fedq::cli
