#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fedq/geometry/symplectic.hpp"

namespace fedq::geometry {

/// Every geometric object of one configuration.
struct GeometryBundle {
    LagrangianSpec spec;
    std::shared_ptr<expr::CaputoAudit> audit;
    MetricBlocks metric;
    NConnection nc;
    Frame frame;
    Anholonomy anholonomy;
    DConnection dconn;
    TorsionTensor torsion;
    CurvatureTensor curvature;
    AlmostSymplectic symp;

    [[nodiscard]] std::size_t n() const { return metric.n; }
    [[nodiscard]] std::size_t dim2() const { return 2 * metric.n; }
    [[nodiscard]] std::size_t field_dim() const { return spec.ctx.dim(); }
    [[nodiscard]] const SigTensor<3>& w() const { return anholonomy.w; }
};

namespace detail {

template <class F>
auto with_stage(const char* stage, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const FractionalDomainError& e) {
        throw FractionalDomainError(std::string(stage) + ": " + e.what());
    } catch (const OutsideExpressionClass& e) {
        throw OutsideExpressionClass(std::string(stage) + ": " + e.what());
    }
}

} // namespace detail

inline GeometryBundle build_geometry(const LagrangianSpec& spec, std::span<const Point> sample_points) {
    GeometryBundle g;
    g.spec = spec;
    g.audit = std::make_shared<expr::CaputoAudit>();
    auto* audit = g.audit.get();
    g.metric = detail::with_stage("metric", [&] { return hessian_metric(spec, sample_points, audit); });
    g.nc = detail::with_stage("N-connection", [&] {
        return n_connection(semi_spray(spec, g.metric, audit), spec.ctx, audit);
    });
    g.frame = Frame(spec.ctx, g.nc.coeffs, audit);
    const auto probes = default_probe_fields(spec.ctx);
    g.anholonomy = detail::with_stage("anholonomy", [&] { return anholonomy(g.nc, g.frame, sample_points, probes); });
    g.dconn = detail::with_stage("d-connection", [&] { return canonical_d_connection(g.metric, g.frame); });
    g.torsion = torsion(g.dconn, g.anholonomy.w);
    g.curvature = detail::with_stage("curvature", [&] { return curvature(g.dconn, g.anholonomy.w, g.frame); });
    g.symp = almost_symplectic(g.metric);
    return g;
}

} // namespace fedq::geometry
