#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fedq/geometry/bundle.hpp"
#include "test_configs.hpp"

using namespace fedq;
using namespace fedq::geometry;
using fedq::test_configs::lagrange_x2y2;
using fedq::test_configs::lagrange_y2;
using fedq::test_configs::sample_points;

namespace {

Signomial mono(Complex c, std::vector<double> e) { return Signomial::monomial(c, std::move(e)); }

} // namespace

TEST(HessianMetric, ClassicalQuadraticIsUnit) {
    const auto g = hessian_metric(lagrange_y2(1.0, 1));
    EXPECT_TRUE(expr::term_equal(g.h(0, 0), Signomial::constant(2, 1.0)));
}

TEST(HessianMetric, FractionalQuadraticGammaFactorsCancel) {
    const auto g = hessian_metric(lagrange_y2(0.5, 1));
    ASSERT_EQ(g.h(0, 0).size(), 1u);
    const auto& t = g.h(0, 0).terms().front();
    EXPECT_NEAR(t.coeff.real(), 1.0, 1e-12);
    EXPECT_NEAR(t.exps[0], 0.0, 1e-12);
    EXPECT_NEAR(t.exps[1], 1.0, 1e-12);
}

TEST(HessianMetric, CoupledClassical) {
    const auto g = hessian_metric(lagrange_x2y2(1.0, 1));
    EXPECT_TRUE(expr::term_equal(g.h(0, 0), mono(1.0, {2, 0})));
}

TEST(HessianMetric, RejectsOffDiagonal) {
    LagrangianSpec s{mono(1.0, {0, 0, 1, 1}), {1.0, 2}};
    EXPECT_THROW(hessian_metric(s), OutsideExpressionClass);
}

TEST(HessianMetric, RejectsMultiTermDiagonal) {
    LagrangianSpec s{mono(1.0, {0, 2}) + mono(1.0, {1, 2}), {1.0, 1}};
    EXPECT_THROW(hessian_metric(s), OutsideExpressionClass);
}

TEST(HessianMetric, RejectsVanishingEntry) {
    LagrangianSpec s{mono(1.0, {2, 1}), {1.0, 1}};
    EXPECT_THROW(hessian_metric(s), RegularityError);
}

TEST(SemiSpray, VanishesWithoutXDependence) {
    const auto spec = lagrange_y2(0.5, 2);
    const auto g = hessian_metric(spec);
    for (const auto& gk : semi_spray(spec, g)) EXPECT_TRUE(gk.is_zero());
}

TEST(SemiSpray, CoupledClassicalMatchesHandExpansion) {
    const auto spec = lagrange_x2y2(1.0, 1);
    const auto g = hessian_metric(spec);
    const auto G = semi_spray(spec, g);
    EXPECT_TRUE(expr::term_equal(G[0], mono(0.5, {-1, 2})));
    const auto nc = n_connection(G, spec.ctx);
    EXPECT_TRUE(expr::term_equal(nc.coeffs(0, 0), mono(1.0, {-1, 1})));
    EXPECT_TRUE(nc.curvature.all_zero());
}

TEST(SemiSpray, CoupledClassicalFiniteDifference) {
    // Direct finite differences of the defining expression at (1, 1).
    auto L = [](double x, double y) { return x * x * y * y; };
    const double h = 1e-4, x = 1.0, y = 1.0;
    auto Lx = [&](double xx, double yy) { return (L(xx + h, yy) - L(xx - h, yy)) / (2 * h); };
    const double Lxy = (Lx(x, y + h) - Lx(x, y - h)) / (2 * h);
    const double g = 0.5 * (L(x, y + h) - 2 * L(x, y) + L(x, y - h)) / (h * h);
    const double G = 0.25 / g * (y * Lxy - Lx(x, y));
    const auto spec = lagrange_x2y2(1.0, 1);
    const auto Gs = semi_spray(spec, hessian_metric(spec));
    EXPECT_NEAR(std::real(expr::eval_at(Gs[0], std::vector<double>{x, y})), G, 1e-6);
}

TEST(SemiSpray, CoupledFractionalHasTwoTermsWithShiftedExponent) {
    const auto spec = lagrange_x2y2(0.5, 1);
    const auto G = semi_spray(spec, hessian_metric(spec));
    ASSERT_EQ(G[0].size(), 2u);
    for (const auto& t : G[0].terms()) EXPECT_NEAR(t.exps[0], -0.5, 1e-12);
}

TEST(AdaptedFrame, HorizontalDerivativeSubtractsNonlinearPart) {
    const auto spec = lagrange_x2y2(1.0, 1);
    const auto nc = n_connection(semi_spray(spec, hessian_metric(spec)), spec.ctx);
    const Frame frame(spec.ctx, nc.coeffs);
    EXPECT_TRUE(expr::term_equal(frame.apply(mono(1.0, {0, 1}), 0), mono(-1.0, {-1, 1})));
    EXPECT_TRUE(frame.apply(mono(1.0, {1, 0}), 1).is_zero());
}

TEST(DConnection, FlatIsZero) {
    const auto b = build_geometry(lagrange_y2(1.0, 2), sample_points(2));
    EXPECT_TRUE(b.dconn.gamma.all_zero());
    EXPECT_TRUE(b.torsion.components.all_zero());
    EXPECT_TRUE(b.curvature.components.all_zero());
}

TEST(DConnection, FractionalQuadraticVerticalCoefficient) {
    const auto b = build_geometry(lagrange_y2(0.5, 1), sample_points(1));
    const auto& c = b.dconn.C_v(0, 0, 0);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(c.terms().front().coeff.real(), 0.5 / std::tgamma(1.5), 1e-12);
    EXPECT_NEAR(c.terms().front().exps[1], -0.5, 1e-12);
    // T^x_xy = C^x_xy is the only non-zero torsion component.
    EXPECT_TRUE(expr::term_equal(b.torsion.components(0, 0, 1), c));
    EXPECT_TRUE(expr::term_equal(b.torsion.components(0, 1, 0), -c));
    std::size_t nonzero = 0;
    for (const auto& t : b.torsion.components.data()) nonzero += t.is_zero() ? 0 : 1;
    EXPECT_EQ(nonzero, 2u);
}

TEST(Anholonomy, CoupledClassicalStructureCoefficient) {
    const auto b = build_geometry(lagrange_x2y2(1.0, 1), sample_points(1));
    // [e_x, e_y] = e_y(N) e_y with N = y / x.
    EXPECT_TRUE(expr::term_equal(b.w()(1, 0, 1), mono(1.0, {-1, 0})));
    EXPECT_LT(b.anholonomy.residual, 1e-10);
}

TEST(Anholonomy, FractionalResidualIsFinite) {
    const auto b = build_geometry(lagrange_x2y2(0.5, 1), sample_points(1));
    EXPECT_TRUE(std::isfinite(b.anholonomy.residual));
}

class CompatibilityTest : public ::testing::TestWithParam<std::tuple<double, int, int>> {};

// Metric and J compatibility: D_c g_ab = 0 and D_c J = 0 on the adapted frame.
TEST_P(CompatibilityTest, MetricAndComplexStructureAreParallel) {
    const auto [alpha, n, which] = GetParam();
    const auto spec = which == 0 ? lagrange_y2(alpha, n) : lagrange_x2y2(alpha, n);
    const auto b = build_geometry(spec, sample_points(n));
    const std::size_t d = b.dim2();
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t e = 0; e < d; ++e) {
                Signomial dg = b.frame.apply(b.metric.full(a, e), c);
                Signomial dj(b.field_dim());
                for (std::size_t r = 0; r < d; ++r) {
                    dg -= b.dconn.gamma(r, c, a) * b.metric.full(r, e);
                    dg -= b.dconn.gamma(r, c, e) * b.metric.full(a, r);
                    dj += b.symp.j(a, r) * b.dconn.gamma(r, c, e);
                    dj -= b.symp.j(r, e) * b.dconn.gamma(a, c, r);
                }
                EXPECT_TRUE(dg.is_zero()) << "Dg c=" << c << " a=" << a << " b=" << e << ": " << dg.to_string();
                EXPECT_TRUE(dj.is_zero()) << "DJ c=" << c << " a=" << a << " b=" << e << ": " << dj.to_string();
            }
        }
    }
    // Torsion vanishes on pure h-h and v-v blocks.
    const std::size_t nn = b.n();
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = 0; j < nn; ++j)
            for (std::size_t k = 0; k < nn; ++k) {
                EXPECT_TRUE(b.torsion.components(i, j, k).is_zero());
                EXPECT_TRUE(b.torsion.components(nn + i, nn + j, nn + k).is_zero());
            }
}

INSTANTIATE_TEST_SUITE_P(AllAlpha, CompatibilityTest,
                         ::testing::Combine(::testing::Values(0.3, 0.5, 0.9, 1.0), ::testing::Values(1, 2),
                                            ::testing::Values(0, 1)));

TEST(AlmostSymplectic, FlatLambdaBlocks) {
    const auto b = build_geometry(lagrange_y2(1.0, 1), sample_points(1));
    EXPECT_TRUE(expr::term_equal(b.symp.lambda(0, 1), Signomial::constant(2, 1.0)));
    EXPECT_TRUE(expr::term_equal(b.symp.lambda(0, 0), Signomial::constant(2, Complex(0, -1))));
    EXPECT_TRUE(expr::term_equal(b.symp.lambda(1, 1), Signomial::constant(2, Complex(0, -1))));
}

TEST(AlmostSymplectic, AlgebraicIdentities) {
    for (double alpha : {0.5, 1.0}) {
        const auto b = build_geometry(lagrange_x2y2(alpha, 2), sample_points(2));
        const std::size_t d = b.dim2();
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t c = 0; c < d; ++c) {
                Signomial gg(b.field_dim()), tt(b.field_dim());
                double jj = 0.0;
                Signomial theta_from_g(b.field_dim());
                for (std::size_t r = 0; r < d; ++r) {
                    gg += b.metric.full(a, r) * b.metric.full_inv(r, c);
                    tt += b.symp.theta_lower(a, r) * b.symp.theta_upper(r, c);
                    jj += b.symp.j(a, r) * b.symp.j(r, c);
                    theta_from_g += b.symp.j(r, a) * b.metric.full(r, c);
                }
                const Signomial id = Signomial::constant(b.field_dim(), a == c ? 1.0 : 0.0);
                EXPECT_TRUE(expr::term_equal(gg, id));
                EXPECT_TRUE(expr::term_equal(tt, id));
                EXPECT_EQ(jj, a == c ? -1.0 : 0.0);
                EXPECT_TRUE(expr::term_equal(b.symp.theta_lower(a, c), theta_from_g));
                EXPECT_TRUE(expr::term_equal(b.symp.theta_lower(a, c), -b.symp.theta_lower(c, a)));
            }
        }
        // theta(e_x, J e_x) = g_xx
        Signomial lhs(b.field_dim());
        for (std::size_t r = 0; r < d; ++r) lhs += b.symp.theta_lower(0, r) * Complex(b.symp.j(r, 0));
        EXPECT_TRUE(expr::term_equal(lhs, b.metric.h(0, 0)));
    }
}

TEST(PoissonBracket, FlatExamples) {
    const auto b = build_geometry(lagrange_y2(1.0, 1), sample_points(1));
    const auto x = Signomial::variable(2, 0), y = Signomial::variable(2, 1);
    EXPECT_TRUE(expr::term_equal(poisson_bracket(x, y, b.symp, b.frame), Signomial::constant(2, 1.0)));
    EXPECT_TRUE(expr::term_equal(poisson_bracket(x * x, y, b.symp, b.frame), 2.0 * x));
}

TEST(PoissonBracket, AntisymmetricAndLeibnizClassical) {
    const auto b = build_geometry(lagrange_x2y2(1.0, 1), sample_points(1));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(0, 3);
    auto rnd = [&] {
        Signomial s(2);
        for (int k = 0; k < 3; ++k) s += mono(coef(rng), {double(ex(rng)), double(ex(rng))});
        return s;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = rnd(), g = rnd(), h = rnd();
        const auto fg = poisson_bracket(f, g, b.symp, b.frame);
        EXPECT_LT(expr::max_abs_at(fg + poisson_bracket(g, f, b.symp, b.frame), sample_points(1)), 1e-10);
        EXPECT_TRUE(poisson_bracket(f, f, b.symp, b.frame).is_zero());
        const auto lhs = poisson_bracket(f, g * h, b.symp, b.frame);
        const auto rhs = fg * h + g * poisson_bracket(f, h, b.symp, b.frame);
        EXPECT_LT(expr::max_abs_at(lhs - rhs, sample_points(1)), 1e-9);
    }
}

TEST(LagrangeOneForm, Examples) {
    auto w = lagrange_one_form(lagrange_y2(1.0, 1));
    EXPECT_TRUE(expr::term_equal(w[0], Signomial::variable(2, 1)));
    w = lagrange_one_form(lagrange_y2(0.5, 1));
    ASSERT_EQ(w[0].size(), 1u);
    EXPECT_NEAR(w[0].terms().front().coeff.real(), 0.5 * 2.0 / std::tgamma(2.5), 1e-12);
    w = lagrange_one_form(LagrangianSpec{Signomial::constant(2, 3.0), {0.5, 1}});
    EXPECT_TRUE(w[0].is_zero());
}

TEST(Curvature, AntisymmetricInLastPair) {
    for (const auto& spec : {test_configs::lagrange_twisted(1.0), test_configs::lagrange_quartic(0.5),
                             lagrange_x2y2(0.5, 2)}) {
        const auto b = build_geometry(spec, sample_points(spec.ctx.n));
        const std::size_t d = b.dim2();
        for (std::size_t t = 0; t < d; ++t)
            for (std::size_t m = 0; m < d; ++m)
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t c = 0; c < d; ++c)
                        EXPECT_TRUE(expr::term_equal(b.curvature.components(t, m, a, c),
                                                     -b.curvature.components(t, m, c, a)));
    }
}

TEST(Curvature, TwistedConfigHasCurvatureAndTorsion) {
    const auto b = build_geometry(test_configs::lagrange_twisted(1.0), sample_points(2));
    EXPECT_FALSE(b.nc.curvature.all_zero());
    EXPECT_FALSE(b.torsion.components.all_zero());
    EXPECT_FALSE(b.curvature.components.all_zero());
}

TEST(Curvature, LowerIndexSymmetryClassical) {
    // theta_{f t} R^t_{g a b} = theta_{g t} R^t_{f a b}
    for (const auto& spec : {lagrange_x2y2(1.0, 2), test_configs::lagrange_twisted(1.0),
                             test_configs::lagrange_quartic(1.0)}) {
        const auto pts = sample_points(spec.ctx.n);
        const auto b = build_geometry(spec, pts);
        const std::size_t d = b.dim2();
        double worst = 0.0;
        for (std::size_t f = 0; f < d; ++f)
            for (std::size_t g = 0; g < d; ++g)
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t c = 0; c < d; ++c) {
                        Signomial s(b.field_dim());
                        for (std::size_t t = 0; t < d; ++t) {
                            s += b.symp.theta_lower(f, t) * b.curvature.components(t, g, a, c);
                            s -= b.symp.theta_lower(g, t) * b.curvature.components(t, f, a, c);
                        }
                        if (!s.is_zero()) worst = std::max(worst, expr::max_abs_at(s, pts));
                    }
        EXPECT_LT(worst, 1e-8);
    }
}

TEST(Nijenhuis, MatchesFourTorsionOnAcceptanceConfigs) {
    for (int n : {1, 2}) {
        for (const auto& spec : {lagrange_y2(1.0, n), lagrange_x2y2(1.0, n)}) {
            const auto pts = sample_points(n);
            const auto b = build_geometry(spec, pts);
            EXPECT_LT(nijenhuis_residual(b.symp, b.torsion, b.w(), b.field_dim(), pts), 1e-8);
        }
    }
}
