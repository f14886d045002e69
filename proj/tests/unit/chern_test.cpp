#include <gtest/gtest.h>

#include <random>

#include "fedq/chern/forms.hpp"
#include "test_configs.hpp"

using namespace fedq;
using namespace fedq::chern;
using fedq::test_configs::lagrange_quartic;
using fedq::test_configs::lagrange_twisted;
using fedq::test_configs::lagrange_x2y2;
using fedq::test_configs::lagrange_y2;
using fedq::test_configs::sample_points;

namespace {

GeometryBundle build(const geometry::LagrangianSpec& spec) {
    return geometry::build_geometry(spec, sample_points(spec.ctx.n));
}

Signomial random_coefficient(std::mt19937_64& rng, std::size_t dim2) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::uniform_int_distribution<int> e(0, 3);
    Signomial out(dim2);
    for (int t = 0; t < 3; ++t) {
        expr::Exponents ex(dim2);
        for (auto& x : ex) x = e(rng);
        out += Signomial::monomial(c(rng), ex);
    }
    return out;
}

AdaptedForm random_form(std::mt19937_64& rng, std::size_t dim2, int degree) {
    AdaptedForm out{degree, {}};
    for (FormMask m = 0; m < (FormMask(1) << dim2); ++m)
        if (forms::form_degree(m) == degree) forms::accumulate(out.components, m, random_coefficient(rng, dim2));
    return out;
}

} // namespace

TEST(ChernWeyl, FlatFormsVanish) {
    for (int n : {1, 2}) {
        const auto b = build(lagrange_y2(1.0, n));
        EXPECT_TRUE(chern_weyl(b).is_zero());
        const auto lf = lemma_forms(b);
        EXPECT_TRUE(lf.mu.is_zero());
        EXPECT_TRUE(lf.lambda.is_zero());
        EXPECT_TRUE(lf.kappa.is_zero());
        EXPECT_TRUE(c0_representative(chern_weyl(b)).is_zero());
    }
}

// J exchanges h and v while the curvature of a d-connection preserves the
// splitting, so tr(J R_ab) has no diagonal contribution.
TEST(ChernWeyl, VanishesOnCurvedConfigs) {
    for (const auto& spec : {lagrange_twisted(1.0), lagrange_x2y2(1.0, 2), lagrange_quartic(1.0),
                             lagrange_x2y2(0.5, 2), lagrange_x2y2(0.3, 1), lagrange_quartic(0.5)})
        EXPECT_TRUE(chern_weyl(build(spec)).is_zero()) << "alpha " << spec.ctx.alpha;
    const auto b = build(lagrange_twisted(1.0));
    bool curved = false;
    for (std::size_t a = 0; a < b.dim2(); ++a)
        for (std::size_t c = 0; c < b.dim2(); ++c)
            for (std::size_t e = 0; e < b.dim2(); ++e)
                for (std::size_t f = 0; f < b.dim2(); ++f) curved |= !b.curvature.components(a, c, e, f).is_zero();
    EXPECT_TRUE(curved);
}

TEST(ExteriorDerivative, OfFunctionIsFrameDerivative) {
    const auto b = build(lagrange_x2y2(1.0, 1));
    const auto f = Signomial::monomial(1.0, {3, 2});
    const auto df = exterior_derivative(zero_form(f), b);
    EXPECT_EQ(df.degree, 1);
    // e_x = d_x - N d_y with N = y / x
    EXPECT_TRUE(expr::term_equal(df.component(forms::single(0)), Signomial::monomial(1.0, {2, 2})));
    EXPECT_TRUE(expr::term_equal(df.component(forms::single(1)), Signomial::monomial(2.0, {3, 1})));
}

TEST(ExteriorDerivative, SquaresToZeroOnNonIntegrableFrame) {
    const auto b = build(lagrange_twisted(1.0));
    const auto pts = sample_points(2);
    std::mt19937_64 rng(41);
    for (int deg : {0, 1, 2}) {
        for (int k = 0; k < 5; ++k) {
            const auto form = random_form(rng, b.dim2(), deg);
            const auto dd = exterior_derivative(exterior_derivative(form, b), b);
            EXPECT_LT(dd.max_abs_at(pts), 1e-8) << "degree " << deg;
        }
    }
}

TEST(LemmaForms, AssembleToHalfIGamma) {
    for (const auto& spec : {lagrange_twisted(1.0), lagrange_quartic(1.0), lagrange_x2y2(1.0, 2)}) {
        const auto b = build(spec);
        const auto gamma = chern_weyl(b);
        const auto lf = lemma_forms(b);
        EXPECT_EQ(lf.mu.degree, 1);
        EXPECT_EQ(lf.lambda.degree, 2);
        const auto lhs = lf.kappa + Complex(0.0, 1.0) * lf.lambda;
        EXPECT_LT((lhs - Complex(0.0, 0.5) * gamma).max_abs_at(sample_points(spec.ctx.n)), 1e-12);
        EXPECT_LT(exterior_derivative(lf.lambda, b).max_abs_at(sample_points(spec.ctx.n)), 1e-8);
    }
}

TEST(LemmaForms, TorsionTraceIsNonTrivialOnQuarticLagrangian) {
    const auto lf = lemma_forms(build(lagrange_quartic(1.0)));
    EXPECT_FALSE(lf.mu.is_zero());
}

TEST(C0Representative, IsMinusHalfOverIGamma) {
    AdaptedForm g{2, {}};
    forms::accumulate(g.components, forms::single(0) | forms::single(1), Signomial::monomial(2.0, {1, 0}));
    const auto c0 = c0_representative(g);
    // -1 / (2i) = i / 2
    EXPECT_TRUE(expr::term_equal(c0.component(3), Signomial::monomial(Complex(0.0, 1.0), {1, 0})));
}
