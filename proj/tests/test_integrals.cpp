#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "curvlab/catalog.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/integrals.hpp"
#include "curvlab/spec_file.hpp"

using namespace curvlab;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarPotential first_harmonic(const MetricField& g) {
  return {g.chart, [](std::span<const Jet> x) { return cos(x[0]); }};
}

ScalarPotential constant_potential(const MetricField& g, double c) {
  return {g.chart, [c](std::span<const Jet> x) { return constant_like(x[0], c); }};
}

/// d/dphi on sphere_metric, a Killing field.
VectorFieldSpec rotation(const MetricField& g) {
  const int n = g.dim();
  return {g.chart, [n](std::span<const Jet> x) {
            std::vector<Jet> v(n, constant_like(x[0], 0.0));
            v[n - 1] = constant_like(x[0], 1.0);
            return v;
          }};
}

/// int_0^pi sin^m: W_0 = pi, W_1 = 2, W_{m+2} = (m+1)/(m+2) W_m.
double wallis(int m) { return m == 0 ? kPi : m == 1 ? 2.0 : (m - 1.0) / m * wallis(m - 2); }

}  // namespace

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  const QuadratureAxis a = gauss_legendre(5, -1.0, 2.0);
  ASSERT_EQ(a.nodes.size(), 5u);
  for (double w : a.weights) EXPECT_GT(w, 0.0);
  for (int d = 0; d <= 9; ++d) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.nodes.size(); ++k) s += a.weights[k] * std::pow(a.nodes[k], d);
    EXPECT_NEAR(s, (std::pow(2.0, d + 1) - std::pow(-1.0, d + 1)) / (d + 1), 1e-12) << d;
  }
  EXPECT_EQ(sphere_rule(3, 7).exactness(), 13);
  EXPECT_EQ(sphere_rule(3, std::vector<int>{8, 6, 4}).total_nodes(), 192u);
  EXPECT_THROW(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
}

TEST(Quadrature, SphereVolumesMatchTheGammaFormula) {
  for (int n = 0; n <= 6; ++n)
    EXPECT_NEAR(unit_sphere_volume(n), 2.0 * std::pow(kPi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0), 1e-12) << n;
  for (int n : {2, 3}) {
    const MetricField g = sphere_metric(n, 1.0);
    const double vol = integrate(sphere_rule(n), g, [](std::span<const double>) { return 1.0; });
    EXPECT_NEAR(vol, unit_sphere_volume(n), 1e-10) << n;
  }
  const double big = integrate(sphere_rule(2), sphere_metric(2, 2.0), [](std::span<const double>) { return 1.0; });
  EXPECT_NEAR(big, 16.0 * kPi, 1e-9);
}

TEST(Quadrature, HarmonicIntegrals) {
  const MetricField s2 = sphere_metric(2, 1.0);
  EXPECT_NEAR(integrate(sphere_rule(2), s2, first_harmonic(s2)), 0.0, 1e-12);
  // int_{S^3} cos^2(theta_1) = (W_2 - W_4) * W_1 * 2 pi.
  const MetricField s3 = sphere_metric(3, 1.0);
  const double expected = (wallis(2) - wallis(4)) * wallis(1) * 2.0 * kPi;
  const double got =
      integrate(sphere_rule(3, 32), s3, [](std::span<const double> p) { return std::cos(p[0]) * std::cos(p[0]); });
  EXPECT_NEAR(got, expected, 1e-10);
}

TEST(PointCurvature, MatchesTheJetPipeline) {
  std::vector<CatalogEntry> entries = {catalog_lookup("warped_gaussian", 4), catalog_lookup("s2xs2"),
                                       catalog_lookup("hyperbolic", 3),
                                       load_geometry_spec(random_expression_spec(3, 3))};
  for (const CatalogEntry& e : entries)
    for (const Point& p : sample_points(e.metric.chart, 4, 5)) {
      const PointCurvature pc = point_curvature(e.metric, p);
      const CurvaturePack pack = curvature_at(e.metric, p, 0);
      for (std::size_t k = 0; k < pack.riem.size(); ++k)
        EXPECT_NEAR(pc.riem.at_flat(k), pack.riem.at_flat(k), 1e-10) << e.name;
      for (std::size_t k = 0; k < pack.gamma.size(); ++k)
        EXPECT_NEAR(pc.gamma.at_flat(k), pack.gamma.at_flat(k), 1e-12) << e.name;
      EXPECT_NEAR(pc.scal, pack.scal, 1e-10) << e.name;
      EXPECT_NEAR(pc.volume_density * pc.volume_density, to_matrix(pack.g).determinant(), 1e-12) << e.name;
    }
}

TEST(Bochner, FirstHarmonicEigenIdentities) {
  for (int n : {2, 3}) {
    const MetricField g = sphere_metric(n, 1.0);
    const BochnerIntegralReport r = bochner_conformal_identity(sphere_rule(n, n == 2 ? 64 : 32), g, first_harmonic(g));
    // int |grad f|^2 = n int f^2 and int (lap f)^2 = n^2 int f^2.
    EXPECT_NEAR(r.grad_f_sq, n * r.f_sq, 1e-9) << n;
    EXPECT_NEAR(r.rhs, (n - 1.0) * n * r.f_sq, 1e-9) << n;
    EXPECT_NEAR(r.lhs, r.rhs, 1e-9) << n;
    EXPECT_NEAR(r.f_sq, unit_sphere_volume(n) / (n + 1), 1e-10) << n;
    EXPECT_LE(r.max_conformal_residual, 1e-10);
  }
  const MetricField s2 = sphere_metric(2, 1.0);
  const BochnerIntegralReport r2 = bochner_conformal_identity(sphere_rule(2), s2, first_harmonic(s2));
  EXPECT_NEAR(r2.lhs, 2.0 * 4.0 * kPi / 3.0, 1e-9);
}

TEST(Bochner, ConstantPotentialAndNonConformalGradient) {
  const MetricField s2 = sphere_metric(2, 1.0);
  const BochnerIntegralReport r = bochner_conformal_identity(sphere_rule(2, 16), s2, constant_potential(s2, 3.0));
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_EQ(r.residual, 0.0);
  const ScalarPotential second{s2.chart, [](std::span<const Jet> x) { return cos(x[0]) * cos(x[0]); }};
  EXPECT_THROW(bochner_conformal_identity(sphere_rule(2, 16), s2, second), std::invalid_argument);
}

TEST(KazdanWarner, ObstructionOnRoundSpheres) {
  for (int n : {2, 3}) {
    const MetricField g = sphere_metric(n, 1.0);
    const ScalarPotential f = first_harmonic(g);
    const QuadratureRule rule = sphere_rule(n, n == 2 ? 64 : 24);
    const KazdanWarnerReport kw = kazdan_warner_residual(rule, g, f, gradient_field(g, f));
    const BochnerIntegralReport b = bochner_conformal_identity(rule, g, f);
    EXPECT_NEAR(kw.integral, b.rhs, 1e-9) << n;
    EXPECT_GT(kw.integral, 1.0);
    // The Killing rotation is orthogonal to grad f everywhere.
    EXPECT_NEAR(kazdan_warner_residual(rule, g, f, rotation(g)).integral, 0.0, 1e-12);
    EXPECT_EQ(kazdan_warner_residual(rule, g, constant_potential(g, -1.0), gradient_field(g, f)).integral, 0.0);
  }
}

TEST(KazdanWarner, RejectsNonConformalFields) {
  const MetricField s2 = sphere_metric(2, 1.0);
  const VectorFieldSpec stretch{s2.chart, [](std::span<const Jet> x) {
                                  return std::vector<Jet>{x[0], constant_like(x[0], 0.0)};
                                }};
  EXPECT_THROW(kazdan_warner_residual(sphere_rule(2, 8), s2, first_harmonic(s2), stretch), std::invalid_argument);
  EXPECT_THROW(nongradient_kw_residual(sphere_rule(2, 8), s2, stretch), std::invalid_argument);
}

TEST(NongradientKw, KillingAndGradientFieldsOnS2) {
  const MetricField s2 = sphere_metric(2, 1.0);
  const QuadratureRule rule = sphere_rule(2);
  const NongradientKwReport killing = nongradient_kw_residual(rule, s2, rotation(s2));
  EXPECT_NEAR(killing.div_x_sq, 0.0, 1e-20);
  EXPECT_NEAR(killing.ric_xx, killing.nabla_x_sq, 1e-9);
  EXPECT_NEAR(killing.ricci_identity, 0.0, 1e-9);
  EXPECT_NEAR(killing.divergence_identity, 0.0, 1e-9);
  // |d/dphi|^2 = sin^2 theta integrates to 8 pi / 3.
  EXPECT_NEAR(killing.ric_xx, 8.0 * kPi / 3.0, 1e-9);

  const ScalarPotential f = first_harmonic(s2);
  const NongradientKwReport grad = nongradient_kw_residual(rule, s2, gradient_field(s2, f));
  EXPECT_NEAR(grad.ricci_identity, 0.0, 1e-9);
  EXPECT_NEAR(grad.divergence_identity, 0.0, 1e-9);
  // A^X vanishes for a gradient field; on S^2 the two identities then force int Ric(X, X) = (1/2) int (div X)^2.
  EXPECT_NEAR(grad.half_div_a_x, 0.0, 1e-9);
  EXPECT_NEAR(grad.ric_xx, 0.5 * grad.div_x_sq, 1e-9);
  EXPECT_GT(grad.div_x_sq, 1.0);
}

TEST(NongradientKw, ZeroFieldAndS3) {
  const MetricField s2 = sphere_metric(2, 1.0);
  const VectorFieldSpec zero{s2.chart, [](std::span<const Jet> x) { return std::vector<Jet>(2, constant_like(x[0], 0.0)); }};
  const NongradientKwReport z = nongradient_kw_residual(sphere_rule(2, 16), s2, zero);
  EXPECT_EQ(z.ric_xx, 0.0);
  EXPECT_EQ(z.nabla_x_sq, 0.0);
  EXPECT_EQ(z.div_x_sq, 0.0);
  EXPECT_EQ(z.half_div_a_x, 0.0);
  EXPECT_EQ(z.combined, 0.0);

  const MetricField s3 = sphere_metric(3, 1.0);
  const QuadratureRule rule = sphere_rule(3, 16);
  for (const VectorFieldSpec& x : {rotation(s3), gradient_field(s3, first_harmonic(s3))}) {
    const NongradientKwReport r = nongradient_kw_residual(rule, s3, x);
    EXPECT_NEAR(r.ricci_identity, 0.0, 1e-9);
    EXPECT_NEAR(r.divergence_identity, 0.0, 1e-9);
  }
}

TEST(Signature, IntegrandVanishesWhereItShould) {
  const MetricField s4 = sphere_metric(4, 1.0);
  for (const Point& p : sample_points(s4.chart, 8, 3)) EXPECT_NEAR(signature_integrand(s4, p), 0.0, 1e-10);
  const CatalogEntry wg = catalog_lookup("warped_gaussian", 4);
  for (const Point& p : sample_points(wg.metric.chart, 8, 3)) EXPECT_NEAR(signature_integrand(wg.metric, p), 0.0, 1e-9);
  const CatalogEntry s2xs2 = catalog_lookup("s2xs2");
  const QuadratureRule rule = product_rule(sphere_rule(2, 8), sphere_rule(2, 8));
  EXPECT_NEAR(signature_quadrature(rule, s2xs2.metric), 0.0, 1e-9);
  EXPECT_THROW(signature_integrand(sphere_metric(3, 1.0), Point{1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST(Signature, MatchesTheWeylSplitOfTheJetPipeline) {
  const CatalogEntry e = load_geometry_spec(random_expression_spec(11, 4));
  for (const Point& p : sample_points(e.metric.chart, 4, 2)) {
    const double expected = weyl_pm(curvature_at(e.metric, p, 0)).signature_integrand();
    EXPECT_NEAR(signature_integrand(e.metric, p), expected, 1e-9 * (1.0 + std::abs(expected)));
  }
}

TEST(Quadrature, DoublingNodesChangesLittle) {
  const MetricField s2 = sphere_metric(2, 1.0);
  const ScalarPotential f = first_harmonic(s2);
  const QuadratureRule coarse = sphere_rule(2);
  const QuadratureRule fine = doubled(coarse);
  ASSERT_EQ(fine.axes[0].nodes.size(), 128u);
  const BochnerIntegralReport a = bochner_conformal_identity(coarse, s2, f);
  const BochnerIntegralReport b = bochner_conformal_identity(fine, s2, f);
  EXPECT_NEAR(a.lhs, b.lhs, 1e-8);
  EXPECT_NEAR(a.rhs, b.rhs, 1e-8);
  const NongradientKwReport ka = nongradient_kw_residual(coarse, s2, rotation(s2));
  const NongradientKwReport kb = nongradient_kw_residual(fine, s2, rotation(s2));
  EXPECT_NEAR(ka.ric_xx, kb.ric_xx, 1e-8);
  EXPECT_NEAR(ka.nabla_x_sq, kb.nabla_x_sq, 1e-8);

  const MetricField s3 = sphere_metric(3, 1.0);
  const QuadratureRule c3 = sphere_rule(3, 12);
  const BochnerIntegralReport a3 = bochner_conformal_identity(c3, s3, first_harmonic(s3));
  const BochnerIntegralReport b3 = bochner_conformal_identity(doubled(c3), s3, first_harmonic(s3));
  EXPECT_NEAR(a3.lhs, b3.lhs, 1e-8);
  EXPECT_NEAR(a3.rhs, b3.rhs, 1e-8);

  const MetricField s2xs2 = catalog_lookup("s2xs2").metric;
  const QuadratureRule c4 = product_rule(sphere_rule(2, 8), sphere_rule(2, 8));
  EXPECT_NEAR(signature_quadrature(c4, s2xs2), signature_quadrature(doubled(c4), s2xs2), 1e-8);
}

TEST(Quadrature, RepeatedRunsAreIdentical) {
  const MetricField s3 = sphere_metric(3, 1.0);
  const QuadratureRule rule = sphere_rule(3, 10);
  const auto a = bochner_conformal_identity(rule, s3, first_harmonic(s3));
  const auto b = bochner_conformal_identity(rule, s3, first_harmonic(s3));
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.rhs, b.rhs);
  EXPECT_EQ(to_json(rule).dump(), to_json(sphere_rule(3, 10)).dump());
}
