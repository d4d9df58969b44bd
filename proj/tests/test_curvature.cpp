#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "curvlab/catalog.hpp"
#include "curvlab/curvature.hpp"

using namespace curvlab;

namespace {

double max_abs(const TensorD& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

Point first_sample(const MetricField& g, std::uint64_t seed = 7) { return sample_points(g.chart, 1, seed)[0]; }

}  // namespace

TEST(Curvature, UnitSphereIsEinstein) {
  for (int n = 2; n <= 5; ++n) {
    const MetricField g = sphere_metric(n, 1.0);
    for (const auto& p : sample_points(g.chart, 4, 11)) {
      const CurvaturePack pack = curvature_at(g, p, 0);
      EXPECT_NEAR(pack.scal, n * (n - 1.0), 1e-10);
      EXPECT_LT(max_abs(pack.ric - pack.g * (n - 1.0)), 1e-10);
      // R_ijkl = g_ik g_jl - g_il g_jk
      const TensorD expected = kulkarni_nomizu(pack.g, pack.g) * 0.5;
      EXPECT_LT(max_abs(pack.riem - expected), 1e-10);
    }
  }
}

TEST(Curvature, HyperbolicSpace) {
  const MetricField g = hyperbolic_metric(3);
  for (const auto& p : sample_points(g.chart, 4, 3)) EXPECT_NEAR(curvature_at(g, p, 0).scal, -6.0, 1e-10);
}

TEST(Curvature, StereographicSphere) {
  // Flat R^2 rescaled by u = log(2 / (1 + |x|^2)) is the unit sphere.
  const MetricField flat = flat_metric(Chart({{-1.0, 1.0}, {-1.0, 1.0}}, 0.1));
  const ScalarPotential u{flat.chart, [](std::span<const Jet> x) { return log(2.0 / (1.0 + x[0] * x[0] + x[1] * x[1])); }};
  const MetricField g = conformal_rescale(flat, u);
  for (const auto& p : sample_points(g.chart, 8, 5)) EXPECT_NEAR(curvature_at(g, p, 0).scal, 2.0, 1e-10);
}

TEST(Curvature, ConformalRescaleRoundTrip) {
  const MetricField g = sphere_metric(3, 1.0);
  const ScalarPotential u{g.chart, [](std::span<const Jet> x) { return 0.3 * sin(x[0]) * x[2]; }};
  const ScalarPotential minus_u{g.chart, [u](std::span<const Jet> x) { return -u.fn(x); }};
  const ScalarPotential zero{g.chart, [](std::span<const Jet> x) { return constant_like(x[0], 0.0); }};
  const Point p = first_sample(g);
  const TensorJ a = g.eval(p, 2);
  const TensorJ b = conformal_rescale(conformal_rescale(g, u), minus_u).eval(p, 2);
  const TensorJ c = conformal_rescale(g, zero).eval(p, 2);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t m = 0; m < a.at_flat(k).coeffs().size(); ++m) {
      EXPECT_NEAR(a.at_flat(k).coeffs()[m], b.at_flat(k).coeffs()[m], 1e-12);
      EXPECT_EQ(a.at_flat(k).coeffs()[m], c.at_flat(k).coeffs()[m]);
    }
}

TEST(Curvature, WarpedRicciComponentsMatchClosedForm) {
  // dt^2 + e^{q} delta with q = t^2: R_00 = -((n-1)/4)(2q'' + q'^2).
  for (int n = 3; n <= 5; ++n) {
    const CatalogEntry e = catalog_lookup("warped_gaussian", n);
    for (const auto& p : sample_points(e.metric.chart, 4, 9)) {
      const double t = p[0];
      const CurvaturePack pack = curvature_at(e.metric, p, 0);
      EXPECT_NEAR(pack.ric(0, 0), -((n - 1) / 4.0) * (4.0 + 4.0 * t * t), 1e-9);
    }
  }
}

TEST(Curvature, WarpedSphereIsRound) {
  const MetricField g = warped_product([](const Jet& t) { return sin(t) * sin(t); }, {0.0, std::numbers::pi},
                                       sphere_metric(3, 1.0));
  for (const auto& p : sample_points(g.chart, 4, 2)) EXPECT_NEAR(curvature_at(g, p, 0).scal, 12.0, 1e-9);
}

TEST(Curvature, ConstantWarpingEqualsScaledProduct) {
  const MetricField fiber = sphere_metric(2, 1.0);
  const MetricField warped = warped_product([](const Jet& t) { return constant_like(t, 2.25); }, {-1.0, 1.0}, fiber);
  const MetricField scaled = warped_product([](const Jet& t) { return constant_like(t, 1.0); }, {-1.0, 1.0},
                                            sphere_metric(2, 1.5));
  const Point p = first_sample(warped);
  const TensorJ a = warped.eval(p, 2);
  const TensorJ b = scaled.eval(p, 2);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t m = 0; m < a.at_flat(k).coeffs().size(); ++m)
      EXPECT_NEAR(a.at_flat(k).coeffs()[m], b.at_flat(k).coeffs()[m], 1e-14);
}

TEST(Curvature, WeylVanishesInDimensionThree) {
  const CatalogEntry e = catalog_lookup("warped_gaussian", 3);
  const CurvaturePack pack = curvature_at(e.metric, first_sample(e.metric), 0);
  EXPECT_LT(max_abs(pack.weyl), 1e-9);
}

TEST(Curvature, ProductOfSpheresHasWeyl) {
  const CatalogEntry e = catalog_lookup("s2xs2");
  const CurvaturePack pack = curvature_at(e.metric, first_sample(e.metric), 0);
  EXPECT_GT(norm_sq(pack.weyl, pack.g_inv), 0.1);
  // Traces of W vanish.
  EXPECT_LT(max_abs(trace(pack.weyl, pack.g_inv, 0, 2)), 1e-12);
}

TEST(Curvature, CottonRoutesAgree) {
  for (const std::string name : {"warped_yf", "warped_gaussian", "s2xs2", "product_lsef"}) {
    const CatalogEntry e = catalog_lookup(name);
    for (const auto& p : sample_points(e.metric.chart, 4, 13)) {
      const CurvaturePack pack = curvature_at(e.metric, p, 1);
      const TensorD a = cotton(pack);
      const TensorD b = cotton_via_weyl(pack);
      EXPECT_LE(norm(a - b, pack.g_inv), 1e-8 * (1.0 + norm(a, pack.g_inv))) << name;
    }
  }
}

TEST(Curvature, CottonNonzeroOnWarpedYamabeExample) {
  const CatalogEntry e = catalog_lookup("warped_yf");
  const CurvaturePack pack = curvature_at(e.metric, first_sample(e.metric), 1);
  EXPECT_GT(norm(cotton(pack), pack.g_inv), 1e-3);
}

TEST(Curvature, ContractedSecondBianchi) {
  const CatalogEntry e = catalog_lookup("warped_yf");
  for (const auto& p : sample_points(e.metric.chart, 3, 1)) {
    const CurvaturePack pack = curvature_at(e.metric, p, 1);
    const TensorD div_ric = trace(pack.nabla_ric, pack.g_inv, 0, 2);
    EXPECT_LT(max_abs(div_ric * 2.0 - pack.grad_scal), 1e-8 * (1.0 + max_abs(pack.grad_scal)));
  }
}

TEST(Curvature, BachDivergenceFormula) {
  const CatalogEntry e = catalog_lookup("warped_yf");
  const CurvaturePack pack = curvature_at(e.metric, first_sample(e.metric), 3);
  const TensorD lhs = bach_divergence(pack);
  const TensorD rhs = bach_divergence_expected(pack);
  EXPECT_GT(norm(rhs, pack.g_inv), 1e-3);
  EXPECT_LE(norm(lhs - rhs, pack.g_inv), 1e-5 * (1.0 + norm(rhs, pack.g_inv)));
  EXPECT_LT(std::abs(trace(pack.bach, pack.g_inv, 0, 1).at_flat(0)), 1e-8);
}

TEST(Curvature, DepthShortfallIsRejected) {
  const CatalogEntry e = catalog_lookup("sphere", 4);
  const Point p = first_sample(e.metric);
  const CurvaturePack pack = curvature_at(e.metric, p, 0);
  EXPECT_THROW(cotton(pack), std::invalid_argument);
  EXPECT_THROW(curvature_from_jets(e.metric.eval(p, 2), p, 1), std::invalid_argument);
  EXPECT_THROW(bach(curvature_at(e.metric, p, 1)), std::invalid_argument);
}

TEST(Curvature, NonPositiveMetricRejected) {
  const MetricField bad{Chart({{-1.0, 1.0}, {-1.0, 1.0}}, 0.1), [](std::span<const Jet> x) {
                          TensorJ g(2, 2, constant_like(x[0], 0.0));
                          g(0, 0) = constant_like(x[0], 1.0);
                          g(1, 1) = constant_like(x[0], -1.0);
                          return g;
                        }};
  EXPECT_THROW(curvature_at(bad, Point{0.0, 0.0}, 0), std::domain_error);
}

TEST(KulkarniNomizu, MetricWithItself) {
  const CatalogEntry e = catalog_lookup("s2xs2");
  const TensorD g = e.metric.value(first_sample(e.metric));
  const TensorD kn = kulkarni_nomizu(g, g);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int t = 0; t < 4; ++t)
          EXPECT_DOUBLE_EQ(kn(i, j, k, t), 2.0 * (g(i, k) * g(j, t) - g(i, t) * g(j, k)));
}

TEST(KulkarniNomizu, Symmetric) {
  TensorD a(3, 2, 0.0), b(3, 2, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      a(i, j) = a(j, i) = std::sin(1.0 + i + 3 * j);
      b(i, j) = b(j, i) = std::cos(2.0 * i - j);
    }
  EXPECT_LT(max_abs(kulkarni_nomizu(a, b) - kulkarni_nomizu(b, a)), 1e-15);
}

TEST(KulkarniNomizu, DivergenceOfRicciOnSphere) {
  const MetricField g = sphere_metric(3, 1.0);
  const Point p = first_sample(g);
  const CurvaturePack pack = curvature_at(g, p, 1);
  const KnDivergenceCheck check = kn_divergence_check(pack.jets->conn, pack.jets->ric);
  EXPECT_LT(check.residual, 1e-9);
  // A field with nonzero divergence exercises every term.
  const CatalogEntry e = catalog_lookup("warped_yf");
  const CurvaturePack wp = curvature_at(e.metric, first_sample(e.metric), 1);
  const KnDivergenceCheck c2 = kn_divergence_check(wp.jets->conn, wp.jets->ric);
  EXPECT_GT(norm(c2.direct, wp.g_inv), 1e-2);
  EXPECT_LT(c2.residual, 1e-9);
}

TEST(Codazzi, MetricAndEinsteinRicci) {
  const MetricField g = sphere_metric(4, 1.0);
  const CurvaturePack pack = curvature_at(g, first_sample(g), 1);
  EXPECT_LT(max_abs(codazzi_residual(pack.jets->conn, pack.jets->conn.metric(3))), 1e-12);
  EXPECT_LT(max_abs(codazzi_residual(pack.jets->conn, pack.jets->ric)), 1e-9);
}

TEST(WeylSplit, SphereAndProduct) {
  const MetricField s4 = sphere_metric(4, 1.0);
  const WeylSplit a = weyl_pm(curvature_at(s4, first_sample(s4), 0));
  EXPECT_LT(a.plus.norm() + a.minus.norm(), 1e-9);
  const CatalogEntry e = catalog_lookup("s2xs2");
  for (const auto& p : sample_points(e.metric.chart, 8, 4)) {
    const CurvaturePack pack = curvature_at(e.metric, p, 0);
    const WeylSplit w = weyl_pm(pack);
    EXPECT_NEAR(w.norm_plus_sq, w.norm_minus_sq, 1e-9);
    EXPECT_NEAR(w.norm_plus_sq + w.norm_minus_sq, norm_sq(pack.weyl, pack.g_inv), 1e-9);
    EXPECT_NEAR(w.plus.trace(), 0.0, 1e-12);
  }
  EXPECT_THROW(weyl_pm(curvature_at(sphere_metric(3, 1.0), first_sample(sphere_metric(3, 1.0)), 0)),
               std::invalid_argument);
}

namespace {

// g + eps (dw0^2 + dw1^2) where w0, w1 are ambient coordinates of S^3 written in the chart.
MetricField deformed(const MetricField& base, std::function<std::array<Jet, 2>(std::span<const Jet>)> ambient) {
  return {base.chart, [base, ambient](std::span<const Jet> x) {
            const int n = static_cast<int>(x.size());
            Point p(n);
            for (int i = 0; i < n; ++i) p[i] = x[i].value();
            const auto up = seed_point(p, x[0].order() + 1);
            const auto w = ambient(up);
            TensorJ g = base.fn(x);
            for (const Jet& wk : w)
              for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g(i, j) += 0.4 * wk.derivative(i) * wk.derivative(j);
            return g;
          }};
}

}  // namespace

TEST(Curvature, ScalarInvariantsAgreeAcrossCharts) {
  const MetricField angles = deformed(sphere_metric(3, 1.0), [](std::span<const Jet> x) {
    return std::array<Jet, 2>{cos(x[0]), sin(x[0]) * cos(x[1])};
  });
  const MetricField flat = flat_metric(Chart(std::vector<Interval>(3, {-1.0, 1.0}), 0.1));
  const ScalarPotential u{flat.chart, [](std::span<const Jet> x) {
                            return log(2.0 / (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
                          }};
  const MetricField stereo = deformed(conformal_rescale(flat, u), [](std::span<const Jet> x) {
    const Jet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return std::array<Jet, 2>{(r2 - 1.0) / (r2 + 1.0), 2.0 * x[0] / (r2 + 1.0)};
  });
  const Point q{0.2, -0.3, 0.4};
  const double r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
  const double w0 = (r2 - 1) / (r2 + 1), w1 = 2 * q[0] / (r2 + 1), w2 = 2 * q[1] / (r2 + 1), w3 = 2 * q[2] / (r2 + 1);
  const double th1 = std::acos(w0);
  const double th2 = std::acos(w1 / std::sin(th1));
  double phi = std::atan2(w3, w2);
  if (phi < 0) phi += 2 * std::numbers::pi;
  const CurvaturePack a = curvature_at(angles, Point{th1, th2, phi}, 1);
  const CurvaturePack b = curvature_at(stereo, q, 1);
  EXPECT_GT(norm_sq(b.cotton, b.g_inv), 1e-4);
  EXPECT_NEAR(a.scal, b.scal, 1e-8);
  EXPECT_NEAR(norm_sq(a.ric, a.g_inv), norm_sq(b.ric, b.g_inv), 1e-8);
  EXPECT_NEAR(norm_sq(a.weyl, a.g_inv), norm_sq(b.weyl, b.g_inv), 1e-8);
  EXPECT_NEAR(norm_sq(a.cotton, a.g_inv), norm_sq(b.cotton, b.g_inv), 1e-8);
}
