#include <gtest/gtest.h>

#include <cmath>

#include "curvlab/catalog.hpp"
#include "curvlab/potential_tensors.hpp"

using namespace curvlab;

namespace {

double max_abs(const TensorD& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(const TensorD& a, const TensorD& b) { return max_abs(a - b); }

}  // namespace

TEST(FPack, GaussianShrinkerIsEinsteinWeighted) {
  for (int n = 2; n <= 4; ++n)
    for (double lambda : {1.0, -0.5}) {
      const CatalogEntry e = catalog_lookup("gaussian_shrinker", n, lambda);
      for (const auto& p : sample_points(e.metric.chart, 4, 3)) {
        const CurvaturePack pack = curvature_at(e.metric, p, 1);
        const FPack fp = f_pack(pack, *e.potential);
        EXPECT_LT(max_diff(fp.ric_f, pack.g * lambda), 1e-12);
        EXPECT_NEAR(fp.scal_f, n * lambda, 1e-12);
      }
    }
}

TEST(FPack, DTensorVanishesOnEinsteinMetrics) {
  // Any potential on an Einstein metric: every term of D cancels.
  const CatalogEntry sphere = catalog_lookup("sphere", 4);
  const ScalarPotential f{sphere.metric.chart, [](std::span<const Jet> x) { return sin(x[0]) * x[3] + x[1] * x[2]; }};
  for (const auto& p : sample_points(sphere.metric.chart, 8, 5)) {
    const FPack fp = f_pack(curvature_at(sphere.metric, p, 0), f);
    EXPECT_LT(max_abs(fp.d_tensor), 1e-10);
  }
}

TEST(FPack, DTensorSkewAndTraceFree) {
  for (const char* name : {"warped_gaussian", "warped_yf", "product_lsef"}) {
    const CatalogEntry e = catalog_lookup(name);
    for (const auto& p : sample_points(e.metric.chart, 6, 17)) {
      const CurvaturePack pack = curvature_at(e.metric, p, 0);
      const FPack fp = f_pack(pack, *e.potential);
      const double scale = 1.0 + max_abs(fp.d_tensor);
      EXPECT_LT(max_abs(fp.d_tensor + permuted(fp.d_tensor, {0, 2, 1})) / scale, 1e-12) << name;
      EXPECT_LT(max_abs(trace(fp.d_tensor, pack.g_inv, 0, 1)) / scale, 1e-12) << name;
      EXPECT_LT(max_abs(trace(fp.d_tensor, pack.g_inv, 0, 2)) / scale, 1e-12) << name;
      EXPECT_LT(max_abs(trace(fp.d_tensor, pack.g_inv, 1, 2)) / scale, 1e-12) << name;
    }
  }
}

TEST(FPack, WarpedGaussianHasWeightedHarmonicCurvature) {
  for (int n = 3; n <= 5; ++n) {
    const CatalogEntry e = catalog_lookup("warped_gaussian", n);
    for (const auto& p : sample_points(e.metric.chart, 8, 21)) {
      const CurvaturePack pack = curvature_at(e.metric, p, 1);
      const FPack fp = f_pack(pack, *e.potential);
      EXPECT_LT(max_abs(fp.div_weighted_riem) / (1.0 + max_abs(pack.nabla_riem)), 1e-9) << n;
      EXPECT_LT(max_abs(fp.nabla_ric_f - permuted(fp.nabla_ric_f, {0, 2, 1})) / (1.0 + max_abs(fp.nabla_ric_f)), 1e-9);
      // Not a soliton: Ric_f is not a multiple of g.
      EXPECT_GT(max_abs(fp.ric_f - pack.g * (fp.scal_f / n)), 1e-2);
    }
  }
}

TEST(FPack, WeightedRiemannDecomposition) {
  for (const char* name : {"warped_gaussian", "product_lsef", "sphere"}) {
    const CatalogEntry e = catalog_lookup(name, 4);
    for (const auto& p : sample_points(e.metric.chart, 4, 2)) {
      const CurvaturePack pack = curvature_at(e.metric, p, 0);
      const FPack fp = f_pack(pack, *e.potential);
      const int n = pack.dim;
      const TensorD rebuilt = pack.weyl + kulkarni_nomizu(fp.schouten_f, pack.g) * (1.0 / (n - 2));
      EXPECT_LT(max_diff(fp.riem_f, rebuilt) / (1.0 + max_abs(fp.riem_f)), 1e-12) << name;
    }
  }
}

TEST(FPack, EinsteinTraceIdentity) {
  // (E_f o g)_{isks} = (n - 2)(Ric_f - R_f g)
  for (const char* name : {"warped_gaussian", "warped_yf", "round_cylinder"}) {
    const CatalogEntry e = catalog_lookup(name);
    for (const auto& p : sample_points(e.metric.chart, 4, 8)) {
      const CurvaturePack pack = curvature_at(e.metric, p, 0);
      const FPack fp = f_pack(pack, *e.potential);
      const int n = pack.dim;
      const TensorD lhs = trace(kulkarni_nomizu(fp.einstein_f, pack.g), pack.g_inv, 1, 3);
      const TensorD rhs = (fp.ric_f - pack.g * fp.scal_f) * (n - 2.0);
      EXPECT_LT(max_diff(lhs, rhs) / (1.0 + max_abs(rhs)), 1e-12) << name;
    }
  }
}

TEST(FPack, DepthZeroLeavesDerivativesEmpty) {
  const CatalogEntry e = catalog_lookup("warped_gaussian", 4);
  const Point p = sample_points(e.metric.chart, 1, 1)[0];
  const FPack fp = f_pack(curvature_at(e.metric, p, 0), *e.potential);
  EXPECT_TRUE(fp.nabla_ric_f.empty());
  EXPECT_TRUE(fp.div_weighted_riem.empty());
  EXPECT_THROW(f_pack(curvature_at(e.metric, p, 1), e.potential->eval(p, 2)), std::invalid_argument);
}

TEST(XPack, GradientReducesToFPack) {
  for (const auto& e : catalog_all()) {
    if (e.metric.dim() < 3) continue;
    const VectorFieldSpec grad = gradient_field(e.metric, *e.potential);
    for (const auto& p : sample_points(e.metric.chart, 3, 4)) {
      const CurvaturePack pack = curvature_at(e.metric, p, 1);
      const FPack fp = f_pack(pack, *e.potential);
      const XPack xp = x_pack(pack, grad);
      const double s = 1.0 + max_abs(pack.riem) + max_abs(fp.hess);
      EXPECT_LT(max_abs(xp.a_x), 1e-10 * s) << e.name;
      EXPECT_LT(max_diff(xp.ric_x, fp.ric_f), 1e-10 * s) << e.name;
      EXPECT_NEAR(xp.scal_x, fp.scal_f, 1e-10 * s) << e.name;
      EXPECT_LT(max_diff(xp.riem_x, fp.riem_f), 1e-10 * s) << e.name;
      EXPECT_LT(max_diff(xp.d_tensor, fp.d_tensor), 1e-10 * s) << e.name;
      EXPECT_LT(max_diff(xp.d_tensor_a, fp.d_tensor), 1e-10 * s) << e.name;
      EXPECT_LT(max_diff(xp.nabla_ric_x, fp.nabla_ric_f), 1e-9 * s) << e.name;
      EXPECT_LT(max_diff(xp.nabla_riem_x, fp.nabla_riem_f), 1e-9 * s) << e.name;
      EXPECT_LT(max_diff(xp.div_einstein_kn, fp.div_einstein_kn), 1e-9 * s) << e.name;
    }
  }
}

TEST(XPack, KillingFieldOnSphere) {
  const MetricField g = sphere_metric(2, 1.0);
  const VectorFieldSpec x{g.chart, [](std::span<const Jet> v) {
                            return std::vector<Jet>{constant_like(v[0], 0.0), constant_like(v[0], 1.0)};
                          }};
  for (const auto& p : sample_points(g.chart, 6, 6)) {
    const CurvaturePack pack = curvature_at(g, p, 1);
    const XPack xp = x_pack(pack, x);
    EXPECT_LT(max_abs(xp.lie), 1e-12);
    EXPECT_LT(max_diff(xp.ric_x, pack.ric), 1e-12);
    EXPECT_NEAR(xp.scal_x, pack.scal, 1e-12);
    EXPECT_GT(max_abs(xp.a_x), 1e-3);
  }
}

TEST(XPack, RotationOnEuclideanSpace) {
  const CatalogEntry e = catalog_lookup("euclidean", 3);
  for (const auto& p : sample_points(e.metric.chart, 4, 9)) {
    const XPack xp = x_pack(curvature_at(e.metric, p, 1), *e.vector_field);
    EXPECT_LT(max_abs(xp.lie), 1e-14);
    EXPECT_NEAR(xp.a_x(1, 0), 2.0, 1e-14);
    EXPECT_NEAR(xp.a_x(0, 1), -2.0, 1e-14);
    EXPECT_LT(max_abs(xp.d_tensor), 1e-14);
    EXPECT_LT(max_abs(xp.d_tensor_a), 1e-14);
  }
}

TEST(XPack, DecompositionOfCovariantDerivative) {
  const CatalogEntry e = catalog_lookup("hyperbolic", 3);
  const VectorFieldSpec x{e.metric.chart, [](std::span<const Jet> v) {
                            return std::vector<Jet>{v[1] * v[2], sin(v[0]) + v[2], exp(0.3 * v[0]) * v[1]};
                          }};
  for (const auto& p : sample_points(e.metric.chart, 4, 12)) {
    const CurvaturePack pack = curvature_at(e.metric, p, 1);
    const XPack xp = x_pack(pack, x);
    EXPECT_LT(max_diff(xp.nabla_x, (xp.a_x + xp.lie) * 0.5), 1e-13);
    EXPECT_LT(max_abs(xp.lie - permuted(xp.lie, {1, 0})), 1e-14);
    EXPECT_LT(max_abs(xp.a_x + permuted(xp.a_x, {1, 0})), 1e-14);
    EXPECT_LT(max_diff(xp.d_tensor, xp.d_tensor_a), 1e-11 * (1.0 + max_abs(xp.d_tensor)));
  }
}

TEST(XPack, CodazziDefectSplitsIntoCottonAndDTensor) {
  // For any X: (Ric_X)_{ij,k} - (Ric_X)_{ik,j} = C + X_t W_tijk - D^X + (y_k g_ij - y_j g_ik) / (2(n-1)),
  // with y = grad R - 2 Ric(X) - div A^X. Vanishing y turns Codazzi into the Cotton-Weyl relation.
  const CatalogEntry e = catalog_lookup("warped_yf");
  const VectorFieldSpec x{e.metric.chart, [](std::span<const Jet> v) {
                            return std::vector<Jet>{v[1] + v[0] * v[0], cos(v[2]), v[0] * v[3],
                                                    constant_like(v[0], 0.2), v[4] * v[1]};
                          }};
  for (const auto& p : sample_points(e.metric.chart, 4, 31)) {
    const CurvaturePack pack = curvature_at(e.metric, p, 1);
    const XPack xp = x_pack(pack, x);
    const int n = pack.dim;
    const TensorD codazzi = xp.nabla_ric_x - permuted(xp.nabla_ric_x, {0, 2, 1});
    TensorD x_weyl(n, 3, 0.0);
    for (int t = 0; t < n; ++t)
      for (std::size_t k = 0; k < x_weyl.size(); ++k) x_weyl.at_flat(k) += xp.x_up(t) * pack.weyl.at_flat(t * x_weyl.size() + k);
    TensorD y = pack.grad_scal - xp.div_a;
    for (int k = 0; k < n; ++k)
      for (int t = 0; t < n; ++t) y(k) -= 2.0 * xp.x_up(t) * pack.ric(t, k);
    TensorD rhs = pack.cotton + x_weyl - xp.d_tensor;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) rhs(i, j, k) += (y(k) * pack.g(i, j) - y(j) * pack.g(i, k)) / (2.0 * (n - 1));
    EXPECT_LT(max_diff(codazzi, rhs) / (1.0 + max_abs(codazzi)), 1e-10);
  }
}

TEST(SolitonIdentities, GaussianAndCylinder) {
  for (const char* name : {"gaussian_shrinker", "round_cylinder"}) {
    const CatalogEntry e = catalog_lookup(name);
    std::vector<SolitonSample> samples;
    for (const auto& p : sample_points(e.metric.chart, 16, 3)) {
      const CurvaturePack pack = curvature_at(e.metric, p, 1);
      samples.push_back(soliton_sample(pack, f_pack(pack, *e.potential)));
    }
    const SolitonIdentityReport r = soliton_identities(samples);
    EXPECT_NEAR(r.lambda, *e.known.lambda, 1e-10) << name;
    EXPECT_LT(r.lambda_stddev, 1e-9) << name;
    EXPECT_LT(r.max_gradient_residual, 1e-9) << name;
    EXPECT_LT(r.hamilton_stddev, 1e-9) << name;
    EXPECT_LT(r.max_codazzi_residual, 1e-9) << name;
  }
}

TEST(SolitonIdentities, WarpedGaussianSplitsTheReport) {
  const CatalogEntry e = catalog_lookup("warped_gaussian", 4);
  std::vector<SolitonSample> samples;
  for (const auto& p : sample_points(e.metric.chart, 16, 3)) {
    const CurvaturePack pack = curvature_at(e.metric, p, 1);
    samples.push_back(soliton_sample(pack, f_pack(pack, *e.potential)));
  }
  const SolitonIdentityReport r = soliton_identities(samples);
  EXPECT_LT(r.max_gradient_residual, 1e-8);
  EXPECT_GT(r.lambda_stddev, 1e-2);
}

TEST(Bochner, KillingLinearAndPolynomialFields) {
  const MetricField s2 = sphere_metric(2, 1.0);
  const VectorFieldSpec killing{s2.chart, [](std::span<const Jet> v) {
                                  return std::vector<Jet>{constant_like(v[0], 0.0), constant_like(v[0], 1.0)};
                                }};
  for (const auto& p : sample_points(s2.chart, 6, 1)) EXPECT_LT(bochner_pointwise(curvature_at(s2, p, 0), killing).residual, 1e-8);

  const CatalogEntry flat = catalog_lookup("euclidean", 3);
  const VectorFieldSpec constant{flat.metric.chart, [](std::span<const Jet> v) {
                                   return std::vector<Jet>{constant_like(v[0], 1.0), constant_like(v[0], -2.0),
                                                           constant_like(v[0], 0.5)};
                                 }};
  const VectorFieldSpec poly{flat.metric.chart, [](std::span<const Jet> v) {
                               return std::vector<Jet>{v[0] * v[1] * v[1], v[2] - v[0] * v[0] * v[2], 3.0 * v[1] * v[2]};
                             }};
  for (const auto& p : sample_points(flat.metric.chart, 6, 2)) {
    const BochnerCheck c = bochner_pointwise(curvature_at(flat.metric, p, 0), constant);
    EXPECT_EQ(c.lhs, 0.0);
    EXPECT_EQ(c.rhs, 0.0);
    EXPECT_LT(bochner_pointwise(curvature_at(flat.metric, p, 0), poly).residual, 1e-7);
  }

  const CatalogEntry yf = catalog_lookup("warped_yf");
  const VectorFieldSpec field{yf.metric.chart, [](std::span<const Jet> v) {
                                return std::vector<Jet>{v[1] * v[0], cos(v[2]), v[0] * v[3], exp(v[4]), v[4] * v[1]};
                              }};
  for (const auto& p : sample_points(yf.metric.chart, 4, 5))
    EXPECT_LT(bochner_pointwise(curvature_at(yf.metric, p, 0), field).residual, 1e-9);
}
