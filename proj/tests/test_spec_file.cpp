#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "curvlab/classifier.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/spec_file.hpp"

using namespace curvlab;
using nlohmann::json;

namespace {

std::string error_path(const json& spec) {
  try {
    load_geometry_spec(spec);
  } catch (const SpecError& e) {
    return e.path();
  }
  return "<no error>";
}

json stereographic_sphere() {
  return json::parse(R"js({
    "name": "stereographic", "dim": 2,
    "metric": {"kind": "conformal", "params": {"base": {"kind": "flat"}, "u": "log(2/(1 + x1^2 + x2^2))"}},
    "potential": {"kind": "expression", "params": {"expr": "(1 - x1^2 - x2^2)/(1 + x1^2 + x2^2)"}},
    "vector_field": {"kind": "gradient"},
    "chart": {"ranges": [[-1, 1], [-1, 1]], "margin": 0.1}
  })js");
}

}  // namespace

TEST(SpecFile, ExpressionMetricMatchesCatalog) {
  const json spec = json::parse(R"js({
    "name": "warped", "dim": 3,
    "metric": {"kind": "expression", "params": {"diagonal": ["1", "exp(x1^2)", "exp(x1^2)"]}},
    "potential": {"kind": "expression", "params": {"expr": "1.5*log(1 + x1^2)"}},
    "chart": {"ranges": [[-2, 2], [-1, 1], [-1, 1]], "margin": 0.1}
  })js");
  const CatalogEntry a = load_geometry_spec(spec);
  const CatalogEntry b = catalog_lookup("warped_gaussian", 3);
  EXPECT_EQ(a.name, "warped");
  EXPECT_TRUE(a.expected_memberships.empty());
  for (const Point& p : sample_points(a.metric.chart, 8, 2)) {
    const auto ga = a.metric.eval(p, 2);
    const auto gb = b.metric.eval(p, 2);
    for (std::size_t k = 0; k < ga.data().size(); ++k)
      for (std::size_t c = 0; c < ga.data()[k].coeffs().size(); ++c)
        EXPECT_NEAR(ga.data()[k].coeffs()[c], gb.data()[k].coeffs()[c], 1e-12);
    EXPECT_NEAR(a.potential->eval(p, 0).value(), b.potential->eval(p, 0).value(), 1e-14);
  }
}

TEST(SpecFile, StereographicSphereHasScalarCurvatureTwo) {
  const CatalogEntry e = load_geometry_spec(stereographic_sphere());
  ASSERT_TRUE(e.vector_field.has_value());
  for (const Point& p : sample_points(e.metric.chart, 8, 3))
    EXPECT_NEAR(curvature_at(e.metric, p, 0).scal, 2.0, 1e-10);
  // The first spherical harmonic is a conformal gradient field, never Killing.
  EXPECT_EQ(classify(e, ClassId::E).verdict, Verdict::Member);
}

TEST(SpecFile, CatalogKindKeepsExpectationsUnlessModified) {
  const CatalogEntry plain = load_geometry_spec(json::parse(
      R"js({"dim": 4, "metric": {"kind": "catalog", "params": {"name": "warped_gaussian"}}})js"));
  EXPECT_EQ(plain.name, "warped_gaussian");
  EXPECT_FALSE(plain.expected_memberships.empty());
  EXPECT_TRUE(plain.potential.has_value());
  const CatalogEntry modified = load_geometry_spec(json::parse(
      R"js({"dim": 4, "metric": {"kind": "catalog", "params": {"name": "warped_gaussian"}},
          "potential": {"kind": "zero"}})js"));
  EXPECT_TRUE(modified.expected_memberships.empty());
}

TEST(SpecFile, ProductAndWarpedKinds) {
  const CatalogEntry a = load_geometry_spec(json::parse(R"js({
    "dim": 4,
    "metric": {"kind": "product", "params": {"factors": [{"kind": "flat", "dim": 2}, {"kind": "sphere", "dim": 2}]}}
  })js"));
  const CatalogEntry b = catalog_lookup("product_lsef");
  const CatalogEntry c = load_geometry_spec(json::parse(R"js({
    "dim": 4,
    "metric": {"kind": "warped", "params": {"warping": "sin(x1)^2", "fiber": {"kind": "sphere"}, "interval": [0.3, 2.8]}}
  })js"));
  for (const Point& p : sample_points(a.metric.chart, 4, 1)) {
    EXPECT_NEAR(curvature_at(a.metric, p, 0).scal, curvature_at(b.metric, p, 0).scal, 1e-12);
  }
  for (const Point& p : sample_points(c.metric.chart, 4, 1)) EXPECT_NEAR(curvature_at(c.metric, p, 0).scal, 12.0, 1e-9);
}

TEST(SpecFile, ErrorsNameTheField) {
  json s = stereographic_sphere();
  s["colour"] = "blue";
  EXPECT_EQ(error_path(s), "colour");

  s = stereographic_sphere();
  s["metric"]["params"]["extra"] = 1;
  EXPECT_EQ(error_path(s), "metric.params.extra");

  s = stereographic_sphere();
  s["potential"]["params"]["expr"] = "x1 + x3";
  EXPECT_EQ(error_path(s), "potential.params.expr");

  s = stereographic_sphere();
  s["potential"]["params"]["expr"] = "x1 + * 2";
  EXPECT_EQ(error_path(s), "potential.params.expr");

  s = stereographic_sphere();
  s["chart"]["margin"] = 0.7;
  EXPECT_EQ(error_path(s), "chart");

  s = stereographic_sphere();
  s["metric"]["kind"] = "klein_bottle";
  EXPECT_EQ(error_path(s), "metric.kind");

  const json asym = json::parse(R"js({"dim": 2, "metric": {"kind": "expression",
      "params": {"components": [["1", "0.1*x1"], ["0.1*x2", "1"]]}}})js");
  EXPECT_EQ(error_path(asym), "metric.params.components[1][0]");

  const json indefinite = json::parse(R"js({"dim": 2, "metric": {"kind": "expression",
      "params": {"diagonal": ["1", "x1"]}}})js");
  EXPECT_EQ(error_path(indefinite), "metric");

  EXPECT_EQ(error_path(json::parse(R"js({"metric": {"kind": "flat"}})js")), "dim");
  EXPECT_EQ(error_path(json::parse(R"js({"dim": 3, "metric": {"kind": "flat"}, "vector_field": {"kind": "gradient"}})js")),
            "vector_field");
}

TEST(SpecFile, FileRoundTrip) {
  const std::string path = testing::TempDir() + "/curvlab_spec_test.json";
  {
    std::ofstream out(path);
    out << stereographic_sphere().dump(2);
  }
  EXPECT_EQ(load_geometry_spec_file(path).name, "stereographic");
  std::remove(path.c_str());
  EXPECT_THROW(load_geometry_spec_file(path), SpecError);
}

TEST(RandomGeometry, DeterministicAndLoadable) {
  EXPECT_EQ(random_geometry_spec(5).dump(), random_geometry_spec(5).dump());
  EXPECT_NE(random_geometry_spec(5).dump(), random_geometry_spec(6).dump());
  for (std::uint64_t s = 0; s < 40; ++s) {
    const CatalogEntry e = load_geometry_spec(random_geometry_spec(s));
    EXPECT_TRUE(e.potential.has_value()) << s;
  }
}

TEST(RandomGeometry, FamiliesLandInTheirClasses) {
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const json spec = random_geometry_spec(s);
    const std::string name = spec["name"];
    const std::string family = name.substr(0, name.rfind('_'));
    seen.insert(family);
    const CatalogEntry e = load_geometry_spec(spec);
    const auto r = classify_many(e, {ClassId::Ef, ClassId::HCf, ClassId::Yf}, {7, 6});
    const bool einstein = family != "random_expression" && family != "warped_gaussian";
    EXPECT_EQ(r[0].verdict, einstein ? Verdict::Member : Verdict::NonMember) << name;
    EXPECT_EQ(r[1].verdict, family == "random_expression" ? Verdict::NonMember : Verdict::Member) << name;
    EXPECT_EQ(r[2].verdict, family == "random_expression" ? Verdict::NonMember : Verdict::Member) << name;
  }
  EXPECT_EQ(seen.size(), 6u);
}
