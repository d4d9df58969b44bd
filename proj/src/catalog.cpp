#include "curvlab/catalog.hpp"

#include <numbers>
#include <stdexcept>

namespace curvlab {

namespace {

using C = ClassId;

std::vector<ClassId> all_classes() { return {kAllClasses.begin(), kAllClasses.end()}; }

Chart box(int n, double lo, double hi) { return Chart(std::vector<Interval>(n, {lo, hi}), 0.1); }

ScalarPotential zero_potential(const Chart& chart) {
  return {chart, [](std::span<const Jet> x) { return constant_like(x[0], 0.0); }};
}

void require_dim(const std::string& name, int dim, int lo, int hi) {
  if (dim < lo || dim > hi)
    throw std::invalid_argument("catalog entry " + name + " supports dimensions " + std::to_string(lo) + ".." +
                                std::to_string(hi) + ", got " + std::to_string(dim));
}

}  // namespace

MetricField flat_metric(const Chart& chart) {
  const int n = chart.dim();
  return {chart, [n](std::span<const Jet> x) {
            TensorJ g(n, 2, constant_like(x[0], 0.0));
            for (int i = 0; i < n; ++i) g(i, i) = constant_like(x[0], 1.0);
            return g;
          }};
}

MetricField sphere_metric(int m, double radius, double margin) {
  std::vector<Interval> ranges(m - 1, {0.0, std::numbers::pi});
  ranges.push_back({0.0, 2.0 * std::numbers::pi});
  const double r2 = radius * radius;
  return {Chart(std::move(ranges), margin), [m, r2](std::span<const Jet> x) {
            TensorJ g(m, 2, constant_like(x[0], 0.0));
            Jet factor = constant_like(x[0], r2);
            for (int k = 0; k < m; ++k) {
              g(k, k) = factor;
              if (k + 1 < m) {
                const Jet s = sin(x[k]);
                factor = factor * s * s;
              }
            }
            return g;
          }};
}

MetricField hyperbolic_metric(int m, double margin) {
  std::vector<Interval> ranges(m - 1, {-1.0, 1.0});
  ranges.push_back({0.5, 2.0});
  return {Chart(std::move(ranges), margin), [m](std::span<const Jet> x) {
            const Jet inv = 1.0 / (x[m - 1] * x[m - 1]);
            TensorJ g(m, 2, constant_like(x[0], 0.0));
            for (int i = 0; i < m; ++i) g(i, i) = inv;
            return g;
          }};
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"euclidean",     "gaussian_shrinker", "sphere",
                                                 "hyperbolic",    "round_cylinder",    "product_lsef",
                                                 "warped_gaussian", "warped_yf",       "s2xs2"};
  return names;
}

CatalogEntry catalog_lookup(const std::string& name, int dim, double lambda) {
  CatalogEntry e;
  e.name = name;
  if (name == "euclidean") {
    const int n = dim > 0 ? dim : 3;
    require_dim(name, n, 2, 8);
    e.metric = flat_metric(box(n, -1.0, 1.0));
    e.potential = zero_potential(e.metric.chart);
    e.vector_field = VectorFieldSpec{e.metric.chart, [n](std::span<const Jet> x) {
                                       std::vector<Jet> v(n, constant_like(x[0], 0.0));
                                       v[0] = -x[1];
                                       v[1] = x[0];
                                       return v;
                                     }};
    e.expected_memberships = all_classes();
    e.known = {0.0, 0.0};
  } else if (name == "gaussian_shrinker") {
    const int n = dim > 0 ? dim : 3;
    require_dim(name, n, 2, 8);
    e.metric = flat_metric(box(n, -1.0, 1.0));
    e.potential = ScalarPotential{e.metric.chart, [lambda](std::span<const Jet> x) {
                                    Jet s = x[0] * x[0];
                                    for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
                                    return 0.5 * lambda * s;
                                  }};
    e.vector_field = gradient_field(e.metric, *e.potential);
    e.expected_memberships = all_classes();
    e.known = {0.0, lambda};
  } else if (name == "sphere") {
    const int n = dim > 0 ? dim : 3;
    require_dim(name, n, 2, 6);
    e.metric = sphere_metric(n, 1.0);
    e.potential = ScalarPotential{e.metric.chart, [](std::span<const Jet> x) { return cos(x[0]); }};
    e.vector_field = VectorFieldSpec{e.metric.chart, [n](std::span<const Jet> x) {
                                       std::vector<Jet> v(n, constant_like(x[0], 0.0));
                                       v[n - 1] = constant_like(x[0], 1.0);
                                       return v;
                                     }};
    e.expected_memberships = {C::SFx, C::LSx, C::LSEx, C::PRx, C::Ex, C::HCx, C::Yx,
                              C::SF,  C::LS,  C::LSE,  C::PR,  C::E,  C::HC,  C::Y};
    e.known = {n * (n - 1.0), n - 1.0};
  } else if (name == "hyperbolic") {
    const int n = dim > 0 ? dim : 3;
    require_dim(name, n, 2, 8);
    e.metric = hyperbolic_metric(n);
    e.potential = zero_potential(e.metric.chart);
    e.vector_field = VectorFieldSpec{e.metric.chart, [](std::span<const Jet> x) {
                                       return std::vector<Jet>(x.begin(), x.end());
                                     }};
    e.expected_memberships = all_classes();
    e.known = {-n * (n - 1.0), -(n - 1.0)};
  } else if (name == "round_cylinder") {
    const int n = dim > 0 ? dim : 4;
    require_dim(name, n, 3, 6);
    // The line factor has dimension 1, so the product is a warped product with F = 1.
    e.metric = warped_product([](const Jet& t) { return constant_like(t, 1.0); }, {-2.0, 2.0}, sphere_metric(n - 1, 1.0));
    e.potential = ScalarPotential{e.metric.chart, [n](std::span<const Jet> x) { return 0.5 * (n - 2.0) * x[0] * x[0]; }};
    e.vector_field = gradient_field(e.metric, *e.potential);
    e.expected_memberships = {C::SFf, C::LSf, C::LSEf, C::PRf, C::Ef, C::HCf, C::HCfLambda, C::Yf,
                              C::SFx, C::LSx, C::LSEx, C::PRx, C::Ex, C::HCx, C::Yx,
                              C::LS,  C::PR,  C::HC,   C::Y};
    e.known = {(n - 1.0) * (n - 2.0), n - 2.0};
  } else if (name == "product_lsef") {
    const int n = dim > 0 ? dim : 4;
    require_dim(name, n, 4, 4);
    e.metric = product_metric(flat_metric(box(2, -1.0, 1.0)), sphere_metric(2, 1.0));
    e.potential = ScalarPotential{e.metric.chart, [](std::span<const Jet> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); }};
    e.vector_field = gradient_field(e.metric, *e.potential);
    e.expected_memberships = {C::LSf, C::LSEf, C::PRf, C::Ef, C::HCf, C::HCfLambda, C::Yf,
                              C::LSx, C::LSEx, C::PRx, C::Ex, C::HCx, C::Yx,
                              C::LS,  C::PR,   C::HC,  C::Y};
    e.known = {2.0, 1.0};
  } else if (name == "warped_gaussian") {
    const int n = dim > 0 ? dim : 4;
    require_dim(name, n, 3, 6);
    e.metric = warped_product([](const Jet& t) { return exp(t * t); }, {-2.0, 2.0}, flat_metric(box(n - 1, -1.0, 1.0)));
    e.potential = ScalarPotential{e.metric.chart, [n](std::span<const Jet> x) { return 0.5 * n * log(1.0 + x[0] * x[0]); }};
    e.vector_field = gradient_field(e.metric, *e.potential);
    e.expected_memberships = {C::HCf, C::Yf, C::HCx, C::Yx};
  } else if (name == "warped_yf") {
    const int n = dim > 0 ? dim : 5;
    require_dim(name, n, 5, 5);
    const MetricField fiber = product_metric(sphere_metric(2, 1.0), hyperbolic_metric(2));
    e.metric = warped_product([](const Jet& t) { return exp(t * t); }, {-2.0, 2.0}, fiber);
    e.potential = ScalarPotential{e.metric.chart, [n](std::span<const Jet> x) { return 0.5 * n * log(1.0 + x[0] * x[0]); }};
    e.vector_field = gradient_field(e.metric, *e.potential);
    e.expected_memberships = {C::Yf, C::Yx};
  } else if (name == "s2xs2") {
    const int n = dim > 0 ? dim : 4;
    require_dim(name, n, 4, 4);
    e.metric = product_metric(sphere_metric(2, 1.0), sphere_metric(2, 1.0));
    e.potential = zero_potential(e.metric.chart);
    e.vector_field = VectorFieldSpec{e.metric.chart, [](std::span<const Jet> x) {
                                       std::vector<Jet> v(4, constant_like(x[0], 0.0));
                                       v[1] = constant_like(x[0], 1.0);
                                       return v;
                                     }};
    e.expected_memberships = {C::LSf, C::LSEf, C::PRf, C::Ef, C::HCf, C::HCfLambda, C::Yf,
                              C::LSx, C::LSEx, C::PRx, C::Ex, C::HCx, C::Yx,
                              C::LS,  C::LSE,  C::PR,  C::E,  C::HC,  C::Y};
    e.known = {4.0, 1.0};
  } else {
    throw std::invalid_argument("unknown catalog geometry '" + name + "'");
  }
  return e;
}

std::vector<CatalogEntry> catalog_all() {
  std::vector<CatalogEntry> out;
  for (const auto& name : catalog_names()) out.push_back(catalog_lookup(name));
  return out;
}

}  // namespace curvlab
