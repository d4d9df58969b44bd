#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "curvlab/jet.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double side() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Axis-aligned coordinate box. Sample points stay `margin * side` away from every face.
class Chart {
 public:
  Chart() = default;
  Chart(std::vector<Interval> ranges, double margin);

  int dim() const { return static_cast<int>(ranges_.size()); }
  const std::vector<Interval>& ranges() const { return ranges_; }
  double margin() const { return margin_; }
  /// The margin-shrunk box.
  std::vector<Interval> interior() const;
  bool contains(std::span<const double> p) const;

  bool operator==(const Chart&) const = default;

 private:
  std::vector<Interval> ranges_;
  double margin_ = 0.1;
};

/// Component functions receive one seeded jet per chart variable (constants at order 0).
using MetricFn = std::function<TensorJ(std::span<const Jet>)>;
using ScalarFn = std::function<Jet(std::span<const Jet>)>;
using VectorFn = std::function<std::vector<Jet>(std::span<const Jet>)>;

/// Riemannian metric g_ij in a coordinate frame.
struct MetricField {
  Chart chart;
  MetricFn fn;

  int dim() const { return chart.dim(); }
  /// Components as jets of the given order around p; rejects a non-positive-definite g(p).
  TensorJ eval(std::span<const double> p, int order) const;
  TensorD value(std::span<const double> p) const { return values(eval(p, 0)); }
};

struct ScalarPotential {
  Chart chart;
  ScalarFn fn;

  Jet eval(std::span<const double> p, int order) const;
};

/// Contravariant components X^i.
struct VectorFieldSpec {
  Chart chart;
  VectorFn fn;

  std::vector<Jet> eval(std::span<const double> p, int order) const;
};

/// Component-wise e^{2u} g.
MetricField conformal_rescale(const MetricField& g, const ScalarPotential& u);

/// dt^2 + F(t) h on interval x fiber chart. F maps the t-jet to the warping jet.
MetricField warped_product(std::function<Jet(const Jet&)> warping, const Interval& interval, const MetricField& fiber);

/// Riemannian product g1 + g2 on the product chart (g1 coordinates first).
MetricField product_metric(const MetricField& first, const MetricField& second);

/// X^i = g^{ij} df_j. Evaluating at order k needs the potential at order k + 1.
VectorFieldSpec gradient_field(const MetricField& g, const ScalarPotential& f);

/// Pullback of a scalar function defined on a factor of a product chart.
ScalarPotential lift_potential(const ScalarPotential& f, int dims, std::vector<int> var_map, const Chart& chart);
VectorFieldSpec lift_vector_field(const VectorFieldSpec& x, int dims, std::vector<int> var_map, const Chart& chart);

/// Deterministic pseudo-random points in the margin-shrunk box.
std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed);

/// Jet-valued matrix inverse by Gauss-Jordan elimination with partial pivoting on the constant terms.
TensorJ inverse(const TensorJ& m);

/// Throws std::domain_error unless the symmetric matrix is positive definite.
void require_positive_definite(const TensorD& g, const std::string& what);

}  // namespace curvlab
