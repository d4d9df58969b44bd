#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "curvlab/geometry.hpp"

namespace curvlab {

/// One Gauss-Legendre rule on [lo, hi].
struct QuadratureAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Tensor product of Gauss-Legendre rules, one per chart axis.
struct QuadratureRule {
  int dim = 0;
  std::vector<QuadratureAxis> axes;

  std::size_t total_nodes() const;
  /// Polynomial degree integrated exactly along every axis: 2m - 1 for the coarsest axis.
  int exactness() const;
};

QuadratureAxis gauss_legendre(int nodes, double lo, double hi);

/// Rule in the hyperspherical angles of sphere_metric: theta axes on [cap, pi - cap], the last
/// (azimuth) axis on [0, 2 pi]. `nodes` gives the count per axis, or one count for all axes.
QuadratureRule sphere_rule(int n, int nodes = 64, double cap = 1e-6);
QuadratureRule sphere_rule(int n, const std::vector<int>& nodes, double cap = 1e-6);
/// Axes of `first` followed by those of `second`, matching product_metric.
QuadratureRule product_rule(const QuadratureRule& first, const QuadratureRule& second);
/// Same axes with twice the nodes on each.
QuadratureRule doubled(const QuadratureRule& rule);

/// Volume of the round unit S^n from vol(S^0) = 2, vol(S^1) = 2 pi, vol(S^n) = 2 pi vol(S^{n-2}) / (n - 1).
double unit_sphere_volume(int n);

/// Metric data and curvature at a point, computed in plain arithmetic from second-order metric jets.
/// Conventions match curvature_at: gamma(k, i, j) = Gamma^k_ij, Ric_ik = g^{jl} R_ijkl.
struct PointCurvature {
  TensorD g;
  TensorD g_inv;
  TensorD gamma;
  TensorD riem;
  TensorD ric;
  double scal = 0.0;
  double volume_density = 0.0;  // sqrt(det g)
};
PointCurvature point_curvature(const MetricField& g, std::span<const double> p);

/// sum over nodes of weight * fn(node) * sqrt(det g), in a fixed lexicographic order.
double integrate(const QuadratureRule& rule, const MetricField& g,
                 const std::function<double(std::span<const double>)>& fn);
double integrate(const QuadratureRule& rule, const MetricField& g, const ScalarPotential& f);

/// Bound on the pointwise conformal residual |L_X g - (2 div X / n) g|, normalized.
inline constexpr double kConformalTolerance = 1e-8;

/// int Ric(grad f, X) for a conformal field X. Throws std::invalid_argument if X fails the
/// conformal check at some node.
struct KazdanWarnerReport {
  double integral = 0.0;
  double max_conformal_residual = 0.0;
};
KazdanWarnerReport kazdan_warner_residual(const QuadratureRule& rule, const MetricField& g, const ScalarPotential& f,
                                          const VectorFieldSpec& x);

/// lhs = int Ric(grad f, grad f), rhs = ((n-1)/n) int (lap f)^2. Throws std::invalid_argument
/// unless Hess f - (lap f / n) g vanishes at every node.
struct BochnerIntegralReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  double f_sq = 0.0;          // int f^2
  double grad_f_sq = 0.0;     // int |grad f|^2
  double max_conformal_residual = 0.0;
};
BochnerIntegralReport bochner_conformal_identity(const QuadratureRule& rule, const MetricField& g,
                                                 const ScalarPotential& f);

/// The two integration-by-parts identities for a conformal field X:
///   int Ric(X, X) = int |nabla X|^2 + ((n-2)/n) int (div X)^2
///   (1/2) int <div A^X, X> = -int |nabla X|^2 + (1/n) int (div X)^2
/// Throws std::invalid_argument if X fails the conformal check.
struct NongradientKwReport {
  double ric_xx = 0.0;
  double nabla_x_sq = 0.0;
  double div_x_sq = 0.0;
  double half_div_a_x = 0.0;
  double combined = 0.0;           // ric_xx + half_div_a_x
  double ricci_identity = 0.0;     // first identity, lhs - rhs
  double divergence_identity = 0.0;  // second identity, lhs - rhs
  double max_conformal_residual = 0.0;
};
NongradientKwReport nongradient_kw_residual(const QuadratureRule& rule, const MetricField& g, const VectorFieldSpec& x);

/// |W+|^2 - |W-|^2 at p; n = 4 only (std::invalid_argument otherwise).
double signature_integrand(const MetricField& g, std::span<const double> p);
/// Quadrature of the signature integrand; equals 48 pi^2 tau on a closed oriented 4-manifold.
double signature_quadrature(const QuadratureRule& rule, const MetricField& g);

nlohmann::json to_json(const QuadratureRule& rule);
nlohmann::json to_json(const KazdanWarnerReport& r);
nlohmann::json to_json(const BochnerIntegralReport& r);
nlohmann::json to_json(const NongradientKwReport& r);

}  // namespace curvlab
