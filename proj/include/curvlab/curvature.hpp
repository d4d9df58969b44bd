#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <optional>

#include "curvlab/geometry.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

/// Levi-Civita data from metric jets of order K: g and g^{-1} at order K, Gamma^k_ij at K - 1.
class Connection {
 public:
  explicit Connection(TensorJ g);

  int dim() const { return g_.dim(); }
  int order() const { return order_; }

  /// Metric, inverse metric and Christoffel symbols truncated to `order`.
  const TensorJ& metric(int order) const;
  const TensorJ& inverse_metric(int order) const;
  /// gamma(k, i, j) = Gamma^k_{ij}; available up to order K - 1.
  const TensorJ& christoffel(int order) const;

 private:
  int order_;
  TensorJ g_;
  std::vector<TensorJ> g_by_order_;
  std::vector<TensorJ> g_inv_by_order_;
  std::vector<TensorJ> gamma_by_order_;
};

/// nabla T with the derivative index appended last: (nabla T)_{a..., c} = nabla_c T_{a...}.
/// The result has jet order one less than T.
TensorJ covariant_derivative(const Connection& conn, const TensorJ& t);
/// Covariant derivative of a function: its differential, one order lower.
TensorJ differential(const Jet& f);

/// g^{ac} T_{a...,c} for a tensor already differentiated (first slot against the last).
TensorJ divergence_of(const Connection& conn, const TensorJ& nabla_t);

/// Riemann tensor R_{ijkl} (order K - 2); the unit sphere has R_{ijkl} = g_ik g_jl - g_il g_jk.
TensorJ riemann(const Connection& conn);
/// Ric_{ik} = g^{jl} R_{ijkl}.
TensorJ ricci(const Connection& conn, const TensorJ& riem);
Jet scalar_curvature(const Connection& conn, const TensorJ& ric);

/// T - (tr T / (2(n-1))) g for a symmetric 2-tensor with trace trT.
TensorJ schouten_like(const Connection& conn, const TensorJ& t, const Jet& trace_t);
/// Riem - (1/(n-2)) A o g with A = Ric - R/(2(n-1)) g.
TensorJ weyl_from(const Connection& conn, const TensorJ& riem, const TensorJ& ric, const Jet& scal);

/// Jet-valued tensors at one point; orders decrease by one per covariant derivative.
struct CurvatureJets {
  explicit CurvatureJets(Connection c) : conn(std::move(c)) {}

  Connection conn;
  TensorJ riem;
  TensorJ ric;
  Jet scal;
  TensorJ weyl;         // n >= 3
  TensorJ nabla_ric;    // depth >= 1
  TensorJ nabla_riem;   // depth >= 1
  TensorJ nabla_weyl;   // depth >= 1, n >= 3
  TensorJ cotton;       // depth >= 1, n >= 3
  TensorJ nabla_cotton; // depth >= 2, n >= 3
  TensorJ bach;         // depth >= 2, n >= 4
  TensorJ nabla_bach;   // depth >= 3, n >= 4
};

/// Curvature values at a point. Tensors that the depth or dimension does not allow stay empty.
struct CurvaturePack {
  Point point;
  int dim = 0;
  int depth = 0;
  TensorD g;
  TensorD g_inv;
  TensorD gamma;
  TensorD riem;
  TensorD ric;
  double scal = 0.0;
  TensorD grad_scal;
  TensorD weyl;
  TensorD nabla_ric;
  TensorD nabla_riem;
  TensorD div_riem;
  TensorD div_weyl;
  TensorD cotton;
  TensorD cotton_weyl;
  TensorD nabla_cotton;
  TensorD bach;
  TensorD div_bach;
  std::shared_ptr<const CurvatureJets> jets;
};

/// Metric jets of order depth + 2 suffice: 0 algebraic tensors, 1 first derivatives and
/// Cotton, 2 Bach, 3 the divergence of Bach.
CurvaturePack curvature_at(const MetricField& g, std::span<const double> p, int depth);
CurvaturePack curvature_from_jets(const TensorJ& g_jets, std::span<const double> p, int depth);

TensorD weyl(const CurvaturePack& pack);
TensorD cotton(const CurvaturePack& pack);
/// -((n-2)/(n-3)) g^{ta} W_{tijk,a}; agrees with cotton() for n >= 4.
TensorD cotton_via_weyl(const CurvaturePack& pack);
TensorD bach(const CurvaturePack& pack);
TensorD bach_divergence(const CurvaturePack& pack);
/// ((n-4)/(n-2)^2) R^{kt} C_{kti}, the value the Bach divergence must take.
TensorD bach_divergence_expected(const CurvaturePack& pack);

TensorD kulkarni_nomizu(const TensorD& a, const TensorD& b);

struct KnDivergenceCheck {
  TensorD direct;   // divergence of (alpha o g) on the first slot
  TensorD formula;  // alpha_{tj,t} g_ik - alpha_{tk,t} g_ij + alpha_ik,j - alpha_ij,k
  double residual = 0.0;
};
/// `alpha` must carry jets of order >= 1 in the connection's chart.
KnDivergenceCheck kn_divergence_check(const Connection& conn, const TensorJ& alpha);

/// T_{ij,k} - T_{ik,j}.
TensorD codazzi_residual(const Connection& conn, const TensorJ& t);

/// Self-dual / anti-self-dual Weyl blocks in an orthonormal frame (n = 4).
struct WeylSplit {
  Eigen::Matrix3d plus;
  Eigen::Matrix3d minus;
  Eigen::Vector3d plus_spectrum;   // ascending
  Eigen::Vector3d minus_spectrum;  // ascending
  double norm_plus_sq = 0.0;       // |W+|^2 as a (0,4) tensor norm
  double norm_minus_sq = 0.0;
  double signature_integrand() const { return norm_plus_sq - norm_minus_sq; }
};
WeylSplit weyl_pm(const CurvaturePack& pack);
WeylSplit weyl_pm(const TensorD& weyl, const TensorD& g);

/// Residual normalization used throughout: |raw| / (1 + largest ingredient norm).
double normalized(double raw, std::initializer_list<double> ingredients);

}  // namespace curvlab
