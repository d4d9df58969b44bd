#pragma once

#include <span>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/geometry.hpp"

namespace curvlab {

/// Tensors weighted by a potential f at one point. Fields needing a covariant derivative of
/// curvature are empty at depth 0; fields with a 1/(n-2) factor are empty for n = 2.
struct FPack {
  int dim = 0;
  int depth = 0;
  double f = 0.0;
  double weight = 1.0;  // e^{-f}
  TensorD df;           // f_i
  TensorD grad_f;       // f^i
  TensorD hess;         // f_ij
  double lap = 0.0;
  TensorD ric_f;
  double scal_f = 0.0;  // R + lap f
  TensorD schouten_f;   // Ric_f - R_f/(2(n-1)) g
  TensorD riem_f;
  TensorD einstein_f;   // Ric_f - (R_f/2) g
  TensorD d_tensor;     // D^{grad f}
  TensorD nabla_ric_f;
  TensorD nabla_riem_f;
  TensorD grad_scal_f;
  TensorD div_riem_f;           // R_{tijk,t} - f_t R_{tijk}
  TensorD div_ric_f;            // R_{ti,t} - f_t R_{ti}
  TensorD div_weighted_riem;    // e^{-f} div_riem_f
  TensorD div_weighted_ric;     // e^{-f} div_ric_f
  TensorD div_einstein_kn;      // div(E_f o g)
  TensorD div_ric_minus_scal;   // div(Ric_f - R_f g)
  TensorD third_derivative;     // f_ijk
};

/// Nongradient counterpart for a vector field X (indices lowered with g).
struct XPack {
  int dim = 0;
  int depth = 0;
  TensorD x_up;          // X^i
  TensorD x_low;         // X_i
  TensorD nabla_x;       // X_ij = nabla_j X_i
  TensorD nabla2_x;      // X_ijk = nabla_k nabla_j X_i
  TensorD lie;           // (L_X g)_ij = X_ij + X_ji
  TensorD a_x;           // A^X_ij = X_ij - X_ji
  double div_x = 0.0;
  TensorD div_a;         // A^X_ij,j
  TensorD ric_x;         // Ric + L_X g / 2
  double scal_x = 0.0;   // R + div X
  TensorD schouten_x;
  TensorD riem_x;
  TensorD einstein_x;
  TensorD d_tensor;      // D^X with second derivatives of X
  TensorD d_tensor_a;    // D^X written through A^X
  TensorD nabla_ric_x;
  TensorD nabla_riem_x;
  TensorD grad_scal_x;
  TensorD div_einstein_kn;     // div(E_X o g)
  TensorD div_ric_minus_scal;  // div(Ric_X - R_X g)
};

/// `pack` must come from curvature_at at the same point. Derivative fields need depth >= 1.
FPack f_pack(const CurvaturePack& pack, const ScalarPotential& f);
/// `f_jet` must carry order depth + 2 in the chart variables.
FPack f_pack(const CurvaturePack& pack, const Jet& f_jet);

XPack x_pack(const CurvaturePack& pack, const VectorFieldSpec& x);
XPack x_pack(const CurvaturePack& pack, std::span<const Jet> x_up);

/// The algebraic part of D shared by the gradient and nongradient tensors.
TensorD d_tensor_algebraic(const TensorD& ric, double scal, const TensorD& x_low, const TensorD& g,
                           const TensorD& g_inv);

struct SolitonSample {
  FPack fpack;
  TensorD ric;
  TensorD riem;
  TensorD grad_scal;
  TensorD nabla_ric;
  TensorD g_inv;
  double scal = 0.0;
};

struct SolitonIdentityReport {
  double lambda = 0.0;
  double lambda_stddev = 0.0;       // (i) spread of R_f / n
  double max_gradient_residual = 0.0;  // (ii) |grad R - 2 Ric(grad f)|
  double hamilton_constant = 0.0;
  double hamilton_stddev = 0.0;     // (iii) spread of R + |grad f|^2 - 2 lambda f
  double max_codazzi_residual = 0.0;   // (iv) |R_ij,k - R_ik,j + f_t R_tijk|
};

SolitonSample soliton_sample(const CurvaturePack& pack, const FPack& fpack);
SolitonIdentityReport soliton_identities(std::span<const SolitonSample> samples);

struct BochnerCheck {
  double lhs = 0.0;  // div(L_X g)(X)
  double rhs = 0.0;  // lap|X|^2 / 2 - |nabla X|^2 + Ric(X, X) + nabla_X div X
  double residual = 0.0;  // normalized
};
BochnerCheck bochner_pointwise(const CurvaturePack& pack, const VectorFieldSpec& x);
BochnerCheck bochner_pointwise(const CurvaturePack& pack, std::span<const Jet> x_up);

}  // namespace curvlab
