#include "curvlab/potential_tensors.hpp"

#include <cmath>
#include <stdexcept>

namespace curvlab {

namespace {

int jet_order(const TensorJ& t) { return t.at_flat(0).order(); }

void symmetrize(TensorJ& t) {
  const int n = t.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Jet avg = 0.5 * (t(i, j) + t(j, i));
      t(i, j) = avg;
      t(j, i) = avg;
    }
}

const CurvatureJets& jets_of(const CurvaturePack& pack) {
  if (!pack.jets) throw std::invalid_argument("curvature pack carries no jets");
  return *pack.jets;
}

TensorD raise(const TensorD& v, const TensorD& g_inv) { return raise_slot(v, g_inv, 0); }

/// v^t T_{t...}
TensorD contract_first(const TensorD& v_up, const TensorD& t) {
  const int n = t.dim();
  TensorD out(n, t.rank() - 1, 0.0);
  const std::size_t block = out.size();
  for (int a = 0; a < n; ++a)
    for (std::size_t k = 0; k < block; ++k) out.at_flat(k) += v_up(a) * t.at_flat(a * block + k);
  return out;
}

/// T + c (S o g)/(n-2) with S = h - tr/(2(n-1)) g, used for Riem_f and Riem_X.
TensorJ weighted_riemann(const Connection& conn, const TensorJ& riem, const TensorJ& h, const Jet& tr) {
  const int n = riem.dim();
  const TensorJ& g = conn.metric(jet_order(riem));
  const TensorJ s = h - scaled(g, tr * (1.0 / (2.0 * (n - 1))));
  return riem + kulkarni_nomizu(s, g) * (1.0 / (n - 2));
}

TensorJ einstein_like(const Connection& conn, const TensorJ& ric, const Jet& scal) {
  return ric - scaled(conn.metric(jet_order(ric)), scal * 0.5);
}

TensorD schouten_values(const TensorD& ric, double scal, const TensorD& g) {
  const int n = ric.dim();
  return ric - g * (scal / (2.0 * (n - 1)));
}

/// div(T o g) and div(T - tr T g) for a symmetric jet field T with trace tr.
void divergence_fields(const Connection& conn, const TensorJ& t, const Jet& tr, TensorD& div_kn, TensorD& div_minus) {
  const int m = jet_order(t);
  const TensorJ& g = conn.metric(m);
  const TensorJ e = einstein_like(conn, t, tr);
  div_kn = values(divergence_of(conn, covariant_derivative(conn, kulkarni_nomizu(e, g))));
  const TensorD div_t = values(divergence_of(conn, covariant_derivative(conn, t)));
  const TensorD d_tr = values(differential(tr));
  div_minus = div_t - d_tr;
}

}  // namespace

TensorD d_tensor_algebraic(const TensorD& ric, double scal, const TensorD& x_low, const TensorD& g,
                           const TensorD& g_inv) {
  const int n = ric.dim();
  if (n < 3) throw std::invalid_argument("D tensor needs dimension >= 3");
  const TensorD x_up = raise(x_low, g_inv);
  const TensorD x_ric = contract_first(x_up, ric);  // X_t R_tk
  const double c1 = 1.0 / (n - 2.0);
  const double c2 = 1.0 / ((n - 1.0) * (n - 2.0));
  TensorD d(n, 3, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        d(i, j, k) = c1 * (x_low(k) * ric(i, j) - x_low(j) * ric(i, k)) +
                     c2 * (x_ric(k) * g(i, j) - x_ric(j) * g(i, k)) -
                     scal * c2 * (x_low(k) * g(i, j) - x_low(j) * g(i, k));
  return d;
}

FPack f_pack(const CurvaturePack& pack, const ScalarPotential& f) {
  return f_pack(pack, f.eval(pack.point, pack.depth + 2));
}

FPack f_pack(const CurvaturePack& pack, const Jet& f_jet) {
  const CurvatureJets& cj = jets_of(pack);
  const Connection& conn = cj.conn;
  const int n = pack.dim;
  const int K = conn.order();
  if (f_jet.dims() != n) throw std::invalid_argument("potential jet has the wrong number of variables");
  if (f_jet.order() < K)
    throw std::invalid_argument("potential jet order " + std::to_string(f_jet.order()) + " below the required " +
                                std::to_string(K));
  const Jet fj = f_jet.truncated(K);

  const TensorJ df = differential(fj);
  TensorJ hess = covariant_derivative(conn, df);
  symmetrize(hess);
  const Jet lap = trace(hess, conn.inverse_metric(K - 2), 0, 1).at_flat(0);
  const TensorJ ric_f = cj.ric + hess;
  const Jet scal_f = cj.scal + lap;

  FPack out;
  out.dim = n;
  out.depth = pack.depth;
  out.f = fj.value();
  out.weight = std::exp(-out.f);
  out.df = values(df);
  out.grad_f = raise(out.df, pack.g_inv);
  out.hess = values(hess);
  out.lap = lap.value();
  out.ric_f = values(ric_f);
  out.scal_f = scal_f.value();
  out.schouten_f = schouten_values(out.ric_f, out.scal_f, pack.g);
  out.einstein_f = out.ric_f - pack.g * (0.5 * out.scal_f);

  TensorJ riem_f;
  if (n >= 3) {
    riem_f = weighted_riemann(conn, cj.riem, hess, lap);
    out.riem_f = values(riem_f);
    out.d_tensor = d_tensor_algebraic(pack.ric, pack.scal, out.df, pack.g, pack.g_inv);
  }
  if (pack.depth < 1) return out;

  out.third_derivative = values(covariant_derivative(conn, hess));
  out.nabla_ric_f = values(covariant_derivative(conn, ric_f));
  if (n >= 3) out.nabla_riem_f = values(covariant_derivative(conn, riem_f));
  out.grad_scal_f = values(differential(scal_f));

  out.div_riem_f = pack.div_riem - contract_first(out.grad_f, pack.riem);
  out.div_ric_f = trace(pack.nabla_ric, pack.g_inv, 0, 2) - contract_first(out.grad_f, pack.ric);
  out.div_weighted_riem = out.div_riem_f * out.weight;
  out.div_weighted_ric = out.div_ric_f * out.weight;
  divergence_fields(conn, ric_f, scal_f, out.div_einstein_kn, out.div_ric_minus_scal);
  return out;
}

XPack x_pack(const CurvaturePack& pack, const VectorFieldSpec& x) {
  const auto comps = x.eval(pack.point, pack.depth + 2);
  return x_pack(pack, comps);
}

XPack x_pack(const CurvaturePack& pack, std::span<const Jet> x_up) {
  const CurvatureJets& cj = jets_of(pack);
  const Connection& conn = cj.conn;
  const int n = pack.dim;
  const int K = conn.order();
  if (static_cast<int>(x_up.size()) != n) throw std::invalid_argument("vector field has the wrong component count");
  const TensorJ& g = conn.metric(K);
  TensorJ x_low(n, 1, Jet::constant(0.0, n, K));
  for (int i = 0; i < n; ++i) {
    if (x_up[i].dims() != n || x_up[i].order() < K)
      throw std::invalid_argument("vector field jets need order " + std::to_string(K) + " in every component");
    for (int j = 0; j < n; ++j) x_low(i) += g(i, j) * x_up[j].truncated(K);
  }

  const TensorJ nabla_x = covariant_derivative(conn, x_low);
  const TensorJ nabla2 = covariant_derivative(conn, nabla_x);
  TensorJ lie = nabla_x + permuted(nabla_x, {1, 0});
  symmetrize(lie);
  const TensorJ a_x = nabla_x - permuted(nabla_x, {1, 0});
  const Jet div_x = trace(nabla_x, conn.inverse_metric(K - 1), 0, 1).at_flat(0);
  // (nabla A)_{kj,i} = X_kji - X_jki
  const TensorJ nabla_a = nabla2 - permuted(nabla2, {1, 0, 2});
  const TensorJ half_lie = truncated(lie, K - 2) * 0.5;
  const Jet div_x2 = div_x.truncated(K - 2);
  const TensorJ ric_x = cj.ric + half_lie;
  const Jet scal_x = cj.scal + div_x2;

  XPack out;
  out.dim = n;
  out.depth = pack.depth;
  out.x_low = values(x_low);
  out.x_up = raise(out.x_low, pack.g_inv);
  out.nabla_x = values(nabla_x);
  out.nabla2_x = values(nabla2);
  out.lie = values(lie);
  out.a_x = values(a_x);
  out.div_x = div_x.value();
  out.div_a = values(trace(nabla_a, conn.inverse_metric(K - 2), 1, 2));
  out.ric_x = values(ric_x);
  out.scal_x = scal_x.value();
  out.schouten_x = schouten_values(out.ric_x, out.scal_x, pack.g);
  out.einstein_x = out.ric_x - pack.g * (0.5 * out.scal_x);

  TensorJ riem_x;
  if (n >= 3) {
    riem_x = weighted_riemann(conn, cj.riem, half_lie, div_x2);
    out.riem_x = values(riem_x);
    const TensorD base = d_tensor_algebraic(pack.ric, pack.scal, out.x_low, pack.g, pack.g_inv);
    const TensorD& x2 = out.nabla2_x;
    const TensorD tr_02 = trace(x2, pack.g_inv, 0, 2);  // X_tkt
    const TensorD tr_12 = trace(x2, pack.g_inv, 1, 2);  // X_ktt
    const TensorD na = values(nabla_a);
    const double c = 1.0 / (2.0 * (n - 1));
    out.d_tensor = base;
    out.d_tensor_a = base;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          out.d_tensor(i, j, k) += 0.5 * (x2(k, j, i) - x2(j, k, i)) +
                                   c * ((tr_02(k) - tr_12(k)) * pack.g(i, j) - (tr_02(j) - tr_12(j)) * pack.g(i, k));
          out.d_tensor_a(i, j, k) +=
              0.5 * na(k, j, i) - c * (out.div_a(k) * pack.g(i, j) - out.div_a(j) * pack.g(i, k));
        }
  }
  if (pack.depth < 1) return out;

  out.nabla_ric_x = values(covariant_derivative(conn, ric_x));
  if (n >= 3) out.nabla_riem_x = values(covariant_derivative(conn, riem_x));
  out.grad_scal_x = values(differential(scal_x));
  divergence_fields(conn, ric_x, scal_x, out.div_einstein_kn, out.div_ric_minus_scal);
  return out;
}

SolitonSample soliton_sample(const CurvaturePack& pack, const FPack& fpack) {
  if (pack.depth < 1) throw std::invalid_argument("soliton identities need depth >= 1");
  return {fpack, pack.ric, pack.riem, pack.grad_scal, pack.nabla_ric, pack.g_inv, pack.scal};
}

SolitonIdentityReport soliton_identities(std::span<const SolitonSample> samples) {
  if (samples.empty()) throw std::invalid_argument("soliton identities need at least one sample");
  SolitonIdentityReport rep;
  const double count = static_cast<double>(samples.size());
  std::vector<double> lambdas;
  for (const auto& s : samples) lambdas.push_back(s.fpack.scal_f / s.fpack.dim);
  auto mean_std = [count](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= count;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    sd = std::sqrt(acc / count);
  };
  mean_std(lambdas, rep.lambda, rep.lambda_stddev);
  rep.lambda_stddev /= 1.0 + std::abs(rep.lambda);

  std::vector<double> hamilton;
  for (const auto& s : samples) {
    const FPack& fp = s.fpack;
    const TensorD ric_grad = contract_first(fp.grad_f, s.ric);
    const TensorD gap = s.grad_scal - ric_grad * 2.0;
    rep.max_gradient_residual = std::max(
        rep.max_gradient_residual, normalized(norm(gap, s.g_inv), {norm(s.grad_scal, s.g_inv), 2.0 * norm(ric_grad, s.g_inv)}));
    const double grad_sq = norm_sq(fp.df, s.g_inv);
    hamilton.push_back(s.scal + grad_sq - 2.0 * rep.lambda * fp.f);
    const TensorD curl = s.nabla_ric - permuted(s.nabla_ric, {0, 2, 1});
    const TensorD f_riem = contract_first(fp.grad_f, s.riem);
    rep.max_codazzi_residual = std::max(rep.max_codazzi_residual,
                                        normalized(norm(curl + f_riem, s.g_inv), {norm(curl, s.g_inv), norm(f_riem, s.g_inv)}));
  }
  mean_std(hamilton, rep.hamilton_constant, rep.hamilton_stddev);
  rep.hamilton_stddev /= 1.0 + std::abs(rep.hamilton_constant);
  return rep;
}

BochnerCheck bochner_pointwise(const CurvaturePack& pack, const VectorFieldSpec& x) {
  const auto comps = x.eval(pack.point, pack.depth + 2);
  return bochner_pointwise(pack, comps);
}

BochnerCheck bochner_pointwise(const CurvaturePack& pack, std::span<const Jet> x_up) {
  const Connection& conn = jets_of(pack).conn;
  const int n = pack.dim;
  const int K = conn.order();
  const TensorJ& g = conn.metric(K);
  TensorJ x_low(n, 1, Jet::constant(0.0, n, K));
  Jet sq = Jet::constant(0.0, n, K);
  for (int i = 0; i < n; ++i) {
    const Jet xi = x_up[i].truncated(K);
    for (int j = 0; j < n; ++j) x_low(i) += g(i, j) * xi;
  }
  for (int i = 0; i < n; ++i) sq += x_low(i) * x_up[i].truncated(K);

  const TensorJ nabla_x = covariant_derivative(conn, x_low);
  const TensorD x2 = values(covariant_derivative(conn, nabla_x));
  const TensorD nx = values(nabla_x);
  const TensorD& gi = pack.g_inv;
  const TensorD xu = raise(values(x_low), gi);
  // div(L_X g)_i = X_ij,j + X_ji,j
  const TensorD div_lie = trace(x2, gi, 1, 2) + trace(x2, gi, 0, 2);
  const double lap_sq = trace(values(covariant_derivative(conn, differential(sq))), gi, 0, 1).at_flat(0);
  const Jet div_x = trace(nabla_x, conn.inverse_metric(K - 1), 0, 1).at_flat(0);
  const TensorD d_div = values(differential(div_x));
  double lhs = 0.0, ric_xx = 0.0, x_div = 0.0;
  for (int i = 0; i < n; ++i) {
    lhs += div_lie(i) * xu(i);
    x_div += d_div(i) * xu(i);
    for (int j = 0; j < n; ++j) ric_xx += pack.ric(i, j) * xu(i) * xu(j);
  }
  const double grad_sq = norm_sq(nx, gi);
  BochnerCheck out;
  out.lhs = lhs;
  out.rhs = 0.5 * lap_sq - grad_sq + ric_xx + x_div;
  out.residual = normalized(out.lhs - out.rhs, {lhs, 0.5 * lap_sq, grad_sq, ric_xx, x_div});
  return out;
}

}  // namespace curvlab
