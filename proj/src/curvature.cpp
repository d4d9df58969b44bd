#include "curvlab/curvature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <stdexcept>

namespace curvlab {

namespace {

int jet_order(const TensorJ& t) { return t.at_flat(0).order(); }

std::size_t slot_stride(int n, int rank, int slot) {
  std::size_t s = 1;
  for (int r = rank - 1; r > slot; --r) s *= static_cast<std::size_t>(n);
  return s;
}

}  // namespace

Connection::Connection(TensorJ g) : order_(g.at_flat(0).order()), g_(std::move(g)) {
  const int n = g_.dim();
  TensorJ g_inv = inverse(g_);
  // Gauss-Jordan leaves rounding-level asymmetry; the exact inverse is symmetric.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Jet avg = 0.5 * (g_inv(i, j) + g_inv(j, i));
      g_inv(i, j) = avg;
      g_inv(j, i) = avg;
    }
  g_by_order_.resize(order_ + 1);
  g_inv_by_order_.resize(order_ + 1);
  for (int m = 0; m <= order_; ++m) {
    g_by_order_[m] = truncated(g_, m);
    g_inv_by_order_[m] = truncated(g_inv, m);
  }
  if (order_ < 1) return;

  const int m = order_ - 1;
  // dg(l, i, j) = d_l g_ij
  TensorJ dg(n, 3, Jet::constant(0.0, n, m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) dg(l, i, j) = g_(i, j).derivative(l);
  const TensorJ& gi = g_inv_by_order_[m];
  TensorJ gamma(n, 3, Jet::constant(0.0, n, m));
  TensorJ lowered(n, 3, Jet::constant(0.0, n, m));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        lowered(l, i, j) = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
        lowered(l, j, i) = lowered(l, i, j);
      }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet acc = gi(k, 0) * lowered(0, i, j);
        for (int l = 1; l < n; ++l) acc += gi(k, l) * lowered(l, i, j);
        gamma(k, i, j) = acc;
        gamma(k, j, i) = acc;
      }
  gamma_by_order_.resize(order_);
  for (int q = 0; q < order_; ++q) gamma_by_order_[q] = truncated(gamma, q);
}

const TensorJ& Connection::metric(int order) const {
  if (order < 0 || order > order_) throw std::out_of_range("metric jets not available at order " + std::to_string(order));
  return g_by_order_[order];
}

const TensorJ& Connection::inverse_metric(int order) const {
  if (order < 0 || order > order_)
    throw std::out_of_range("inverse metric jets not available at order " + std::to_string(order));
  return g_inv_by_order_[order];
}

const TensorJ& Connection::christoffel(int order) const {
  if (order < 0 || order >= order_)
    throw std::out_of_range("Christoffel jets not available at order " + std::to_string(order) +
                            "; raise the metric jet order");
  return gamma_by_order_[order];
}

TensorJ covariant_derivative(const Connection& conn, const TensorJ& t) {
  const int m = jet_order(t);
  if (m < 1) throw std::invalid_argument("covariant derivative needs jets of order >= 1; increase the depth");
  const int n = t.dim();
  const int r = t.rank();
  const TensorJ& gam = conn.christoffel(m - 1);
  const TensorJ lower = truncated(t, m - 1);
  TensorJ out(n, r + 1, Jet::constant(0.0, n, m - 1));
  std::vector<std::size_t> strides(r);
  for (int s = 0; s < r; ++s) strides[s] = slot_stride(n, r, s);
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (int c = 0; c < n; ++c) {
      Jet val = t.at_flat(k).derivative(c);
      for (int s = 0; s < r; ++s) {
        const int is = static_cast<int>((k / strides[s]) % n);
        const std::size_t base = k - static_cast<std::size_t>(is) * strides[s];
        for (int a = 0; a < n; ++a) val -= gam(a, c, is) * lower.at_flat(base + a * strides[s]);
      }
      out.at_flat(k * n + c) = std::move(val);
    }
  }
  return out;
}

TensorJ differential(const Jet& f) {
  const int n = f.dims();
  TensorJ out(n, 1, Jet::constant(0.0, n, f.order() - 1));
  for (int i = 0; i < n; ++i) out(i) = f.derivative(i);
  return out;
}

TensorJ divergence_of(const Connection& conn, const TensorJ& nabla_t) {
  return trace(nabla_t, conn.inverse_metric(jet_order(nabla_t)), 0, nabla_t.rank() - 1);
}

TensorJ riemann(const Connection& conn) {
  const int K = conn.order();
  if (K < 2) throw std::invalid_argument("Riemann tensor needs metric jets of order >= 2");
  const int n = conn.dim();
  const int m = K - 2;
  const TensorJ& gam_full = conn.christoffel(K - 1);
  const TensorJ& gam = conn.christoffel(m);
  const TensorJ& g = conn.metric(m);
  // dgam(rho, nu, sigma, mu) = d_mu Gamma^rho_{nu sigma}
  TensorJ dgam(n, 4, Jet::constant(0.0, n, m));
  for (std::size_t k = 0; k < gam_full.size(); ++k)
    for (int mu = 0; mu < n; ++mu) dgam.at_flat(k * n + mu) = gam_full.at_flat(k).derivative(mu);

  // up(rho, sigma, mu, nu) = R^rho_{sigma mu nu}
  TensorJ up(n, 4, Jet::constant(0.0, n, m));
  for (int rho = 0; rho < n; ++rho)
    for (int sigma = 0; sigma < n; ++sigma)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = mu + 1; nu < n; ++nu) {
          Jet v = dgam(rho, nu, sigma, mu) - dgam(rho, mu, sigma, nu);
          for (int l = 0; l < n; ++l) v += gam(rho, mu, l) * gam(l, nu, sigma) - gam(rho, nu, l) * gam(l, mu, sigma);
          up(rho, sigma, nu, mu) = -v;
          up(rho, sigma, mu, nu) = std::move(v);
        }
  TensorJ riem(n, 4, Jet::constant(0.0, n, m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          Jet v = g(i, 0) * up(0, j, k, l);
          for (int a = 1; a < n; ++a) v += g(i, a) * up(a, j, k, l);
          riem(i, j, l, k) = -v;
          riem(i, j, k, l) = std::move(v);
        }
  return riem;
}

TensorJ ricci(const Connection& conn, const TensorJ& riem) {
  TensorJ ric = trace(riem, conn.inverse_metric(jet_order(riem)), 1, 3);
  const int n = ric.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Jet avg = 0.5 * (ric(i, j) + ric(j, i));
      ric(i, j) = avg;
      ric(j, i) = avg;
    }
  return ric;
}

Jet scalar_curvature(const Connection& conn, const TensorJ& ric) {
  return trace(ric, conn.inverse_metric(jet_order(ric)), 0, 1).at_flat(0);
}

TensorJ schouten_like(const Connection& conn, const TensorJ& t, const Jet& trace_t) {
  const int n = t.dim();
  return t - scaled(conn.metric(jet_order(t)), trace_t * (1.0 / (2.0 * (n - 1))));
}

TensorJ weyl_from(const Connection& conn, const TensorJ& riem, const TensorJ& ric, const Jet& scal) {
  const int n = riem.dim();
  if (n < 3) throw std::invalid_argument("Weyl tensor needs dimension >= 3");
  const TensorJ a = schouten_like(conn, ric, scal);
  return riem - kulkarni_nomizu(a, conn.metric(jet_order(ric))) * (1.0 / (n - 2));
}

namespace {

TensorJ cotton_jets(const Connection& conn, const TensorJ& nabla_ric, const Jet& scal) {
  const int n = nabla_ric.dim();
  const int m = jet_order(nabla_ric);
  const TensorJ dr = differential(scal.truncated(m + 1));
  const TensorJ& g = conn.metric(m);
  const double c = 1.0 / (2.0 * (n - 1));
  TensorJ out(n, 3, Jet::constant(0.0, n, m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out(i, j, k) = nabla_ric(i, j, k) - nabla_ric(i, k, j) - c * (dr(k) * g(i, j) - dr(j) * g(i, k));
  return out;
}

TensorJ bach_jets(const Connection& conn, const TensorJ& nabla_cotton, const TensorJ& ric, const TensorJ& weyl) {
  const int n = nabla_cotton.dim();
  const int m = jet_order(nabla_cotton);
  const TensorJ& gi = conn.inverse_metric(m);
  // div_c(j, i) = g^{km} C_{jik,m}
  const TensorJ div_c = trace(nabla_cotton, gi, 2, 3);
  const TensorJ ric_up = raise_slot(raise_slot(truncated(ric, m), gi, 0), gi, 1);
  const TensorJ w = truncated(weyl, m);
  TensorJ out(n, 2, Jet::constant(0.0, n, m));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet acc = div_c(j, i);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) acc += ric_up(k, l) * w(i, k, j, l);
      acc *= 1.0 / (n - 2);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  return out;
}

}  // namespace

CurvaturePack curvature_from_jets(const TensorJ& g_jets, std::span<const double> p, int depth) {
  if (depth < 0 || depth > 3) throw std::invalid_argument("curvature depth must lie in 0..3");
  const int K = jet_order(g_jets);
  if (K < depth + 2)
    throw std::invalid_argument("metric jet order " + std::to_string(K) + " is insufficient for depth " +
                                std::to_string(depth));
  require_positive_definite(values(g_jets), "curvature_at");
  const int n = g_jets.dim();

  auto jets = std::make_shared<CurvatureJets>(Connection(truncated(g_jets, depth + 2)));
  const Connection& conn = jets->conn;
  jets->riem = riemann(conn);
  jets->ric = ricci(conn, jets->riem);
  jets->scal = scalar_curvature(conn, jets->ric);
  if (n >= 3) jets->weyl = weyl_from(conn, jets->riem, jets->ric, jets->scal);
  if (depth >= 1) {
    jets->nabla_ric = covariant_derivative(conn, jets->ric);
    jets->nabla_riem = covariant_derivative(conn, jets->riem);
    if (n >= 3) {
      jets->nabla_weyl = covariant_derivative(conn, jets->weyl);
      jets->cotton = cotton_jets(conn, jets->nabla_ric, jets->scal);
    }
  }
  if (depth >= 2 && n >= 3) jets->nabla_cotton = covariant_derivative(conn, jets->cotton);
  if (depth >= 2 && n >= 4) jets->bach = bach_jets(conn, jets->nabla_cotton, jets->ric, jets->weyl);
  if (depth >= 3 && n >= 4) jets->nabla_bach = covariant_derivative(conn, jets->bach);

  CurvaturePack pack;
  pack.point.assign(p.begin(), p.end());
  pack.dim = n;
  pack.depth = depth;
  pack.g = values(conn.metric(0));
  pack.g_inv = values(conn.inverse_metric(0));
  pack.gamma = values(conn.christoffel(0));
  pack.riem = values(jets->riem);
  pack.ric = values(jets->ric);
  pack.scal = jets->scal.value();
  if (n >= 3) pack.weyl = values(jets->weyl);
  if (depth >= 1) {
    pack.grad_scal = values(differential(jets->scal));
    pack.nabla_ric = values(jets->nabla_ric);
    pack.nabla_riem = values(jets->nabla_riem);
    pack.div_riem = values(divergence_of(conn, jets->nabla_riem));
    if (n >= 3) {
      pack.div_weyl = values(divergence_of(conn, jets->nabla_weyl));
      pack.cotton = values(jets->cotton);
    }
    if (n >= 4) pack.cotton_weyl = pack.div_weyl * (-(n - 2.0) / (n - 3.0));
  }
  if (!jets->nabla_cotton.empty()) pack.nabla_cotton = values(jets->nabla_cotton);
  if (!jets->bach.empty()) pack.bach = values(jets->bach);
  if (!jets->nabla_bach.empty()) pack.div_bach = values(trace(jets->nabla_bach, conn.inverse_metric(0), 1, 2));
  pack.jets = std::move(jets);
  return pack;
}

CurvaturePack curvature_at(const MetricField& g, std::span<const double> p, int depth) {
  if (depth < 0 || depth > 3) throw std::invalid_argument("curvature depth must lie in 0..3");
  return curvature_from_jets(g.eval(p, depth + 2), p, depth);
}

namespace {

const TensorD& require(const TensorD& t, const char* what) {
  if (t.empty()) throw std::invalid_argument(std::string(what) + " unavailable at this depth or dimension");
  return t;
}

}  // namespace

TensorD weyl(const CurvaturePack& pack) {
  if (pack.dim < 3) throw std::invalid_argument("Weyl tensor needs dimension >= 3");
  return pack.weyl;
}

TensorD cotton(const CurvaturePack& pack) { return require(pack.cotton, "Cotton tensor (depth >= 1, n >= 3)"); }

TensorD cotton_via_weyl(const CurvaturePack& pack) {
  if (pack.dim < 4) throw std::invalid_argument("Cotton tensor via Weyl needs dimension >= 4");
  return require(pack.cotton_weyl, "Cotton tensor via Weyl (depth >= 1)");
}

TensorD bach(const CurvaturePack& pack) {
  if (pack.dim < 4) throw std::invalid_argument("Bach tensor needs dimension >= 4");
  return require(pack.bach, "Bach tensor (depth >= 2)");
}

TensorD bach_divergence(const CurvaturePack& pack) {
  if (pack.dim < 4) throw std::invalid_argument("Bach divergence needs dimension >= 4");
  return require(pack.div_bach, "Bach divergence (depth >= 3)");
}

TensorD bach_divergence_expected(const CurvaturePack& pack) {
  const int n = pack.dim;
  const TensorD& c = cotton(pack);
  const TensorD ric_up = raise_slot(raise_slot(pack.ric, pack.g_inv, 0), pack.g_inv, 1);
  const double factor = (n - 4.0) / ((n - 2.0) * (n - 2.0));
  TensorD out(n, 1, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k)
      for (int t = 0; t < n; ++t) acc += ric_up(k, t) * c(k, t, i);
    out(i) = factor * acc;
  }
  return out;
}

TensorD kulkarni_nomizu(const TensorD& a, const TensorD& b) { return kulkarni_nomizu<double>(a, b); }

KnDivergenceCheck kn_divergence_check(const Connection& conn, const TensorJ& alpha) {
  const int m = jet_order(alpha);
  if (m < 1) throw std::invalid_argument("divergence check needs a differentiable field");
  const int n = alpha.dim();
  const TensorJ kn = kulkarni_nomizu(alpha, conn.metric(m));
  KnDivergenceCheck out;
  out.direct = values(divergence_of(conn, covariant_derivative(conn, kn)));
  const TensorJ nabla_alpha = covariant_derivative(conn, alpha);
  const TensorD na = values(nabla_alpha);
  const TensorD div_alpha = values(divergence_of(conn, nabla_alpha));
  const TensorD g = values(conn.metric(0));
  out.formula = TensorD(n, 3, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.formula(i, j, k) = div_alpha(j) * g(i, k) - div_alpha(k) * g(i, j) + na(i, k, j) - na(i, j, k);
  const TensorD g_inv = values(conn.inverse_metric(0));
  out.residual = normalized(norm(out.direct - out.formula, g_inv), {norm(out.direct, g_inv), norm(na, g_inv)});
  return out;
}

TensorD codazzi_residual(const Connection& conn, const TensorJ& t) {
  const TensorD nt = values(covariant_derivative(conn, t));
  return nt - permuted(nt, {0, 2, 1});
}

WeylSplit weyl_pm(const TensorD& w, const TensorD& g) {
  if (w.dim() != 4 || g.dim() != 4) throw std::invalid_argument("self-dual splitting needs dimension 4");
  const Eigen::Matrix4d gm = to_matrix(g);
  const Eigen::LLT<Eigen::Matrix4d> llt(gm);
  if (llt.info() != Eigen::Success) throw std::domain_error("metric is not positive definite");
  // Columns of E are a g-orthonormal frame: E^T g E = I.
  const Eigen::Matrix4d e = llt.matrixL().transpose().solve(Eigen::Matrix4d::Identity());

  TensorD wf(4, 4, 0.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double acc = 0.0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
              const double eij = e(i, a) * e(j, b);
              if (eij == 0.0) continue;
              for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) acc += w(i, j, k, l) * eij * e(k, c) * e(l, d);
            }
          wf(a, b, c, d) = acc;
        }

  // Basis of 2-forms e01, e02, e03, e23, e31, e12; the Hodge star swaps the two halves.
  static constexpr std::array<std::array<int, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {2, 3}, {3, 1}, {1, 2}}};
  Eigen::Matrix<double, 6, 6> op;
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) op(p, q) = wf(pairs[p][0], pairs[p][1], pairs[q][0], pairs[q][1]);
  Eigen::Matrix<double, 6, 3> up, um;
  up << Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity();
  um << Eigen::Matrix3d::Identity(), -Eigen::Matrix3d::Identity();
  up /= std::sqrt(2.0);
  um /= std::sqrt(2.0);

  WeylSplit out;
  out.plus = up.transpose() * op * up;
  out.minus = um.transpose() * op * um;
  out.plus = 0.5 * (out.plus + out.plus.transpose()).eval();
  out.minus = 0.5 * (out.minus + out.minus.transpose()).eval();
  out.plus_spectrum = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(out.plus, Eigen::EigenvaluesOnly).eigenvalues();
  out.minus_spectrum = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(out.minus, Eigen::EigenvaluesOnly).eigenvalues();
  out.norm_plus_sq = 4.0 * out.plus.squaredNorm();
  out.norm_minus_sq = 4.0 * out.minus.squaredNorm();
  return out;
}

WeylSplit weyl_pm(const CurvaturePack& pack) {
  if (pack.dim != 4) throw std::invalid_argument("self-dual splitting needs dimension 4");
  return weyl_pm(pack.weyl, pack.g);
}

double normalized(double raw, std::initializer_list<double> ingredients) {
  double largest = 0.0;
  for (double v : ingredients) largest = std::max(largest, std::abs(v));
  return std::abs(raw) / (1.0 + largest);
}

}  // namespace curvlab
