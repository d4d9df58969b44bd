#include "curvlab/integrals.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "curvlab/curvature.hpp"

namespace curvlab {

namespace {

constexpr double kPi = std::numbers::pi;

double partial2(const Jet& j, int a, int b, std::vector<int>& alpha) {
  std::fill(alpha.begin(), alpha.end(), 0);
  ++alpha[a];
  ++alpha[b];
  return j.partial(alpha);
}

/// Christoffel symbols and their first derivatives from second-order metric jets.
struct ConnectionData {
  int n = 0;
  TensorD g, g_inv, gamma, dgamma;  // dgamma(k, i, j, a) = d_a Gamma^k_ij
  double det = 0.0;
};

ConnectionData connection_data(const TensorJ& gj) {
  ConnectionData c;
  const int n = c.n = gj.dim();
  c.g = values(gj);
  const Eigen::MatrixXd gm = to_matrix(c.g);
  c.g_inv = from_matrix(gm.inverse());
  c.det = gm.determinant();
  TensorD dg(n, 3, 0.0);   // d_a g_ij at (i, j, a)
  TensorD ddg(n, 4, 0.0);  // d_a d_b g_ij at (i, j, a, b)
  std::vector<int> alpha(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a) {
        dg(i, j, a) = gj(i, j).gradient(a);
        for (int b = a; b < n; ++b) ddg(i, j, a, b) = ddg(i, j, b, a) = partial2(gj(i, j), a, b, alpha);
      }
  // Gamma_lij = (1/2)(d_i g_lj + d_j g_li - d_l g_ij), lowered index first.
  TensorD low(n, 3, 0.0), dlow(n, 4, 0.0);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        low(l, i, j) = 0.5 * (dg(l, j, i) + dg(l, i, j) - dg(i, j, l));
        for (int a = 0; a < n; ++a)
          dlow(l, i, j, a) = 0.5 * (ddg(l, j, i, a) + ddg(l, i, j, a) - ddg(i, j, l, a));
      }
  // d_a g^{kl} = -g^{km} d_a g_mp g^{pl}.
  TensorD dginv(n, 3, 0.0);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int a = 0; a < n; ++a) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m)
          for (int p = 0; p < n; ++p) acc -= c.g_inv(k, m) * dg(m, p, a) * c.g_inv(p, l);
        dginv(k, l, a) = acc;
      }
  c.gamma = TensorD(n, 3, 0.0);
  c.dgamma = TensorD(n, 4, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int l = 0; l < n; ++l) v += c.g_inv(k, l) * low(l, i, j);
        c.gamma(k, i, j) = v;
        for (int a = 0; a < n; ++a) {
          double d = 0.0;
          for (int l = 0; l < n; ++l) d += dginv(k, l, a) * low(l, i, j) + c.g_inv(k, l) * dlow(l, i, j, a);
          c.dgamma(k, i, j, a) = d;
        }
      }
  return c;
}

PointCurvature curvature_from(const ConnectionData& c) {
  const int n = c.n;
  PointCurvature out;
  out.g = c.g;
  out.g_inv = c.g_inv;
  out.gamma = c.gamma;
  out.volume_density = std::sqrt(c.det);
  // R^r_{s m v} = d_m Gamma^r_vs - d_v Gamma^r_ms + Gamma^r_ml Gamma^l_vs - Gamma^r_vl Gamma^l_ms.
  TensorD up(n, 4, 0.0);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) {
          double acc = c.dgamma(r, v, s, m) - c.dgamma(r, m, s, v);
          for (int l = 0; l < n; ++l) acc += c.gamma(r, m, l) * c.gamma(l, v, s) - c.gamma(r, v, l) * c.gamma(l, m, s);
          up(r, s, m, v) = acc;
        }
  out.riem = TensorD(n, 4, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double acc = 0.0;
          for (int a = 0; a < n; ++a) acc += c.g(i, a) * up(a, j, k, l);
          out.riem(i, j, k, l) = acc;
        }
  out.ric = trace(out.riem, out.g_inv, 1, 3);
  out.scal = trace(out.ric, out.g_inv, 0, 1).at_flat(0);
  return out;
}

/// Contravariant pairing T(u, v) for a 2-tensor.
double pair(const TensorD& t, std::span<const double> u, std::span<const double> v) {
  double acc = 0.0;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) acc += t(i, j) * u[i] * v[j];
  return acc;
}

/// Covariant data of a vector field at a point: lowered components, nabla_j X_i, div X, div A^X.
struct FieldData {
  std::vector<double> up;
  std::vector<double> low;
  TensorD nabla;  // (i, j) = nabla_j X_i
  double div = 0.0;
  std::vector<double> div_a;  // empty unless requested
};

FieldData field_data(const ConnectionData& c, const TensorJ& gj, std::span<const Jet> x_up, bool with_div_a) {
  const int n = c.n;
  FieldData d;
  std::vector<Jet> xl(n);
  for (int i = 0; i < n; ++i) {
    Jet acc = gj(i, 0) * x_up[0];
    for (int l = 1; l < n; ++l) acc += gj(i, l) * x_up[l];
    xl[i] = acc;
  }
  for (int i = 0; i < n; ++i) {
    d.up.push_back(x_up[i].value());
    d.low.push_back(xl[i].value());
  }
  d.nabla = TensorD(n, 2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = xl[i].gradient(j);
      for (int k = 0; k < n; ++k) v -= c.gamma(k, i, j) * d.low[k];
      d.nabla(i, j) = v;
    }
  d.div = trace(d.nabla, c.g_inv, 0, 1).at_flat(0);
  if (!with_div_a) return d;
  // A_ij = d_j X_i - d_i X_j; the Christoffel terms cancel.
  std::vector<int> alpha(n);
  TensorD a(n, 2, 0.0), da(n, 3, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = xl[i].gradient(j) - xl[j].gradient(i);
      for (int k = 0; k < n; ++k) da(i, j, k) = partial2(xl[i], j, k, alpha) - partial2(xl[j], i, k, alpha);
    }
  d.div_a.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double nabla_a = da(i, j, k);
        for (int m = 0; m < n; ++m) nabla_a -= c.gamma(m, k, i) * a(m, j) + c.gamma(m, k, j) * a(i, m);
        d.div_a[i] += c.g_inv(j, k) * nabla_a;
      }
  return d;
}

double conformal_residual(const FieldData& x, const ConnectionData& c) {
  const int n = c.n;
  TensorD lie = x.nabla + permuted(x.nabla, {1, 0});
  const TensorD target = c.g * (2.0 * x.div / n);
  return normalized(norm(lie - target, c.g_inv), {norm(lie, c.g_inv), std::abs(x.div)});
}

double norm_sq_vec(const TensorD& g_inv, std::span<const double> low) {
  double acc = 0.0;
  for (std::size_t i = 0; i < low.size(); ++i)
    for (std::size_t j = 0; j < low.size(); ++j) acc += g_inv(i, j) * low[i] * low[j];
  return acc;
}

std::vector<double> raised(const TensorD& g_inv, std::span<const double> low) {
  std::vector<double> up(low.size(), 0.0);
  for (std::size_t i = 0; i < low.size(); ++i)
    for (std::size_t j = 0; j < low.size(); ++j) up[i] += g_inv(i, j) * low[j];
  return up;
}

/// Calls visit(point, weight) at every node, first axis outermost.
template <typename Visit>
void for_each_node(const QuadratureRule& rule, Visit&& visit) {
  if (rule.dim <= 0 || static_cast<int>(rule.axes.size()) != rule.dim)
    throw std::invalid_argument("quadrature rule has inconsistent axes");
  for (const auto& axis : rule.axes)
    if (axis.nodes.empty()) return;
  const int d = rule.dim;
  std::vector<std::size_t> idx(d, 0);
  Point p(d);
  while (true) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      p[a] = rule.axes[a].nodes[idx[a]];
      w *= rule.axes[a].weights[idx[a]];
    }
    visit(std::span<const double>(p), w);
    int a = d - 1;
    while (a >= 0 && ++idx[a] == rule.axes[a].nodes.size()) idx[a--] = 0;
    if (a < 0) return;
  }
}

void require_dims(const QuadratureRule& rule, const MetricField& g) {
  if (rule.dim != g.dim()) throw std::invalid_argument("quadrature rule and metric have different dimensions");
}

std::string conformal_failure(const char* what, double residual, std::span<const double> p) {
  std::ostringstream os;
  os << what << " fails the conformal check: residual " << residual << " at (";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace

std::size_t QuadratureRule::total_nodes() const {
  if (axes.empty()) return 0;
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.nodes.size();
  return total;
}

int QuadratureRule::exactness() const {
  if (axes.empty()) return 0;
  std::size_t m = axes.front().nodes.size();
  for (const auto& a : axes) m = std::min(m, a.nodes.size());
  return 2 * static_cast<int>(m) - 1;
}

QuadratureAxis gauss_legendre(int nodes, double lo, double hi) {
  if (nodes < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  if (!(hi > lo)) throw std::invalid_argument("Gauss-Legendre interval is empty");
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(nodes);
  // Boost returns the nonnegative zeros; mirror them.
  std::vector<double> x;
  for (double z : zeros) {
    if (z > 0.0) x.push_back(-z);
    x.push_back(z);
  }
  std::sort(x.begin(), x.end());
  QuadratureAxis axis{lo, hi, {}, {}};
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (double z : x) {
    const double dp = boost::math::legendre_p_prime(nodes, z);
    axis.nodes.push_back(mid + half * z);
    axis.weights.push_back(half * 2.0 / ((1.0 - z * z) * dp * dp));
  }
  return axis;
}

QuadratureRule sphere_rule(int n, int nodes, double cap) { return sphere_rule(n, std::vector<int>(n, nodes), cap); }

QuadratureRule sphere_rule(int n, const std::vector<int>& nodes, double cap) {
  if (n < 2) throw std::invalid_argument("sphere rule needs n >= 2");
  if (nodes.size() != 1 && static_cast<int>(nodes.size()) != n)
    throw std::invalid_argument("sphere rule needs one node count or one per axis");
  if (!(cap >= 0.0 && cap < 0.5)) throw std::invalid_argument("polar cap must lie in [0, 0.5)");
  QuadratureRule rule;
  rule.dim = n;
  for (int a = 0; a < n; ++a) {
    const int m = nodes.size() == 1 ? nodes[0] : nodes[a];
    rule.axes.push_back(a + 1 < n ? gauss_legendre(m, cap, kPi - cap) : gauss_legendre(m, 0.0, 2.0 * kPi));
  }
  return rule;
}

QuadratureRule product_rule(const QuadratureRule& first, const QuadratureRule& second) {
  QuadratureRule rule;
  rule.dim = first.dim + second.dim;
  rule.axes = first.axes;
  rule.axes.insert(rule.axes.end(), second.axes.begin(), second.axes.end());
  return rule;
}

QuadratureRule doubled(const QuadratureRule& rule) {
  QuadratureRule out;
  out.dim = rule.dim;
  for (const auto& a : rule.axes)
    out.axes.push_back(gauss_legendre(2 * static_cast<int>(a.nodes.size()), a.lo, a.hi));
  return out;
}

double unit_sphere_volume(int n) {
  if (n < 0) throw std::invalid_argument("sphere dimension must be nonnegative");
  if (n == 0) return 2.0;
  if (n == 1) return 2.0 * kPi;
  return 2.0 * kPi * unit_sphere_volume(n - 2) / (n - 1);
}

PointCurvature point_curvature(const MetricField& g, std::span<const double> p) {
  return curvature_from(connection_data(g.eval(p, 2)));
}

double integrate(const QuadratureRule& rule, const MetricField& g,
                 const std::function<double(std::span<const double>)>& fn) {
  require_dims(rule, g);
  double total = 0.0;
  for_each_node(rule, [&](std::span<const double> p, double w) {
    const double det = to_matrix(g.value(p)).determinant();
    total += w * fn(p) * std::sqrt(det);
  });
  return total;
}

double integrate(const QuadratureRule& rule, const MetricField& g, const ScalarPotential& f) {
  return integrate(rule, g, [&](std::span<const double> p) { return f.eval(p, 0).value(); });
}

KazdanWarnerReport kazdan_warner_residual(const QuadratureRule& rule, const MetricField& g, const ScalarPotential& f,
                                          const VectorFieldSpec& x) {
  require_dims(rule, g);
  KazdanWarnerReport r;
  for_each_node(rule, [&](std::span<const double> p, double w) {
    const TensorJ gj = g.eval(p, 2);
    const ConnectionData c = connection_data(gj);
    const FieldData xd = field_data(c, truncated(gj, 1), x.eval(p, 1), false);
    const double res = conformal_residual(xd, c);
    r.max_conformal_residual = std::max(r.max_conformal_residual, res);
    if (!(res <= kConformalTolerance)) throw std::invalid_argument(conformal_failure("X", res, p));
    const Jet fj = f.eval(p, 1);
    std::vector<double> df(c.n);
    for (int i = 0; i < c.n; ++i) df[i] = fj.gradient(i);
    const PointCurvature pc = curvature_from(c);
    r.integral += w * pair(pc.ric, raised(c.g_inv, df), xd.up) * pc.volume_density;
  });
  return r;
}

BochnerIntegralReport bochner_conformal_identity(const QuadratureRule& rule, const MetricField& g,
                                                 const ScalarPotential& f) {
  require_dims(rule, g);
  BochnerIntegralReport r;
  double lap_sq = 0.0;
  int n = g.dim();
  for_each_node(rule, [&](std::span<const double> p, double w) {
    const ConnectionData c = connection_data(g.eval(p, 2));
    const Jet fj = f.eval(p, 2);
    std::vector<double> df(n);
    for (int i = 0; i < n; ++i) df[i] = fj.gradient(i);
    std::vector<int> alpha(n);
    TensorD hess(n, 2, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = partial2(fj, i, j, alpha);
        for (int k = 0; k < n; ++k) v -= c.gamma(k, i, j) * df[k];
        hess(i, j) = v;
      }
    const double lap = trace(hess, c.g_inv, 0, 1).at_flat(0);
    const double res = normalized(norm(hess - c.g * (lap / n), c.g_inv), {norm(hess, c.g_inv)});
    r.max_conformal_residual = std::max(r.max_conformal_residual, res);
    if (!(res <= kConformalTolerance)) throw std::invalid_argument(conformal_failure("grad f", res, p));
    const PointCurvature pc = curvature_from(c);
    const std::vector<double> grad = raised(c.g_inv, df);
    const double dv = w * pc.volume_density;
    r.lhs += dv * pair(pc.ric, grad, grad);
    lap_sq += dv * lap * lap;
    r.f_sq += dv * fj.value() * fj.value();
    r.grad_f_sq += dv * norm_sq_vec(c.g_inv, df);
  });
  r.rhs = (n - 1.0) / n * lap_sq;
  r.residual = r.lhs - r.rhs;
  return r;
}

NongradientKwReport nongradient_kw_residual(const QuadratureRule& rule, const MetricField& g, const VectorFieldSpec& x) {
  require_dims(rule, g);
  NongradientKwReport r;
  const int n = g.dim();
  for_each_node(rule, [&](std::span<const double> p, double w) {
    const TensorJ gj = g.eval(p, 2);
    const ConnectionData c = connection_data(gj);
    const FieldData xd = field_data(c, gj, x.eval(p, 2), true);
    const double res = conformal_residual(xd, c);
    r.max_conformal_residual = std::max(r.max_conformal_residual, res);
    if (!(res <= kConformalTolerance)) throw std::invalid_argument(conformal_failure("X", res, p));
    const PointCurvature pc = curvature_from(c);
    const double dv = w * pc.volume_density;
    r.ric_xx += dv * pair(pc.ric, xd.up, xd.up);
    r.nabla_x_sq += dv * norm_sq(xd.nabla, c.g_inv);
    r.div_x_sq += dv * xd.div * xd.div;
    double a_dot_x = 0.0;
    for (int i = 0; i < n; ++i) a_dot_x += xd.div_a[i] * xd.up[i];
    r.half_div_a_x += dv * 0.5 * a_dot_x;
  });
  r.combined = r.ric_xx + r.half_div_a_x;
  r.ricci_identity = r.ric_xx - r.nabla_x_sq - (n - 2.0) / n * r.div_x_sq;
  r.divergence_identity = r.half_div_a_x + r.nabla_x_sq - r.div_x_sq / n;
  return r;
}

namespace {

double signature_at(const PointCurvature& pc) {
  const int n = pc.g.dim();
  const TensorD a = pc.ric - pc.g * (pc.scal / (2.0 * (n - 1)));
  const TensorD w = pc.riem - kulkarni_nomizu(a, pc.g) * (1.0 / (n - 2));
  return weyl_pm(w, pc.g).signature_integrand();
}

}  // namespace

double signature_integrand(const MetricField& g, std::span<const double> p) {
  if (g.dim() != 4) throw std::invalid_argument("the signature integrand needs dimension 4");
  return signature_at(point_curvature(g, p));
}

double signature_quadrature(const QuadratureRule& rule, const MetricField& g) {
  if (g.dim() != 4) throw std::invalid_argument("the signature integrand needs dimension 4");
  require_dims(rule, g);
  double total = 0.0;
  for_each_node(rule, [&](std::span<const double> p, double w) {
    const PointCurvature pc = point_curvature(g, p);
    total += w * signature_at(pc) * pc.volume_density;
  });
  return total;
}

nlohmann::json to_json(const QuadratureRule& rule) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : rule.axes) axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"nodes", a.nodes.size()}});
  return {{"dim", rule.dim}, {"axes", axes}, {"total_nodes", rule.total_nodes()}, {"exactness", rule.exactness()}};
}

nlohmann::json to_json(const KazdanWarnerReport& r) {
  return {{"integral", r.integral}, {"max_conformal_residual", r.max_conformal_residual}};
}

nlohmann::json to_json(const BochnerIntegralReport& r) {
  return {{"lhs", r.lhs},   {"rhs", r.rhs}, {"residual", r.residual}, {"f_sq", r.f_sq}, {"grad_f_sq", r.grad_f_sq},
          {"max_conformal_residual", r.max_conformal_residual}};
}

nlohmann::json to_json(const NongradientKwReport& r) {
  return {{"ric_xx", r.ric_xx},
          {"nabla_x_sq", r.nabla_x_sq},
          {"div_x_sq", r.div_x_sq},
          {"half_div_a_x", r.half_div_a_x},
          {"combined", r.combined},
          {"ricci_identity", r.ricci_identity},
          {"divergence_identity", r.divergence_identity},
          {"max_conformal_residual", r.max_conformal_residual}};
}

}  // namespace curvlab
