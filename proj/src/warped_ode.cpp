#include "curvlab/warped_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "curvlab/curvature.hpp"

namespace curvlab {

namespace {

constexpr int kOrder = 5;

/// 1-d jet of a function around t0 from its derivatives.
Jet node_jet(const NodeJet& d, double t0) { return compose(Jet::variable(0, t0, 1, kOrder), d); }

NodeJet derivatives_of(const Jet& j) {
  NodeJet out{};
  out.fill(std::numeric_limits<double>::quiet_NaN());
  double factorial = 1.0;
  for (int m = 0; m <= j.order(); ++m) {
    if (m > 0) factorial *= m;
    out[m] = j.coeffs()[m] * factorial;
  }
  return out;
}

double phi_coefficient(const WarpedParams& p) { return p.n * (p.k - p.eps) / (4.0 * (p.n - 1)); }

struct PhiOde {
  double a;
  double e;  // exponent 1 - 4/n
  double C;
  double accel(double phi) const {
    if (!(phi > 0.0)) throw std::domain_error("phi reached " + std::to_string(phi) + "; the orbit left phi > 0");
    return a * std::pow(phi, e) + C * phi;
  }
  double energy(double phi, double dphi) const {
    return 0.5 * dphi * dphi - a * std::pow(phi, e + 1.0) / (e + 1.0) - 0.5 * C * phi * phi;
  }
  void rk4(double& phi, double& dphi, double h) const {
    const double k1x = dphi, k1v = accel(phi);
    const double k2x = dphi + 0.5 * h * k1v, k2v = accel(phi + 0.5 * h * k1x);
    const double k3x = dphi + 0.5 * h * k2v, k3v = accel(phi + 0.5 * h * k2x);
    const double k4x = dphi + h * k3v, k4v = accel(phi + h * k3x);
    phi += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    dphi += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
};

void check_admissible(const WarpedParams& p) {
  if (p.n < 3) throw std::invalid_argument("the periodic construction needs n >= 3");
  if (!(p.k > p.eps && p.eps > 0.0)) throw std::invalid_argument("the periodic construction needs k > eps > 0");
  const double bound = -2.0 * (p.k - p.eps) / (p.n - 1);
  if (!(p.C < bound))
    throw std::invalid_argument("C = " + std::to_string(p.C) + " is not below -2(k - eps)/(n - 1) = " + std::to_string(bound));
}

struct Pass {
  double period = 0.0;
  double drift = 0.0;
  double gap = 0.0;
};

Pass integrate_period(const PhiOde& ode, double phi_star, double phi0, double h, double linear_period) {
  double phi = phi0, dphi = 0.0, t = 0.0;
  const double e0 = ode.energy(phi, dphi);
  const double scale = std::max(std::abs(e0), std::numeric_limits<double>::min());
  Pass out;
  const long budget = static_cast<long>(50.0 * linear_period / h) + 1000;
  double prev_t = 0.0, prev_phi = phi, prev_dphi = dphi;
  for (long s = 0; s < budget; ++s) {
    ode.rk4(phi, dphi, h);
    t += h;
    out.drift = std::max(out.drift, std::abs(ode.energy(phi, dphi) - e0) / scale);
    if (prev_dphi > 0.0 && dphi <= 0.0 && phi > phi_star) {
      // Quadratic through (prev, current, next) values of phi', root inside [prev_t, t].
      double nphi = phi, ndphi = dphi;
      ode.rk4(nphi, ndphi, h);
      const double y0 = prev_dphi, y1 = dphi, y2 = ndphi;
      const double c = y0, b = (-3.0 * y0 + 4.0 * y1 - y2) / (2.0 * h), a2 = (y0 - 2.0 * y1 + y2) / (2.0 * h * h);
      double root = h * y0 / (y0 - y1);
      for (int it = 0; it < 20; ++it) root -= (a2 * root * root + b * root + c) / (2.0 * a2 * root + b);
      out.period = prev_t + root;
      // Return map check at the crossing: phi there is interpolated the same way.
      const double p0 = prev_phi, p1 = phi, p2 = nphi;
      const double pb = (-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * h), pa = (p0 - 2.0 * p1 + p2) / (2.0 * h * h);
      out.gap = std::abs(pa * root * root + pb * root + p0 - phi0);
      return out;
    }
    prev_t = t;
    prev_phi = phi;
    prev_dphi = dphi;
  }
  throw std::domain_error("phi orbit did not return to its section within " + std::to_string(budget) + " steps");
}

}  // namespace

double hcf_ode_residual(const NodeJet& q, double fprime, int n, double k) {
  return q[3] + 0.5 * n * q[1] * q[2] + k / (n - 1.0) * std::exp(-q[0]) * q[1] -
         0.5 * (2.0 * q[2] + q[1] * q[1]) * fprime;
}

std::vector<double> hcf_ode_residual(std::span<const NodeJet> q, std::span<const double> fprime, int n, double k) {
  if (q.size() != fprime.size()) throw std::invalid_argument("q and f' grids differ in size");
  std::vector<double> out;
  out.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out.push_back(hcf_ode_residual(q[i], fprime[i], n, k));
  return out;
}

std::vector<double> integrated_lhs(std::span<const double> t, std::span<const NodeJet> q, std::span<const NodeJet> f,
                                   int n, double k) {
  if (t.size() != q.size() || t.size() != f.size()) throw std::invalid_argument("grid sizes differ");
  auto g = [&](std::size_t i) { return 0.5 * (2.0 * q[i][2] + q[i][1] * q[i][1]) * f[i][1]; };
  auto dg = [&](std::size_t i) {
    return (q[i][3] + q[i][1] * q[i][2]) * f[i][1] + 0.5 * (2.0 * q[i][2] + q[i][1] * q[i][1]) * f[i][2];
  };
  std::vector<double> out(t.size());
  double integral = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) {
      const double h = t[i] - t[i - 1];
      integral += 0.5 * h * (g(i - 1) + g(i)) + h * h / 12.0 * (dg(i - 1) - dg(i));
    }
    out[i] = q[i][2] + 0.25 * n * q[i][1] * q[i][1] - k / (n - 1.0) * std::exp(-q[i][0]) - integral;
  }
  return out;
}

double reduced_ode_residual(const NodeJet& q, const WarpedParams& p) {
  return q[2] + 0.25 * p.n * q[1] * q[1] - (p.k - p.eps) / (p.n - 1.0) * std::exp(-q[0]) - 4.0 / p.n * p.C;
}

PhiOrbit solve_phi(const WarpedParams& p, double amplitude, double step) {
  check_admissible(p);
  if (!(amplitude >= 0.0)) throw std::invalid_argument("amplitude must be nonnegative");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const PhiOde ode{phi_coefficient(p), 1.0 - 4.0 / p.n, p.C};
  PhiOrbit o;
  o.params = p;
  o.amplitude = amplitude;
  o.phi_star = std::pow(ode.a / -p.C, p.n / 4.0);
  const double omega2 = -p.C - ode.e * ode.a * std::pow(o.phi_star, -4.0 / p.n);
  o.linear_period = 2.0 * std::numbers::pi / std::sqrt(omega2);
  o.step = step;
  if (amplitude == 0.0) {
    o.equilibrium = true;
    o.period = o.linear_period;
    o.max_ode_residual = std::abs(ode.accel(o.phi_star));
    return o;
  }
  const double phi0 = o.phi_star + amplitude;
  Pass pass = integrate_period(ode, o.phi_star, phi0, step, o.linear_period);
  for (o.refinements = 1; o.refinements <= 12; ++o.refinements) {
    const Pass finer = integrate_period(ode, o.phi_star, phi0, o.step / 2.0, o.linear_period);
    o.step /= 2.0;
    const double change = std::abs(finer.period - pass.period);
    pass = finer;
    if (change < 1e-8) break;
  }
  if (o.refinements > 12) throw std::domain_error("period estimate did not settle under step refinement");
  o.period = pass.period;
  o.energy_drift = pass.drift;
  o.return_gap = pass.gap;
  return o;
}

OrbitSamples sample_orbit(const PhiOrbit& orbit, int nodes) {
  if (nodes < 2) throw std::invalid_argument("need at least 2 nodes per period");
  const WarpedParams& p = orbit.params;
  const PhiOde ode{phi_coefficient(p), 1.0 - 4.0 / p.n, p.C};
  OrbitSamples s;
  const double dt = orbit.period / nodes;
  const int sub = std::max(1, static_cast<int>(std::ceil(dt / orbit.step)));
  const double h = dt / sub;
  double phi = orbit.phi_star + orbit.amplitude, dphi = 0.0;
  for (int j = 0; j <= nodes; ++j) {
    s.t.push_back(j * dt);
    s.phi.push_back(phi);
    s.dphi.push_back(dphi);
    if (j < nodes && !orbit.equilibrium)
      for (int m = 0; m < sub; ++m) ode.rk4(phi, dphi, h);
  }
  return s;
}

std::vector<NodeJet> q_jets_from_phi(const OrbitSamples& s, const WarpedParams& p) {
  const double a = phi_coefficient(p), e = 1.0 - 4.0 / p.n;
  std::vector<NodeJet> out;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!(s.phi[i] > 0.0)) throw std::domain_error("phi <= 0 at t = " + std::to_string(s.t[i]));
    Jet phi = Jet::constant(0.0, 1, kOrder);
    phi.coeffs()[0] = s.phi[i];
    phi.coeffs()[1] = s.dphi[i];
    // Coefficient m of a phi^e + C phi only involves phi coefficients <= m.
    for (int m = 0; m + 2 <= kOrder; ++m) {
      const Jet rhs = a * pow(phi, e) + p.C * phi;
      phi.coeffs()[m + 2] = rhs.coeffs()[m] / ((m + 2.0) * (m + 1.0));
    }
    out.push_back(derivatives_of((4.0 / p.n) * log(phi)));
  }
  return out;
}

DenominatorProfile denominator_profile(std::span<const double> t, std::span<const NodeJet> q, const WarpedParams& p) {
  DenominatorProfile out;
  out.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = 2.0 * q[i][2] + q[i][1] * q[i][1];
    if (d > out.max_value) {
      out.max_value = d;
      out.at_t = t[i];
    }
  }
  out.bound = 8.0 / p.n * (p.C + 2.0 * (p.k - p.eps) / (p.n - 1));
  return out;
}

std::vector<NodeJet> recover_f(std::span<const double> t, std::span<const NodeJet> q, const WarpedParams& p) {
  if (t.size() != q.size() || t.empty()) throw std::invalid_argument("grid sizes differ");
  auto stationary = [](const NodeJet& qi) {
    return std::all_of(qi.begin() + 1, qi.end(), [](double v) { return std::abs(v) <= 1e-12; });
  };
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = 2.0 * q[i][2] + q[i][1] * q[i][1];
    if (!(d < 0.0) && !stationary(q[i]))
      throw std::domain_error("2q'' + q'^2 = " + std::to_string(d) + " >= 0 at t = " + std::to_string(t[i]) +
                              "; f' cannot be recovered there");
  }
  std::vector<NodeJet> f(q.size());
  const double c = 2.0 * p.eps / (p.n - 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    // Locally constant q carries f' = 0 to all orders.
    if (stationary(q[i])) {
      f[i] = NodeJet{};
      continue;
    }
    const Jet qj = node_jet(q[i], t[i]);
    const Jet q1 = qj.derivative(0);
    const Jet q2 = q1.derivative(0);
    const int o = q2.order();
    const Jet q1t = q1.truncated(o);
    const Jet fp = c * q1t / exp(qj.truncated(o)) / (2.0 * q2 + q1t * q1t);
    // f' is known through its third derivative; f^{(5)} stays NaN.
    const NodeJet d = derivatives_of(fp);
    for (int m = 0; m + 1 < static_cast<int>(f[i].size()); ++m) f[i][m + 1] = d[m];
    f[i][0] = 0.0;
  }
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double h = t[i] - t[i - 1];
    f[i][0] = f[i - 1][0] + 0.5 * h * (f[i - 1][1] + f[i][1]) + h * h / 12.0 * (f[i - 1][2] - f[i][2]);
  }
  return f;
}

WarpedSolution gaussian_warped_solution(int n, int nodes, double lo, double hi) {
  if (n < 3) throw std::invalid_argument("warped products need n >= 3");
  if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  WarpedSolution s;
  s.params = {n, 0.0, 0.0, 0.0};
  std::vector<double> fp;
  for (int i = 0; i < nodes; ++i) {
    const double t = lo + (hi - lo) * i / (nodes - 1);
    const Jet tj = Jet::variable(0, t, 1, kOrder);
    s.t.push_back(t);
    s.q.push_back(derivatives_of(tj * tj));
    s.f.push_back(derivatives_of(0.5 * n * log(1.0 + tj * tj)));
    fp.push_back(s.f.back()[1]);
  }
  for (double r : hcf_ode_residual(s.q, fp, n, 0.0)) s.max_ode_residual = std::max(s.max_ode_residual, std::abs(r));
  return s;
}

WarpedSolution periodic_solution(const WarpedParams& p, double amplitude, int nodes, double step) {
  WarpedSolution s;
  s.params = p;
  s.orbit = solve_phi(p, amplitude, step);
  const OrbitSamples samples = sample_orbit(*s.orbit, nodes);
  s.t = samples.t;
  s.phi = samples.phi;
  s.q = q_jets_from_phi(samples, p);
  for (const NodeJet& q : s.q) s.max_reduced_residual = std::max(s.max_reduced_residual, std::abs(reduced_ode_residual(q, p)));
  s.f = recover_f(s.t, s.q, p);
  for (std::size_t i = 0; i < s.q.size(); ++i)
    s.max_ode_residual = std::max(s.max_ode_residual, std::abs(hcf_ode_residual(s.q[i], s.f[i][1], p.n, p.k)));
  s.f_period_gap = std::abs(s.f.back()[0] - s.f.front()[0]);
  return s;
}

CatalogEntry assemble(const WarpedSolution& s, const MetricField& fiber) {
  if (fiber.dim() != s.params.n - 1) throw std::invalid_argument("fiber dimension must be n - 1");
  if (s.t.size() < 2 || s.q.size() != s.t.size() || s.f.size() != s.t.size())
    throw std::invalid_argument("warped solution grid is incomplete");
  auto node = [t = s.t](double x) {
    const auto it = std::lower_bound(t.begin(), t.end(), x);
    for (auto c : {it, it == t.begin() ? it : it - 1})
      if (c != t.end() && std::abs(*c - x) <= 1e-9 * (1.0 + std::abs(x))) return static_cast<std::size_t>(c - t.begin());
    throw std::domain_error("warped solution is only defined at grid nodes; t = " + std::to_string(x));
  };
  CatalogEntry e;
  e.name = "warped_solution";
  const std::vector<NodeJet> q = s.q;
  e.metric = warped_product([q, node](const Jet& t) { return exp(compose(t, q[node(t.value())])); },
                            {s.t.front(), s.t.back()}, fiber);
  const std::vector<NodeJet> f = s.f;
  e.potential = ScalarPotential{e.metric.chart, [f, node](std::span<const Jet> x) { return compose(x[0], f[node(x[0].value())]); }};
  return e;
}

std::vector<MembershipReport> assemble_and_verify(const WarpedSolution& s, const MetricField& fiber,
                                                  const std::vector<ClassId>& classes, double threshold,
                                                  double fiber_tol) {
  const double k = s.params.k;
  const auto fiber_points = sample_points(fiber.chart, static_cast<int>(s.t.size()), 11);
  for (std::size_t i = 0; i < std::min<std::size_t>(fiber_points.size(), 8); ++i) {
    const double r = curvature_at(fiber, fiber_points[i], 0).scal;
    if (std::abs(r - k) > fiber_tol * (1.0 + std::abs(k)))
      throw std::invalid_argument("fiber scalar curvature " + std::to_string(r) + " differs from k = " + std::to_string(k));
  }
  const CatalogEntry e = assemble(s, fiber);
  std::vector<Point> points;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    Point p{s.t[i]};
    p.insert(p.end(), fiber_points[i].begin(), fiber_points[i].end());
    points.push_back(std::move(p));
  }
  ClassifyOptions opts;
  opts.threshold = threshold;
  return classify_at(e, classes, points, opts);
}

nlohmann::json to_json(const PhiOrbit& o) {
  return {{"n", o.params.n},
          {"k", o.params.k},
          {"eps", o.params.eps},
          {"C", o.params.C},
          {"amplitude", o.amplitude},
          {"phi_star", o.phi_star},
          {"step", o.step},
          {"refinements", o.refinements},
          {"period", o.period},
          {"linear_period", o.linear_period},
          {"equilibrium", o.equilibrium},
          {"energy_drift", o.energy_drift},
          {"return_gap", o.return_gap}};
}

nlohmann::json to_json(const WarpedSolution& s) {
  nlohmann::json q = nlohmann::json::array(), f = nlohmann::json::array();
  for (const auto& v : s.q) q.push_back(v);
  for (const auto& v : s.f) {
    nlohmann::json row = nlohmann::json::array();
    for (double x : v) row.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json());
    f.push_back(row);
  }
  nlohmann::json out = {{"params", {{"n", s.params.n}, {"k", s.params.k}, {"eps", s.params.eps}, {"C", s.params.C}}},
                        {"t", s.t},
                        {"q", q},
                        {"f", f},
                        {"max_ode_residual", s.max_ode_residual},
                        {"max_reduced_residual", s.max_reduced_residual}};
  if (s.orbit) {
    out["orbit"] = to_json(*s.orbit);
    out["phi"] = s.phi;
    out["f_period_gap"] = s.f_period_gap;
  }
  return out;
}

}  // namespace curvlab
