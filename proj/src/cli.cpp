#include "curvlab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "curvlab/catalog.hpp"
#include "curvlab/classifier.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/identities.hpp"
#include "curvlab/integrals.hpp"
#include "curvlab/potential_tensors.hpp"
#include "curvlab/spec_file.hpp"
#include "curvlab/warped_ode.hpp"

namespace curvlab {

namespace {

using nlohmann::json;

/// Bad command-line input, reported like a module error but with its own kind.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string point_text(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + num(p[i]);
  return s + ")";
}

CatalogEntry load_geometry(const RunConfig& c) {
  if (!c.geometry.empty() && !c.spec_path.empty()) throw UsageError("--geometry and --spec are mutually exclusive");
  if (!c.spec_path.empty()) return load_geometry_spec_file(c.spec_path);
  if (!c.geometry.empty()) return catalog_lookup(c.geometry, c.dim);
  throw UsageError("one of --geometry or --spec is required");
}

std::vector<ClassId> parse_classes(const std::vector<std::string>& names) {
  std::vector<ClassId> out;
  for (const auto& n : names) {
    const auto c = parse_class(n);
    if (!c) throw UsageError("unknown class '" + n + "'");
    out.push_back(*c);
  }
  return out;
}

// ---- tensors ----

struct TensorDump {
  json j = json::object();
  std::string text;

  void add(const std::string& name, const TensorD& t) {
    if (t.empty()) return;
    if (t.rank() == 0) return add(name, t.at_flat(0));
    j[name] = {{"rank", t.rank()}, {"components", std::vector<double>(t.data().begin(), t.data().end())}};
    bool any = false;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (std::abs(t.at_flat(k)) <= 1e-14) continue;
      const auto idx = t.unflatten(k);
      std::string label = name + "[";
      for (std::size_t r = 0; r < idx.size(); ++r) label += (r ? "," : "") + std::to_string(idx[r]);
      text += "  " + label + "] = " + num(t.at_flat(k)) + "\n";
      any = true;
    }
    if (!any) text += "  " + name + " = 0\n";
  }
  void add(const std::string& name, double v) {
    j[name] = v;
    text += "  " + name + " = " + num(v) + "\n";
  }
};

CommandResult cmd_tensors(const RunConfig& c) {
  const CatalogEntry e = load_geometry(c);
  if (c.depth < 0 || c.depth > 3) throw UsageError("--depth must be between 0 and 3");
  Point p = c.point;
  if (p.empty()) {
    p = sample_points(e.metric.chart, 1, c.seed).front();
  } else if (static_cast<int>(p.size()) != e.metric.dim()) {
    throw UsageError("--point needs " + std::to_string(e.metric.dim()) + " coordinates");
  }
  const CurvaturePack pack = curvature_at(e.metric, p, c.depth);
  CommandResult r;
  r.text = "geometry " + e.name + " (dim " + std::to_string(pack.dim) + ") at " + point_text(p) + ", depth " +
           std::to_string(c.depth) + "\n";
  r.text += "scalar curvature R = " + num(pack.scal) + "\n";

  TensorDump cur;
  cur.add("g", pack.g);
  cur.add("g_inv", pack.g_inv);
  cur.add("gamma", pack.gamma);
  cur.add("riem", pack.riem);
  cur.add("ric", pack.ric);
  cur.add("scal", pack.scal);
  cur.add("grad_scal", pack.grad_scal);
  cur.add("weyl", pack.weyl);
  cur.add("nabla_ric", pack.nabla_ric);
  cur.add("nabla_riem", pack.nabla_riem);
  cur.add("div_riem", pack.div_riem);
  cur.add("div_weyl", pack.div_weyl);
  cur.add("cotton", pack.cotton);
  cur.add("cotton_via_weyl", pack.cotton_weyl);
  cur.add("nabla_cotton", pack.nabla_cotton);
  cur.add("bach", pack.bach);
  cur.add("div_bach", pack.div_bach);
  if (pack.dim == 4) {
    const WeylSplit split = weyl_pm(pack);
    const Eigen::Vector3d& sp = split.plus_spectrum;
    const Eigen::Vector3d& sm = split.minus_spectrum;
    cur.add("weyl_plus_spectrum", from_matrix(Eigen::MatrixXd(sp.asDiagonal())));
    cur.add("weyl_minus_spectrum", from_matrix(Eigen::MatrixXd(sm.asDiagonal())));
    cur.add("signature_integrand", split.signature_integrand());
  }
  r.text += "curvature:\n" + cur.text;
  r.report = {{"geometry", e.name}, {"dim", pack.dim}, {"point", p}, {"depth", c.depth}, {"curvature", cur.j}};

  if (e.potential) {
    const FPack f = f_pack(pack, *e.potential);
    TensorDump d;
    d.add("f", f.f);
    d.add("df", f.df);
    d.add("grad_f", f.grad_f);
    d.add("hess", f.hess);
    d.add("lap", f.lap);
    d.add("ric_f", f.ric_f);
    d.add("scal_f", f.scal_f);
    d.add("schouten_f", f.schouten_f);
    d.add("riem_f", f.riem_f);
    d.add("einstein_f", f.einstein_f);
    d.add("d_tensor", f.d_tensor);
    d.add("nabla_ric_f", f.nabla_ric_f);
    d.add("nabla_riem_f", f.nabla_riem_f);
    d.add("grad_scal_f", f.grad_scal_f);
    d.add("div_riem_f", f.div_riem_f);
    d.add("div_ric_f", f.div_ric_f);
    d.add("div_weighted_riem", f.div_weighted_riem);
    d.add("div_weighted_ric", f.div_weighted_ric);
    d.add("div_einstein_kn", f.div_einstein_kn);
    d.add("div_ric_minus_scal", f.div_ric_minus_scal);
    d.add("third_derivative", f.third_derivative);
    r.text += "potential:\n" + d.text;
    r.report["potential"] = d.j;
  }
  if (e.vector_field) {
    const XPack x = x_pack(pack, *e.vector_field);
    TensorDump d;
    d.add("x_up", x.x_up);
    d.add("x_low", x.x_low);
    d.add("nabla_x", x.nabla_x);
    d.add("nabla2_x", x.nabla2_x);
    d.add("lie", x.lie);
    d.add("a_x", x.a_x);
    d.add("div_x", x.div_x);
    d.add("div_a", x.div_a);
    d.add("ric_x", x.ric_x);
    d.add("scal_x", x.scal_x);
    d.add("schouten_x", x.schouten_x);
    d.add("riem_x", x.riem_x);
    d.add("einstein_x", x.einstein_x);
    d.add("d_tensor", x.d_tensor);
    d.add("d_tensor_a", x.d_tensor_a);
    d.add("nabla_ric_x", x.nabla_ric_x);
    d.add("nabla_riem_x", x.nabla_riem_x);
    d.add("grad_scal_x", x.grad_scal_x);
    d.add("div_einstein_kn", x.div_einstein_kn);
    d.add("div_ric_minus_scal", x.div_ric_minus_scal);
    r.text += "vector field:\n" + d.text;
    r.report["vector_field"] = d.j;
  }
  return r;
}

// ---- classify ----

CommandResult cmd_classify(const RunConfig& c) {
  const CatalogEntry e = load_geometry(c);
  std::vector<ClassId> classes = parse_classes(c.classes);
  if (classes.empty()) classes = applicable_classes(e);
  ClassifyOptions opts;
  opts.seed = c.seed;
  opts.count = c.count;
  opts.depth = c.depth;
  if (c.threshold > 0.0) opts.threshold = c.threshold;
  const auto reports = classify_many(e, classes, opts);
  CommandResult r;
  r.report = {{"geometry", e.name}, {"dim", e.metric.dim()}, {"reports", json::array()}};
  r.text = "geometry " + e.name + " (dim " + std::to_string(e.metric.dim()) + "), seed " + std::to_string(c.seed) +
           ", " + std::to_string(c.count) + " points, threshold " + sci(opts.effective_threshold()) + "\n";
  r.text += pad("class", 11) + pad("verdict", 14) + pad("max", 12) + pad("mean", 12) + "lambda\n";
  for (const auto& m : reports) {
    r.report["reports"].push_back(to_json(m));
    r.passed = r.passed && m.verdict == Verdict::Member;
    std::string line = pad(std::string(class_name(m.cls)), 11) + pad(std::string(verdict_name(m.verdict)), 14) +
                       pad(sci(m.max), 12) + pad(sci(m.mean), 12);
    if (m.lambda_estimate) line += num(*m.lambda_estimate);
    r.text += line + "\n";
    if (!m.consistent()) r.text += "  formulations disagree\n";
  }
  return r;
}

// ---- identities ----

CommandResult cmd_identities(const RunConfig& c) {
  const CatalogEntry e = load_geometry(c);
  IdentityOptions opts;
  opts.seed = c.seed;
  opts.count = c.count;
  if (c.threshold > 0.0) {
    opts.tolerance = c.threshold;
    opts.tolerance_depth3 = 10.0 * c.threshold;
  }
  const IdentityReport rep = run_identity_suite(e, opts);
  CommandResult r;
  r.report = to_json(rep);
  r.passed = rep.passed();
  r.text = "geometry " + e.name + " (dim " + std::to_string(rep.dim) + "), seed " + std::to_string(c.seed) + ", " +
           std::to_string(c.count) + " points\n";
  for (const auto& chk : rep.checks)
    r.text += pad(chk.name, 52) + pad(sci(chk.max_residual), 12) + "<= " + pad(sci(chk.tolerance), 11) +
              (chk.passed() ? "PASS" : "FAIL") + "\n";
  return r;
}

// ---- construct ----

/// Einstein fiber of dimension m with scalar curvature k.
MetricField einstein_fiber(int m, double k) {
  if (k == 0.0) return flat_metric(Chart(std::vector<Interval>(m, {-1.0, 1.0}), 0.1));
  const double scale = m * (m - 1.0) / std::abs(k);
  if (k > 0.0) return sphere_metric(m, std::sqrt(scale));
  const MetricField h = hyperbolic_metric(m);
  return {h.chart, [h, scale](std::span<const Jet> x) {
            TensorJ g = h.fn(x);
            for (auto& v : g.data()) v *= scale;
            return g;
          }};
}

void write_columns(const std::string& path, const std::vector<double>& a, const std::vector<double>& b) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot write " + path);
  char buf[64];
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", a[i], b[i]);
    os << buf;
  }
}

std::vector<double> column(const std::vector<NodeJet>& v, int order) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x[order]);
  return out;
}

std::string verdict_lines(const std::vector<MembershipReport>& reports) {
  std::string s;
  for (const auto& m : reports)
    s += "  " + pad(std::string(class_name(m.cls)), 10) + pad(std::string(verdict_name(m.verdict)), 14) + sci(m.max) + "\n";
  return s;
}

CommandResult construct_gaussian(const RunConfig& c) {
  const int n = c.dim > 0 ? c.dim : 4;
  const int nodes = c.nodes > 0 ? c.nodes : 101;
  const WarpedSolution s = gaussian_warped_solution(n, nodes);
  const MetricField fiber = einstein_fiber(n - 1, 0.0);
  const double thr = c.threshold > 0.0 ? c.threshold : 1e-7;
  const auto reports = assemble_and_verify(s, fiber, {ClassId::HCf, ClassId::Yf, ClassId::Ef}, thr);
  CommandResult r;
  const bool ode_ok = s.max_ode_residual <= 1e-12;
  r.passed = ode_ok && reports[0].verdict == Verdict::Member && reports[1].verdict == Verdict::Member &&
             reports[2].verdict == Verdict::NonMember;
  r.report = {{"example", "gaussian"}, {"solution", to_json(s)}, {"verification", json::array()}};
  for (const auto& m : reports) r.report["verification"].push_back(to_json(m));
  r.text = "q = t^2, f = (n/2) log(1 + t^2), k = 0, n = " + std::to_string(n) + ", " + std::to_string(nodes) +
           " nodes on [-2, 2]\n";
  r.text += "  max ODE residual " + sci(s.max_ode_residual) + (ode_ok ? "" : " (above 1e-12)") + "\n";
  r.text += "assembled metric, threshold " + sci(thr) + " (expected: HCf and Yf member, Ef non-member):\n";
  r.text += verdict_lines(reports);
  if (!c.plot.empty()) {
    write_columns(c.plot + "_q.dat", s.t, column(s.q, 0));
    write_columns(c.plot + "_f.dat", s.t, column(s.f, 0));
  }
  return r;
}

CommandResult construct_periodic(const RunConfig& c) {
  WarpedParams p;
  p.n = c.dim > 0 ? c.dim : 4;
  p.k = c.k;
  p.eps = c.eps;
  p.C = c.C;
  const int nodes = c.nodes > 0 ? c.nodes : 64;
  const double phi_star = solve_phi(p, 0.0, c.step).phi_star;
  const PhiOrbit orbit = solve_phi(p, c.amplitude * phi_star, c.step);
  CommandResult r;
  const double period_error = std::abs(orbit.period / orbit.linear_period - 1.0);
  const bool orbit_ok = orbit.energy_drift <= 1e-9 && period_error <= 0.01;
  r.report = {{"example", "periodic"}, {"orbit", to_json(orbit)}};
  r.text = "phi ODE, n = " + std::to_string(p.n) + ", k = " + num(p.k) + ", eps = " + num(p.eps) + ", C = " + num(p.C) +
           ", amplitude " + num(c.amplitude) + " phi*\n";
  r.text += "  phi* " + num(orbit.phi_star) + ", period " + num(orbit.period) + " (linearized " +
            num(orbit.linear_period) + ", off by " + sci(period_error) + ")\n";
  r.text += "  energy drift " + sci(orbit.energy_drift) + ", return gap " + sci(orbit.return_gap) + "\n";

  const OrbitSamples samples = sample_orbit(orbit, nodes);
  const std::vector<NodeJet> q = q_jets_from_phi(samples, p);
  const DenominatorProfile den = denominator_profile(samples.t, q, p);
  r.report["denominator"] = {{"max_value", den.max_value}, {"at_t", den.at_t}, {"bound", den.bound}};
  r.text += "  max of 2q'' + q'^2: " + num(den.max_value) + " at t = " + num(den.at_t) + "\n";
  if (!c.plot.empty()) {
    write_columns(c.plot + "_phi.dat", samples.t, samples.phi);
    write_columns(c.plot + "_q.dat", samples.t, column(q, 0));
  }

  WarpedSolution s;
  s.params = p;
  s.t = samples.t;
  s.phi = samples.phi;
  s.q = q;
  s.orbit = orbit;
  try {
    s.f = recover_f(s.t, s.q, p);
  } catch (const std::domain_error& ex) {
    r.passed = false;
    r.report["stage"] = "recover_f";
    r.report["message"] = ex.what();
    r.text += "potential recovery failed: " + std::string(ex.what()) + "\n";
    return r;
  }
  for (std::size_t i = 0; i < s.q.size(); ++i) {
    s.max_ode_residual = std::max(s.max_ode_residual, std::abs(hcf_ode_residual(s.q[i], s.f[i][1], p.n, p.k)));
    s.max_reduced_residual = std::max(s.max_reduced_residual, std::abs(reduced_ode_residual(s.q[i], p)));
  }
  s.f_period_gap = std::abs(s.f.back()[0] - s.f.front()[0]);
  const auto reports = assemble_and_verify(s, einstein_fiber(p.n - 1, p.k), {ClassId::HCf},
                                           c.threshold > 0.0 ? c.threshold : 1e-5);
  r.passed = orbit_ok && s.f_period_gap <= 1e-7 && reports[0].verdict == Verdict::Member;
  r.report["solution"] = to_json(s);
  r.report["verification"] = json::array({to_json(reports[0])});
  r.text += "  f period gap " + sci(s.f_period_gap) + ", max ODE residual " + sci(s.max_ode_residual) + "\n";
  r.text += verdict_lines(reports);
  if (!c.plot.empty()) write_columns(c.plot + "_f.dat", s.t, column(s.f, 0));
  return r;
}

CommandResult cmd_construct(const RunConfig& c) {
  if (c.example == "gaussian") return construct_gaussian(c);
  if (c.example == "periodic") return construct_periodic(c);
  throw UsageError("--example must be gaussian or periodic");
}

// ---- obstruction ----

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b))); }

ScalarPotential first_harmonic(const MetricField& g) {
  return {g.chart, [](std::span<const Jet> x) { return cos(x[0]); }};
}

VectorFieldSpec rotation(const MetricField& g) {
  const int n = g.dim();
  return {g.chart, [n](std::span<const Jet> x) {
            std::vector<Jet> v(n, constant_like(x[0], 0.0));
            v[n - 1] = constant_like(x[0], 1.0);
            return v;
          }};
}

CommandResult cmd_obstruction(const RunConfig& c) {
  constexpr double kTol = 1e-6;
  CommandResult r;
  if (c.which == "signature") {
    const CatalogEntry e = c.geometry.empty() && c.spec_path.empty() ? catalog_lookup("s2xs2") : load_geometry(c);
    if (e.metric.dim() != 4) throw UsageError("the signature integrand needs a 4-dimensional geometry");
    r.report = {{"which", "signature"}, {"geometry", e.name}};
    if (e.name == "s2xs2") {
      const int nodes = c.nodes > 0 ? c.nodes : 16;
      const QuadratureRule rule = product_rule(sphere_rule(2, nodes), sphere_rule(2, nodes));
      const double integral = signature_quadrature(rule, e.metric);
      r.passed = std::abs(integral) <= kTol;
      r.report["rule"] = to_json(rule);
      r.report["integral"] = integral;
      r.report["signature"] = integral / (48.0 * std::numbers::pi * std::numbers::pi);
      r.text = "int (|W+|^2 - |W-|^2) over s2xs2 with " + std::to_string(rule.total_nodes()) + " nodes: " + sci(integral) +
               " (tau = 0 expected)\n";
    } else {
      // Only products of spheres have a quadrature; elsewhere the integrand is reported.
      json pts = json::array();
      double worst = 0.0;
      for (const Point& p : sample_points(e.metric.chart, c.count, c.seed)) {
        const double v = signature_integrand(e.metric, p);
        worst = std::max(worst, std::abs(v));
        pts.push_back({{"point", p}, {"value", v}});
      }
      r.report["integrand"] = pts;
      r.report["max_abs"] = worst;
      r.text = "|W+|^2 - |W-|^2 on " + e.name + " at " + std::to_string(c.count) + " points: max |value| " + sci(worst) + "\n";
    }
    return r;
  }

  const int n = c.dim > 0 ? c.dim : 2;
  if (n < 2 || n > 4) throw UsageError("--dim must be 2, 3 or 4 for sphere obstructions");
  const int nodes = c.nodes > 0 ? c.nodes : (n == 4 ? 16 : 64);
  const MetricField g = sphere_metric(n, 1.0);
  const ScalarPotential f = first_harmonic(g);
  const QuadratureRule rule = sphere_rule(n, nodes);
  r.report = {{"which", c.which}, {"dim", n}, {"rule", to_json(rule)}};
  const std::string head = "round S^" + std::to_string(n) + ", f = cos(theta_1), " +
                           std::to_string(rule.total_nodes()) + " nodes\n";
  if (c.which == "bochner") {
    const BochnerIntegralReport b = bochner_conformal_identity(rule, g, f);
    const double eigen = n * (n - 1.0) * b.f_sq;
    r.passed = close_rel(b.lhs, b.rhs, kTol) && close_rel(b.lhs, eigen, kTol);
    r.report["bochner"] = to_json(b);
    r.report["eigen_value"] = eigen;
    r.text = head + "  int Ric(grad f, grad f)   = " + num(b.lhs) + "\n  ((n-1)/n) int (lap f)^2   = " + num(b.rhs) +
             "\n  n(n-1) int f^2            = " + num(eigen) + "\n";
  } else if (c.which == "kazdan-warner") {
    const KazdanWarnerReport kw = kazdan_warner_residual(rule, g, f, gradient_field(g, f));
    const BochnerIntegralReport b = bochner_conformal_identity(rule, g, f);
    // Membership in Y_f would force the integral to vanish; here it equals the Bochner value.
    r.passed = close_rel(kw.integral, b.rhs, kTol) && kw.integral > kTol;
    r.report["kazdan_warner"] = to_json(kw);
    r.report["bochner_rhs"] = b.rhs;
    r.text = head + "  int Ric(grad f, X), X = grad f = " + num(kw.integral) + "\n  ((n-1)/n) int (lap f)^2        = " +
             num(b.rhs) + "\n  nonzero, so (g, f) is not in Y_f\n";
  } else if (c.which == "nongradient-kw") {
    r.report["fields"] = json::object();
    r.text = head;
    r.passed = true;
    const std::vector<std::pair<std::string, VectorFieldSpec>> fields = {{"killing", rotation(g)},
                                                                         {"gradient", gradient_field(g, f)}};
    for (const auto& [name, x] : fields) {
      const NongradientKwReport k = nongradient_kw_residual(rule, g, x);
      const double scale = 1.0 + std::abs(k.ric_xx) + std::abs(k.nabla_x_sq) + std::abs(k.div_x_sq);
      const bool ok = std::abs(k.ricci_identity) <= kTol * scale && std::abs(k.divergence_identity) <= kTol * scale;
      r.passed = r.passed && ok;
      r.report["fields"][name] = to_json(k);
      r.text += "  " + pad(name, 9) + "Ricci identity " + sci(k.ricci_identity) + ", divergence identity " +
                sci(k.divergence_identity) + ", combined " + num(k.combined) + (ok ? "" : "  FAIL") + "\n";
    }
  } else {
    throw UsageError("--which must be bochner, kazdan-warner, nongradient-kw or signature");
  }
  return r;
}

// ---- list ----

CommandResult cmd_list(const RunConfig&) {
  CommandResult r;
  r.report = {{"geometries", json::array()}, {"classes", json::array()}};
  r.text = "catalog geometries:\n";
  for (const auto& name : catalog_names()) {
    const CatalogEntry e = catalog_lookup(name);
    r.report["geometries"].push_back({{"name", name}, {"default_dim", e.metric.dim()}});
    r.text += "  " + pad(name, 20) + "dim " + std::to_string(e.metric.dim()) + "\n";
  }
  r.text += "classes:";
  for (ClassId c : kAllClasses) {
    r.report["classes"].push_back(std::string(class_name(c)));
    r.text += " " + std::string(class_name(c));
  }
  r.text += "\n";
  return r;
}

json error_json(const std::string& kind, const std::string& message, const std::string& path = "") {
  json e = {{"kind", kind}, {"message", message}};
  if (!path.empty()) e["path"] = path;
  return {{"error", e}};
}

void add_common(CLI::App* sub, RunConfig& c, bool geometry) {
  if (geometry) {
    sub->add_option("--geometry", c.geometry, "catalog geometry name (see 'list')");
    sub->add_option("--spec", c.spec_path, "geometry spec file (JSON)");
  }
  sub->add_option("--dim", c.dim, "dimension");
  sub->add_option("--seed", c.seed, "sample seed");
  sub->add_option("--count", c.count, "number of sample points")->check(CLI::PositiveNumber);
  sub->add_option("--threshold", c.threshold, "residual threshold")->check(CLI::PositiveNumber);
  sub->add_flag("--json", c.json, "emit JSON");
  sub->add_option("--out", c.out, "write the report to this file");
}

}  // namespace

CommandResult run_command(const RunConfig& c) {
  if (c.command == "tensors") return cmd_tensors(c);
  if (c.command == "classify") return cmd_classify(c);
  if (c.command == "identities") return cmd_identities(c);
  if (c.command == "construct") return cmd_construct(c);
  if (c.command == "obstruction") return cmd_obstruction(c);
  if (c.command == "list") return cmd_list(c);
  throw UsageError("unknown command '" + c.command + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"curvlab: curvature tensors, canonical classes and warped constructions"};
  app.require_subcommand(1);
  auto* tensors = app.add_subcommand("tensors", "dump curvature and weighted tensors at a point");
  add_common(tensors, c, true);
  tensors->add_option("--depth", c.depth, "covariant derivative depth (0-3)");
  tensors->add_option("--point", c.point, "chart point, comma separated")->delimiter(',');
  auto* classify = app.add_subcommand("classify", "membership verdicts by residual norms");
  add_common(classify, c, true);
  classify->add_option("--class", c.classes, "class name, repeatable");
  classify->add_option("--depth", c.depth, "curvature depth (>= 1)");
  auto* identities = app.add_subcommand("identities", "tensor identity suite");
  add_common(identities, c, true);
  auto* construct = app.add_subcommand("construct", "warped product examples");
  add_common(construct, c, false);
  construct->add_option("--example", c.example, "gaussian or periodic")->check(CLI::IsMember({"gaussian", "periodic"}));
  construct->add_option("--k", c.k, "fiber scalar curvature (periodic)");
  construct->add_option("--eps", c.eps, "epsilon (periodic)");
  construct->add_option("--C", c.C, "energy constant C (periodic)");
  construct->add_option("--amplitude", c.amplitude, "initial offset as a fraction of phi* (periodic)");
  construct->add_option("--nodes", c.nodes, "grid nodes")->check(CLI::Range(3, 100000));
  construct->add_option("--step", c.step, "initial RK4 step (periodic)")->check(CLI::PositiveNumber);
  construct->add_option("--plot", c.plot, "prefix for two-column data files");
  auto* obstruction = app.add_subcommand("obstruction", "integral identities on round spheres");
  add_common(obstruction, c, true);
  obstruction->add_option("--which", c.which, "bochner, kazdan-warner, nongradient-kw or signature")
      ->required()
      ->check(CLI::IsMember({"bochner", "kazdan-warner", "nongradient-kw", "signature"}));
  obstruction->add_option("--nodes", c.nodes, "quadrature nodes per axis")->check(CLI::Range(1, 4096));
  auto* list = app.add_subcommand("list", "catalog geometries and class names");
  list->add_flag("--json", c.json, "emit JSON");

  std::vector<std::string> argv_store = {"curvlab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  c.command = app.get_subcommands().front()->get_name();

  auto emit_error = [&](const json& e) {
    if (c.json) {
      out << e.dump(2) << "\n";
    } else {
      const json& body = e["error"];
      err << "error (" << body["kind"].get<std::string>() << ")";
      if (body.contains("path")) err << " at " << body["path"].get<std::string>();
      err << ": " << body["message"].get<std::string>() << "\n";
    }
    return kExitError;
  };
  CommandResult result;
  try {
    result = run_command(c);
  } catch (const SpecError& e) {
    return emit_error(error_json("spec", e.what(), e.path()));
  } catch (const UsageError& e) {
    return emit_error(error_json("usage", e.what()));
  } catch (const std::invalid_argument& e) {
    return emit_error(error_json("input", e.what()));
  } catch (const std::domain_error& e) {
    return emit_error(error_json("domain", e.what()));
  } catch (const std::exception& e) {
    return emit_error(error_json("internal", e.what()));
  }

  std::string body;
  if (c.json) {
    const json envelope = {{"command", c.command}, {"passed", result.passed}, {"report", result.report}};
    body = envelope.dump(2) + "\n";
  } else {
    body = result.text + (result.passed ? "result: PASS\n" : "result: FAIL\n");
  }
  if (c.out.empty()) {
    out << body;
  } else {
    std::ofstream os(c.out);
    if (!os) return emit_error(error_json("io", "cannot write " + c.out));
    os << body;
  }
  return result.passed ? kExitPass : kExitFail;
}

}  // namespace curvlab
