#include "curvlab/identities.hpp"

#include <algorithm>
#include <map>

#include "curvlab/curvature.hpp"
#include "curvlab/potential_tensors.hpp"

namespace curvlab {

namespace {

class Recorder {
 public:
  Recorder(double tol, double tol3) : tol_(tol), tol3_(tol3) {}

  void add(const std::string& name, double residual, bool depth3 = false) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      index_[name] = checks_.size();
      checks_.push_back({name, 0.0, depth3 ? tol3_ : tol_, 0});
      it = index_.find(name);
    }
    IdentityCheck& c = checks_[it->second];
    // NaN must fail, so it replaces any finite maximum.
    if (!(residual <= c.max_residual)) c.max_residual = residual;
    ++c.evaluated;
  }

  std::vector<IdentityCheck> take() { return std::move(checks_); }

 private:
  double tol_;
  double tol3_;
  std::map<std::string, std::size_t> index_;
  std::vector<IdentityCheck> checks_;
};

double rel(const TensorD& raw, const TensorD& g_inv, std::initializer_list<double> ingredients) {
  return normalized(norm(raw, g_inv), ingredients);
}

double max_abs(const TensorD& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

// Largest entry over every pairwise trace.
double max_trace(const TensorD& t, const TensorD& g_inv) {
  double m = 0.0;
  for (int a = 0; a < t.rank(); ++a)
    for (int b = a + 1; b < t.rank(); ++b) m = std::max(m, max_abs(trace(t, g_inv, a, b)));
  return m;
}


ScalarPotential generic_potential(const Chart& chart) {
  return {chart, [](std::span<const Jet> x) {
            const std::size_t n = x.size();
            return 0.3 * x[0] * x[1] + sin(x[n - 1]) + 0.2 * exp(0.5 * x[n / 2]);
          }};
}

}  // namespace

bool IdentityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed(); });
}

IdentityReport run_identity_suite(const CatalogEntry& geometry, const IdentityOptions& opts) {
  const int n = geometry.metric.dim();
  const int depth = n >= 4 ? 3 : 2;
  Recorder rec(opts.tolerance, opts.tolerance_depth3);
  const ScalarPotential generic = generic_potential(geometry.metric.chart);

  for (const Point& p : sample_points(geometry.metric.chart, opts.count, opts.seed)) {
    const CurvaturePack pk = curvature_at(geometry.metric, p, depth);
    const TensorD& gi = pk.g_inv;
    const TensorD& rm = pk.riem;
    const double riem_n = norm(rm, gi);

    rec.add("riemann skew in first pair", rel(rm + permuted(rm, {1, 0, 2, 3}), gi, {riem_n}));
    rec.add("riemann skew in last pair", rel(rm + permuted(rm, {0, 1, 3, 2}), gi, {riem_n}));
    rec.add("riemann pair symmetry", rel(rm - permuted(rm, {2, 3, 0, 1}), gi, {riem_n}));
    rec.add("first bianchi", rel(rm + permuted(rm, {0, 2, 3, 1}) + permuted(rm, {0, 3, 1, 2}), gi, {riem_n}));
    rec.add("ricci symmetry", rel(pk.ric - permuted(pk.ric, {1, 0}), gi, {norm(pk.ric, gi)}));
    {
      const TensorD r_full = trace(trace(rm, gi, 1, 3), gi, 0, 1);
      rec.add("scalar curvature contraction", normalized(r_full.at_flat(0) - pk.scal, {pk.scal}));
    }
    {
      const TensorD div_ric = trace(pk.nabla_ric, gi, 0, 2);
      rec.add("contracted second bianchi", rel(div_ric * 2.0 - pk.grad_scal, gi, {norm(pk.grad_scal, gi), 2.0 * norm(div_ric, gi)}));
    }
    {
      const auto kn = kn_divergence_check(pk.jets->conn, pk.jets->ric);
      rec.add("kulkarni-nomizu divergence", kn.residual);
    }

    if (n >= 3) {
      const TensorD& w = pk.weyl;
      rec.add("weyl trace-free", normalized(max_trace(w, gi), {riem_n}));
      if (n == 3) rec.add("weyl vanishes in dimension 3", normalized(norm(w, gi), {riem_n}));
      const TensorD& c = pk.cotton;
      const double cn = norm(c, gi);
      const double cotton_scale = norm(pk.nabla_ric, gi);
      rec.add("cotton skew", rel(c + permuted(c, {0, 2, 1}), gi, {cn, cotton_scale}));
      rec.add("cotton cyclic sum", rel(c + permuted(c, {1, 2, 0}) + permuted(c, {2, 0, 1}), gi, {cn, cotton_scale}));
      rec.add("cotton trace-free", normalized(max_trace(c, gi), {cn, cotton_scale}));
      const TensorD div_c = trace(pk.nabla_cotton, gi, 0, 3);
      rec.add("cotton null divergence", rel(div_c, gi, {norm(pk.nabla_cotton, gi)}));
    }
    if (n >= 4) {
      const TensorD cw = cotton_via_weyl(pk);
      rec.add("cotton via weyl", rel(pk.cotton - cw, gi, {norm(pk.cotton, gi), norm(cw, gi)}));
      const TensorD& b = pk.bach;
      const double bn = norm(b, gi);
      rec.add("bach symmetry", rel(b - permuted(b, {1, 0}), gi, {bn}));
      rec.add("bach trace-free", normalized(trace(b, gi, 0, 1).at_flat(0), {bn}));
      const TensorD expected = bach_divergence_expected(pk);
      if (n == 4) rec.add("bach divergence factor vanishes in dimension 4", max_abs(expected));
      rec.add("bach divergence", rel(pk.div_bach - expected, gi,
                                     {norm(pk.ric, gi) * norm(pk.cotton, gi), norm(pk.div_bach, gi)}),
              true);
    }

    if (n >= 3) {
      std::vector<const ScalarPotential*> potentials{&generic};
      if (geometry.potential) potentials.push_back(&*geometry.potential);
      const double ric_dev =
          normalized(norm(pk.ric - pk.g * (pk.scal / n), gi), {norm(pk.ric, gi)});
      for (const ScalarPotential* f : potentials) {
        const FPack fp = f_pack(pk, *f);
        const TensorD& d = fp.d_tensor;
        const double scale = norm(pk.ric, gi) * norm(fp.df, gi) + std::abs(pk.scal) * norm(fp.df, gi);
        rec.add("D skew", rel(d + permuted(d, {0, 2, 1}), gi, {norm(d, gi), scale}));
        rec.add("D trace-free", normalized(max_trace(d, gi), {norm(d, gi), scale}));
        if (ric_dev <= 1e-12) rec.add("D vanishes on Einstein metrics", normalized(norm(d, gi), {scale}));
        const TensorD rebuilt = pk.weyl + kulkarni_nomizu(fp.schouten_f, pk.g) * (1.0 / (n - 2));
        rec.add("weighted riemann decomposition", rel(fp.riem_f - rebuilt, gi, {norm(fp.riem_f, gi)}));
        const TensorD lhs = trace(kulkarni_nomizu(fp.einstein_f, pk.g), gi, 1, 3);
        const TensorD rhs = (fp.ric_f - pk.g * fp.scal_f) * (n - 2.0);
        rec.add("f-einstein trace identity", rel(lhs - rhs, gi, {norm(rhs, gi)}));
      }
    }
  }

  IdentityReport rep;
  rep.geometry = geometry.name;
  rep.dim = n;
  rep.seed = opts.seed;
  rep.count = opts.count;
  rep.checks = rec.take();
  return rep;
}

nlohmann::json to_json(const IdentityReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"max_residual", c.max_residual},
                      {"tolerance", c.tolerance},
                      {"points", c.evaluated},
                      {"passed", c.passed()}});
  return {{"geometry", r.geometry}, {"dim", r.dim}, {"seed", r.seed}, {"count", r.count}, {"passed", r.passed()},
          {"checks", checks}};
}

}  // namespace curvlab
