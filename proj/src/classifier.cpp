#include "curvlab/classifier.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curvlab {

namespace {

using C = ClassId;

double nrm(const TensorD& t, const TensorD& g_inv) { return norm(t, g_inv); }

/// v^t T_{t...}
TensorD contract_first(const TensorD& v_up, const TensorD& t) {
  const int n = t.dim();
  TensorD out(n, t.rank() - 1, 0.0);
  const std::size_t block = out.size();
  for (int a = 0; a < n; ++a)
    for (std::size_t k = 0; k < block; ++k) out.at_flat(k) += v_up(a) * t.at_flat(a * block + k);
  return out;
}

/// Uniform view of the weighted tensors of one family at one point.
struct View {
  const CurvaturePack* pack;
  const TensorD* ric_w;
  double scal_w;
  const TensorD* nabla_ric_w;
  const TensorD* nabla_riem_w;
  const TensorD* d_tensor;
  TensorD v_up;             // f^i, X^i or 0
  TensorD div_a;            // div A^X, zero otherwise
  double extra_norm;        // |Hess f| or |L_X g| / 2
  double extra_nabla_norm;  // |nabla Hess f| or |nabla nabla X|
  const TensorD* div_kn;
  const TensorD* div_minus;
};

View view_of(const PointData& d, const FPack& fp) {
  const CurvaturePack& pk = d.pack;
  View v{&pk,
         &fp.ric_f,
         fp.scal_f,
         &fp.nabla_ric_f,
         &fp.nabla_riem_f,
         &fp.d_tensor,
         fp.grad_f,
         TensorD(pk.dim, 1, 0.0),
         nrm(fp.hess, pk.g_inv),
         fp.third_derivative.empty() ? 0.0 : nrm(fp.third_derivative, pk.g_inv),
         &fp.div_einstein_kn,
         &fp.div_ric_minus_scal};
  return v;
}

View view_of(const PointData& d, const XPack& xp) {
  const CurvaturePack& pk = d.pack;
  View v{&pk,
         &xp.ric_x,
         xp.scal_x,
         &xp.nabla_ric_x,
         &xp.nabla_riem_x,
         &xp.d_tensor,
         xp.x_up,
         xp.div_a,
         0.5 * nrm(xp.lie, pk.g_inv),
         nrm(xp.nabla2_x, pk.g_inv),
         &xp.div_einstein_kn,
         &xp.div_ric_minus_scal};
  return v;
}

const TensorD& need(const TensorD& t, const char* what) {
  if (t.empty()) throw std::invalid_argument(std::string(what) + " is unavailable; raise the depth");
  return t;
}

double einstein_residual(const View& v, double& lambda) {
  const CurvaturePack& pk = *v.pack;
  lambda = v.scal_w / pk.dim;
  return normalized(nrm(*v.ric_w - pk.g * lambda, pk.g_inv), {nrm(pk.ric, pk.g_inv), v.extra_norm});
}

double weyl_residual(const View& v) {
  const CurvaturePack& pk = *v.pack;
  if (pk.dim <= 3) return 0.0;  // W vanishes identically
  return normalized(nrm(pk.weyl, pk.g_inv), {nrm(pk.riem, pk.g_inv)});
}

double ls_residual(const View& v) {
  const CurvaturePack& pk = *v.pack;
  return normalized(nrm(need(*v.nabla_riem_w, "nabla Riem"), pk.g_inv),
                    {nrm(need(pk.nabla_riem, "nabla Riem"), pk.g_inv), v.extra_nabla_norm});
}

double pr_residual(const View& v) {
  const CurvaturePack& pk = *v.pack;
  return normalized(nrm(need(*v.nabla_ric_w, "nabla Ric"), pk.g_inv), {nrm(pk.nabla_ric, pk.g_inv), v.extra_nabla_norm});
}

double codazzi_of(const View& v) {
  const CurvaturePack& pk = *v.pack;
  const TensorD& nr = need(*v.nabla_ric_w, "nabla Ric");
  return normalized(nrm(nr - permuted(nr, {0, 2, 1}), pk.g_inv), {nrm(pk.nabla_ric, pk.g_inv), v.extra_nabla_norm});
}

/// grad R - 2 Ric(v) - div A
double y_primary(const View& v) {
  const CurvaturePack& pk = *v.pack;
  const TensorD& dr = need(pk.grad_scal, "grad R");
  const TensorD ric_v = contract_first(v.v_up, pk.ric);
  const TensorD y = dr - ric_v * 2.0 - v.div_a;
  return normalized(nrm(y, pk.g_inv), {nrm(dr, pk.g_inv), 2.0 * nrm(ric_v, pk.g_inv), nrm(v.div_a, pk.g_inv)});
}

double y_divergence(const View& v) {
  const CurvaturePack& pk = *v.pack;
  const TensorD ric_v = contract_first(v.v_up, pk.ric);
  return normalized(nrm(need(*v.div_minus, "div(Ric - R g)"), pk.g_inv),
                    {0.5 * nrm(pk.grad_scal, pk.g_inv), nrm(ric_v, pk.g_inv), 0.5 * nrm(v.div_a, pk.g_inv)});
}

double kn_divergence(const View& v) {
  const CurvaturePack& pk = *v.pack;
  return normalized(nrm(need(*v.div_kn, "div(E o g)"), pk.g_inv), {nrm(pk.nabla_ric, pk.g_inv), v.extra_nabla_norm});
}

/// C + v_t W_tijk = D together with the gradient relation.
double cotton_weyl_residual(const View& v) {
  const CurvaturePack& pk = *v.pack;
  const TensorD& c = need(pk.cotton, "Cotton tensor");
  const TensorD vw = contract_first(v.v_up, pk.weyl);
  const TensorD& d = *v.d_tensor;
  const double first =
      normalized(nrm(c + vw - d, pk.g_inv), {nrm(c, pk.g_inv), nrm(vw, pk.g_inv), nrm(d, pk.g_inv)});
  return std::max(first, y_primary(v));
}

void require_dim(ClassId cls, int n, int lo) {
  if (n < lo)
    throw std::invalid_argument("class " + std::string(class_name(cls)) + " needs dimension >= " + std::to_string(lo));
}

/// `fp` is the potential pack for the f family and null otherwise.
ClassResidual residual_for(ClassId cls, const View& v, const FPack* fp, bool classical) {
  const int n = v.pack->dim;
  ClassResidual out;
  double lambda = 0.0;
  switch (cls) {
    case C::SFf: case C::SFx: case C::SF: {
      const double e = einstein_residual(v, lambda);
      out.formulations.push_back({"W = 0 and Ric = lambda g", std::max(weyl_residual(v), e)});
      out.lambda = lambda;
      break;
    }
    case C::Ef: case C::Ex: case C::E:
      out.formulations.push_back({"Ric = lambda g", einstein_residual(v, lambda)});
      out.lambda = lambda;
      break;
    case C::LSf: case C::LSx: case C::LS:
      require_dim(cls, n, 3);
      out.formulations.push_back({"nabla Riem = 0", ls_residual(v)});
      break;
    case C::LSEf: case C::LSEx: case C::LSE: {
      require_dim(cls, n, 3);
      const double e = einstein_residual(v, lambda);
      out.formulations.push_back({"nabla Riem = 0 and Ric = lambda g", std::max(ls_residual(v), e)});
      out.lambda = lambda;
      break;
    }
    case C::PRf: case C::PRx: case C::PR:
      out.formulations.push_back({"nabla Ric = 0", pr_residual(v)});
      break;
    case C::HCf: case C::HCfLambda: case C::HC: {
      const CurvaturePack& pk = *v.pack;
      if (classical) {
        out.formulations.push_back({"div Riem = 0", normalized(nrm(need(pk.div_riem, "div Riem"), pk.g_inv),
                                                               {nrm(pk.nabla_riem, pk.g_inv)})});
      } else {
        // The e^{-f} factor is dropped: it never vanishes and only rescales the residual.
        out.formulations.push_back(
            {"div(e^{-f} Riem) = 0",
             normalized(nrm(need(fp->div_riem_f, "div Riem_f"), pk.g_inv),
                        {nrm(pk.div_riem, pk.g_inv), nrm(fp->grad_f, pk.g_inv) * nrm(pk.riem, pk.g_inv)})});
      }
      out.formulations.push_back({"Ric Codazzi", codazzi_of(v)});
      if (n >= 3) out.formulations.push_back({"C + W(grad f) = D and grad R = 2 Ric(grad f)", cotton_weyl_residual(v)});
      // In dimension 2 E is trace-free and div(E o g) vanishes identically.
      if (n >= 3) out.formulations.push_back({"div(E o g) = 0", kn_divergence(v)});
      if (cls == C::HCfLambda) out.lambda = v.scal_w / n;
      break;
    }
    case C::HCx:
      if (n >= 3) out.formulations.push_back({"div(E_X o g) = 0", kn_divergence(v)});
      out.formulations.push_back({"Ric_X Codazzi", codazzi_of(v)});
      if (n >= 3) out.formulations.push_back({"C + W(X) = D^X and grad R = 2 Ric(X) + div A^X", cotton_weyl_residual(v)});
      break;
    case C::Yf: case C::Y: {
      out.formulations.push_back({"grad R = 2 Ric(grad f)", y_primary(v)});
      out.formulations.push_back({"div(Ric_f - R_f g) = 0", y_divergence(v)});
      if (fp) {
        const CurvaturePack& pk = *v.pack;
        const TensorD ric_v = contract_first(fp->grad_f, pk.ric);
        out.formulations.push_back({"div(e^{-f} Ric) = 0", normalized(nrm(fp->div_ric_f, pk.g_inv),
                                                                      {0.5 * nrm(pk.grad_scal, pk.g_inv), nrm(ric_v, pk.g_inv)})});
      }
      break;
    }
    case C::Yx:
      out.formulations.push_back({"grad R = 2 Ric(X) + div A^X", y_primary(v)});
      out.formulations.push_back({"div(Ric_X - R_X g) = 0", y_divergence(v)});
      break;
  }
  return out;
}

}  // namespace

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::NonMember: return "non-member";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double ClassifyOptions::effective_threshold() const {
  if (threshold) return *threshold;
  return depth >= 3 ? kDefaultThresholdDepth3 : kDefaultThreshold;
}

Verdict decide(double score, double threshold) {
  if (!(score == score)) return Verdict::NonMember;
  if (score <= threshold) return Verdict::Member;
  if (score <= 10.0 * threshold) return Verdict::Inconclusive;
  return Verdict::NonMember;
}

PointData point_data(const CatalogEntry& geometry, const Point& p, int depth) {
  if (depth < 1) throw std::invalid_argument("classification needs depth >= 1");
  PointData d{curvature_at(geometry.metric, p, depth), {}, {}, std::nullopt};
  const int n = d.pack.dim;
  d.zero = f_pack(d.pack, Jet::constant(0.0, n, depth + 2));
  d.fpack = geometry.potential ? f_pack(d.pack, *geometry.potential) : d.zero;
  if (geometry.vector_field) d.xpack = x_pack(d.pack, *geometry.vector_field);
  return d;
}

ClassResidual class_residual(ClassId cls, const PointData& data) {
  switch (class_family(cls)) {
    case ClassFamily::Potential:
      return residual_for(cls, view_of(data, data.fpack), &data.fpack, false);
    case ClassFamily::VectorField:
      if (!data.xpack) throw std::invalid_argument("class " + std::string(class_name(cls)) + " needs a vector field");
      return residual_for(cls, view_of(data, *data.xpack), nullptr, false);
    case ClassFamily::Classical:
      return residual_for(cls, view_of(data, data.zero), nullptr, true);
  }
  throw std::logic_error("unreachable class family");
}

std::vector<ClassId> applicable_classes(const CatalogEntry& geometry) {
  std::vector<ClassId> out;
  const int n = geometry.metric.dim();
  for (ClassId c : kAllClasses) {
    const ClassFamily fam = class_family(c);
    if (fam == ClassFamily::Potential && !geometry.potential) continue;
    if (fam == ClassFamily::VectorField && !geometry.vector_field) continue;
    if (n < 3 && (c == C::LSf || c == C::LSEf || c == C::LSx || c == C::LSEx || c == C::LS || c == C::LSE)) continue;
    out.push_back(c);
  }
  return out;
}

namespace {

void check_applicable(const CatalogEntry& g, ClassId cls) {
  const ClassFamily fam = class_family(cls);
  if (fam == ClassFamily::Potential && !g.potential)
    throw std::invalid_argument("class " + std::string(class_name(cls)) + " needs a potential; geometry " + g.name +
                                " has none");
  if (fam == ClassFamily::VectorField && !g.vector_field)
    throw std::invalid_argument("class " + std::string(class_name(cls)) + " needs a vector field; geometry " + g.name +
                                " has none");
}

void summarize(Formulation& f) {
  f.max = 0.0;
  f.mean = 0.0;
  for (double r : f.residuals) {
    f.max = std::max(f.max, r);
    f.mean += r;
  }
  if (!f.residuals.empty()) f.mean /= static_cast<double>(f.residuals.size());
}

}  // namespace

std::vector<MembershipReport> classify_many(const CatalogEntry& geometry, const std::vector<ClassId>& classes,
                                            const ClassifyOptions& opts) {
  if (opts.count < 1) throw std::invalid_argument("sample count must be at least 1");
  return classify_at(geometry, classes, sample_points(geometry.metric.chart, opts.count, opts.seed), opts);
}

std::vector<MembershipReport> classify_at(const CatalogEntry& geometry, const std::vector<ClassId>& classes,
                                          const std::vector<Point>& points, const ClassifyOptions& opts) {
  if (points.empty()) throw std::invalid_argument("classification needs at least one point");
  for (ClassId c : classes) check_applicable(geometry, c);
  const double thr = opts.effective_threshold();

  std::vector<MembershipReport> reports(classes.size());
  std::vector<std::vector<double>> lambdas(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    MembershipReport& r = reports[c];
    r.geometry = geometry.name;
    r.cls = classes[c];
    r.seed = opts.seed;
    r.count = static_cast<int>(points.size());
    r.depth = opts.depth;
    r.threshold = thr;
    r.points = points;
  }
  for (const Point& p : points) {
    const PointData data = point_data(geometry, p, opts.depth);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const ClassResidual cr = class_residual(classes[c], data);
      MembershipReport& r = reports[c];
      if (r.formulations.empty())
        for (const auto& [name, value] : cr.formulations) r.formulations.push_back({name, {}, 0.0, 0.0, Verdict::Inconclusive});
      for (std::size_t k = 0; k < cr.formulations.size(); ++k) r.formulations[k].residuals.push_back(cr.formulations[k].second);
      if (cr.lambda) lambdas[c].push_back(*cr.lambda);
    }
  }

  for (std::size_t c = 0; c < classes.size(); ++c) {
    MembershipReport& r = reports[c];
    double lambda_score = 0.0;
    if (!lambdas[c].empty()) {
      const auto& ls = lambdas[c];
      double mean = 0.0;
      for (double l : ls) mean += l;
      mean /= static_cast<double>(ls.size());
      double var = 0.0;
      for (double l : ls) var += (l - mean) * (l - mean);
      r.lambda_estimate = mean;
      r.lambda_stddev = std::sqrt(var / static_cast<double>(ls.size())) / (1.0 + std::abs(mean));
      lambda_score = *r.lambda_stddev;
    }
    for (auto& f : r.formulations) {
      summarize(f);
      f.verdict = decide(std::max(f.max, lambda_score), thr);
    }
    const Formulation& primary = r.formulations.front();
    r.residuals = primary.residuals;
    r.max = primary.max;
    r.mean = primary.mean;
    r.verdict = primary.verdict;
    for (std::size_t a = 0; a < r.formulations.size(); ++a)
      for (std::size_t b = a + 1; b < r.formulations.size(); ++b) {
        const Verdict va = r.formulations[a].verdict;
        const Verdict vb = r.formulations[b].verdict;
        if ((va == Verdict::Member && vb == Verdict::NonMember) || (va == Verdict::NonMember && vb == Verdict::Member))
          r.disagreements.push_back({r.formulations[a].name, r.formulations[b].name});
      }
  }
  return reports;
}

MembershipReport classify(const CatalogEntry& geometry, ClassId cls, const ClassifyOptions& opts) {
  return classify_many(geometry, {cls}, opts).front();
}

LatticeReport lattice_check(const CatalogEntry& geometry, const ClassifyOptions& opts) {
  LatticeReport out;
  out.geometry = geometry.name;
  const auto classes = applicable_classes(geometry);
  out.reports = classify_many(geometry, classes, opts);
  for (const auto& r : out.reports)
    if (r.verdict == Verdict::Member) out.members.push_back(r.cls);
  upward_closed(out.members, &out.violations);

  if (geometry.potential) {
    out.potential_constant = true;
    for (const auto& p : sample_points(geometry.metric.chart, opts.count, opts.seed)) {
      const Jet f = geometry.potential->eval(p, 1);
      for (int i = 0; i < geometry.metric.dim(); ++i)
        if (f.gradient(i) != 0.0) out.potential_constant = false;
    }
  }
  if (out.potential_constant) {
    auto verdict_of = [&out](ClassId c) -> std::optional<Verdict> {
      for (const auto& r : out.reports)
        if (r.cls == c) return r.verdict;
      return std::nullopt;
    };
    for (const auto& r : out.reports) {
      if (class_family(r.cls) != ClassFamily::Potential) continue;
      const ClassId counterpart = classical_counterpart(r.cls);
      const auto v = verdict_of(counterpart);
      // HC_f^lambda adds constancy of R, which HC does not ask for.
      if (v && r.cls != C::HCfLambda && *v != r.verdict) out.trivial_reduction_mismatches.push_back({r.cls, counterpart});
    }
  }
  return out;
}

WarpedStructureReport warped_structure_diagnostic(const CatalogEntry& geometry, const Point& p, double threshold) {
  if (!geometry.potential) throw std::invalid_argument("warped structure diagnostic needs a potential");
  const CurvaturePack pack = curvature_at(geometry.metric, p, 0);
  const FPack fp = f_pack(pack, *geometry.potential);
  const int n = pack.dim;
  WarpedStructureReport rep;
  rep.point = p;
  rep.grad_norm = norm(fp.df, pack.g_inv);
  rep.weyl_norm = n >= 4 ? norm(pack.weyl, pack.g_inv) : 0.0;
  if (rep.grad_norm <= threshold) throw std::domain_error("critical point of the potential");
  if (rep.weyl_norm > threshold) throw std::domain_error("metric is not locally conformally flat at the point");

  const Eigen::MatrixXd g = to_matrix(pack.g);
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  // Columns of E form a g-orthonormal frame.
  const Eigen::MatrixXd e = llt.matrixL().transpose().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd ric = e.transpose() * to_matrix(pack.ric) * e;
  const Eigen::MatrixXd ric_sym = 0.5 * (ric + ric.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ric_sym);
  rep.eigenvalues = es.eigenvalues();

  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i) grad(i) = fp.grad_f(i);
  // Frame components of the vector: E^{-1} v = L^T v.
  Eigen::VectorXd nu = llt.matrixL().transpose() * grad;
  nu.normalize();
  const Eigen::VectorXd r_nu = ric_sym * nu;
  rep.mu_normal = nu.dot(r_nu);
  rep.eigenvector_residual = (r_nu - rep.mu_normal * nu).norm();

  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - nu * nu.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ps(proj);
  // Eigenvalue 0 belongs to nu; the remaining n - 1 columns span its complement.
  const Eigen::MatrixXd q = ps.eigenvectors().rightCols(n - 1);
  const Eigen::VectorXd tangent = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q.transpose() * ric_sym * q).eigenvalues();
  rep.mu_tangent = tangent.mean();
  rep.tangent_spread = tangent.maxCoeff() - tangent.minCoeff();
  rep.trace_relation = std::abs(rep.mu_tangent - (pack.scal - rep.mu_normal) / (n - 1));
  const double scale = 1.0 + rep.eigenvalues.cwiseAbs().maxCoeff();
  rep.degenerate = (rep.eigenvalues.maxCoeff() - rep.eigenvalues.minCoeff()) <= threshold * scale;
  rep.pattern_holds = rep.eigenvector_residual <= threshold * scale && rep.tangent_spread <= threshold * scale &&
                      rep.trace_relation <= threshold * scale;
  return rep;
}

ConformalYfReport yf_conformal_check(const MetricField& g, const ScalarPotential& u, const ScalarPotential& f,
                                     std::uint64_t seed, int count, double threshold) {
  if (!(g.chart == u.chart) || !(g.chart == f.chart)) throw std::invalid_argument("conformal check needs a shared chart");
  CatalogEntry rescaled;
  rescaled.name = "conformal";
  rescaled.metric = conformal_rescale(g, u);
  rescaled.potential = f;

  ConformalYfReport rep;
  rep.threshold = threshold;
  double worst = 0.0;
  for (const Point& p : sample_points(g.chart, count, seed)) {
    ConformalYfPoint out;
    out.point = p;
    out.rescaled_residual = class_residual(C::Yf, point_data(rescaled, p, 1)).formulations.front().second;
    worst = std::max(worst, out.rescaled_residual);

    const CurvaturePack pack = curvature_at(g, p, 1);
    const Connection& conn = pack.jets->conn;
    const int n = pack.dim;
    const TensorD& gi = pack.g_inv;
    const Jet uj = u.eval(p, 3);
    const TensorJ du = differential(uj);
    const TensorJ hess_u = covariant_derivative(conn, du);
    const Jet lap_u = trace(hess_u, conn.inverse_metric(1), 0, 1).at_flat(0);
    const TensorD grad_lap = values(differential(lap_u));
    const TensorD du_v = values(du);
    const TensorD hu = values(hess_u);
    const TensorD u_up = raise_slot(du_v, gi, 0);
    const TensorD df = values(differential(f.eval(p, 3)));
    const TensorD f_up = raise_slot(df, gi, 0);
    const double grad_u_sq = norm_sq(du_v, gi);
    double uf = 0.0;
    for (int i = 0; i < n; ++i) uf += du_v(i) * f_up(i);
    const TensorD hu_u = contract_first(u_up, hu);
    const TensorD hu_f = contract_first(f_up, hu);
    const TensorD ric_f = contract_first(f_up, pack.ric);
    const double lap = lap_u.value();
    const double n1 = n - 1.0, n2 = n - 2.0;
    const TensorD lhs = grad_lap + hu_u * n2 - du_v * (2.0 * lap + n2 * grad_u_sq - pack.scal / n1) -
                        pack.grad_scal * (1.0 / (2.0 * n1));
    const TensorD rhs = hu_f * (n2 / n1) - ric_f + df * ((lap + n2 * grad_u_sq) / n1) - du_v * (n2 / n1 * uf);
    out.pde_residual = normalized(norm(lhs - rhs, gi), {norm(lhs, gi), norm(rhs, gi)});
    out.vanish_together = (out.rescaled_residual <= threshold) == (out.pde_residual <= threshold);
    rep.points.push_back(out);
  }
  rep.rescaled_verdict = decide(worst, threshold);
  return rep;
}

namespace {

nlohmann::json point_json(const Point& p) { return nlohmann::json(p); }

}  // namespace

nlohmann::json to_json(const MembershipReport& r) {
  nlohmann::json j;
  j["geometry"] = r.geometry;
  j["class"] = std::string(class_name(r.cls));
  j["seed"] = r.seed;
  j["count"] = r.count;
  j["depth"] = r.depth;
  j["threshold"] = r.threshold;
  if (r.lambda_estimate) j["lambda_estimate"] = *r.lambda_estimate;
  if (r.lambda_stddev) j["lambda_stddev"] = *r.lambda_stddev;
  nlohmann::json res = nlohmann::json::array();
  for (std::size_t k = 0; k < r.points.size(); ++k) res.push_back({{"point", point_json(r.points[k])}, {"value", r.residuals[k]}});
  j["residuals"] = res;
  j["max"] = r.max;
  j["mean"] = r.mean;
  j["verdict"] = std::string(verdict_name(r.verdict));
  nlohmann::json forms = nlohmann::json::array();
  for (const auto& f : r.formulations)
    forms.push_back({{"name", f.name}, {"max", f.max}, {"mean", f.mean}, {"verdict", std::string(verdict_name(f.verdict))}});
  j["formulations"] = forms;
  nlohmann::json dis = nlohmann::json::array();
  for (const auto& [a, b] : r.disagreements) dis.push_back({a, b});
  j["disagreements"] = dis;
  return j;
}

nlohmann::json to_json(const LatticeReport& r) {
  nlohmann::json j;
  j["geometry"] = r.geometry;
  nlohmann::json matrix = nlohmann::json::object();
  for (const auto& rep : r.reports) matrix[std::string(class_name(rep.cls))] = std::string(verdict_name(rep.verdict));
  j["verdicts"] = matrix;
  nlohmann::json members = nlohmann::json::array();
  for (ClassId c : r.members) members.push_back(std::string(class_name(c)));
  j["members"] = members;
  nlohmann::json viol = nlohmann::json::array();
  for (const auto& [a, b] : r.violations) viol.push_back({std::string(class_name(a)), std::string(class_name(b))});
  j["violations"] = viol;
  j["potential_constant"] = r.potential_constant;
  nlohmann::json mism = nlohmann::json::array();
  for (const auto& [a, b] : r.trivial_reduction_mismatches) mism.push_back({std::string(class_name(a)), std::string(class_name(b))});
  j["trivial_reduction_mismatches"] = mism;
  return j;
}

nlohmann::json to_json(const WarpedStructureReport& r) {
  return {{"point", point_json(r.point)},
          {"grad_norm", r.grad_norm},
          {"weyl_norm", r.weyl_norm},
          {"eigenvalues", std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size())},
          {"mu_normal", r.mu_normal},
          {"mu_tangent", r.mu_tangent},
          {"eigenvector_residual", r.eigenvector_residual},
          {"tangent_spread", r.tangent_spread},
          {"trace_relation", r.trace_relation},
          {"degenerate", r.degenerate},
          {"pattern_holds", r.pattern_holds}};
}

nlohmann::json to_json(const ConformalYfReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"point", point_json(p.point)},
                   {"rescaled_residual", p.rescaled_residual},
                   {"pde_residual", p.pde_residual},
                   {"vanish_together", p.vanish_together}});
  return {{"threshold", r.threshold}, {"rescaled_verdict", std::string(verdict_name(r.rescaled_verdict))}, {"points", pts}};
}

}  // namespace curvlab
