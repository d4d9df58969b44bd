#include "curvlab/spec_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "curvlab/expression.hpp"

namespace curvlab {

using nlohmann::json;

SpecError::SpecError(const std::string& path, const std::string& message)
    : std::invalid_argument(path.empty() ? message : path + ": " + message), path_(path) {}

namespace {

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw SpecError(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw SpecError(path.empty() ? key : path + "." + key, "unknown field");
}

json params_of(const json& obj, const std::string& path) {
  if (!obj.contains("params")) return json::object();
  const json& p = obj.at("params");
  if (!p.is_object()) throw SpecError(path + ".params", "expected an object");
  return p;
}

std::string kind_of(const json& obj, const std::string& path) {
  check_keys(obj, path, {"kind", "params", "dim"});
  if (!obj.contains("kind") || !obj.at("kind").is_string()) throw SpecError(path + ".kind", "missing or not a string");
  return obj.at("kind").get<std::string>();
}

double number(const json& p, const char* key, const std::string& path, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number()) throw SpecError(path + "." + key, "expected a number");
  return p.at(key).get<double>();
}

Expression expression(const json& v, const std::string& path, int dim) {
  if (!v.is_string()) throw SpecError(path, "expected an expression string");
  Expression e = [&] {
    try {
      return Expression::parse(v.get<std::string>());
    } catch (const std::invalid_argument& err) {
      throw SpecError(path, err.what());
    }
  }();
  if (e.max_variable() > dim)
    throw SpecError(path, "uses x" + std::to_string(e.max_variable()) + " in dimension " + std::to_string(dim));
  return e;
}

std::vector<Expression> expression_list(const json& v, const std::string& path, int dim, int count) {
  if (!v.is_array() || static_cast<int>(v.size()) != count)
    throw SpecError(path, "expected an array of " + std::to_string(count) + " expressions");
  std::vector<Expression> out;
  for (int i = 0; i < count; ++i) out.push_back(expression(v[i], path + "[" + std::to_string(i) + "]", dim));
  return out;
}

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

Chart box(int n) { return Chart(std::vector<Interval>(n, {-1.0, 1.0}), 0.1); }

Chart parse_chart(const json& c, int dim) {
  check_keys(c, "chart", {"ranges", "margin"});
  if (!c.contains("ranges") || !c.at("ranges").is_array() || static_cast<int>(c.at("ranges").size()) != dim)
    throw SpecError("chart.ranges", "expected " + std::to_string(dim) + " [lo, hi] pairs");
  std::vector<Interval> ranges;
  for (std::size_t i = 0; i < c.at("ranges").size(); ++i) {
    const json& r = c.at("ranges")[i];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
      throw SpecError("chart.ranges[" + std::to_string(i) + "]", "expected [lo, hi]");
    ranges.push_back({r[0].get<double>(), r[1].get<double>()});
  }
  const double margin = number(c, "margin", "chart", 0.1);
  try {
    return Chart(std::move(ranges), margin);
  } catch (const std::invalid_argument& err) {
    throw SpecError("chart", err.what());
  }
}

struct Built {
  MetricField metric;
  std::optional<CatalogEntry> catalog;
};

Built build_metric(const json& m, const std::string& path, int dim) {
  const std::string kind = kind_of(m, path);
  const json p = params_of(m, path);
  const std::string pp = path + ".params";
  auto require_dim = [&](int lo) {
    if (dim < lo) throw SpecError(path, "kind " + kind + " needs dimension at least " + std::to_string(lo));
  };
  if (kind == "catalog") {
    check_keys(p, pp, {"name", "dim", "lambda"});
    if (!p.contains("name") || !p.at("name").is_string()) throw SpecError(pp + ".name", "missing or not a string");
    const int cdim = p.contains("dim") ? p.at("dim").get<int>() : dim;
    if (cdim != dim) throw SpecError(pp + ".dim", "does not match the spec dimension");
    try {
      CatalogEntry e = catalog_lookup(p.at("name").get<std::string>(), dim, number(p, "lambda", pp, 1.0));
      return {e.metric, e};
    } catch (const std::invalid_argument& err) {
      throw SpecError(pp, err.what());
    }
  }
  if (kind == "flat") {
    check_keys(p, pp, {});
    require_dim(2);
    return {flat_metric(box(dim)), {}};
  }
  if (kind == "sphere") {
    check_keys(p, pp, {"radius"});
    require_dim(2);
    const double r = number(p, "radius", pp, 1.0);
    if (!(r > 0.0)) throw SpecError(pp + ".radius", "must be positive");
    return {sphere_metric(dim, r), {}};
  }
  if (kind == "hyperbolic") {
    check_keys(p, pp, {});
    require_dim(2);
    return {hyperbolic_metric(dim), {}};
  }
  if (kind == "expression") {
    check_keys(p, pp, {"components", "diagonal"});
    require_dim(2);
    if (p.contains("components") == p.contains("diagonal"))
      throw SpecError(pp, "give exactly one of components or diagonal");
    std::vector<std::optional<Expression>> comps(dim * dim);
    if (p.contains("diagonal")) {
      const auto d = expression_list(p.at("diagonal"), pp + ".diagonal", dim, dim);
      for (int i = 0; i < dim; ++i) comps[i * dim + i] = d[i];
    } else {
      const json& rows = p.at("components");
      if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
        throw SpecError(pp + ".components", "expected " + std::to_string(dim) + " rows");
      for (int i = 0; i < dim; ++i) {
        const auto row = expression_list(rows[i], pp + ".components[" + std::to_string(i) + "]", dim, dim);
        for (int j = 0; j < dim; ++j) comps[i * dim + j] = row[j];
      }
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < i; ++j)
          if (strip(comps[i * dim + j]->text()) != strip(comps[j * dim + i]->text()))
            throw SpecError(pp + ".components[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                            "differs from its mirror entry; the metric must be symmetric");
    }
    return {MetricField{box(dim),
                        [comps, dim](std::span<const Jet> x) {
                          TensorJ g(dim, 2, constant_like(x[0], 0.0));
                          for (int i = 0; i < dim; ++i)
                            for (int j = i; j < dim; ++j)
                              if (comps[i * dim + j]) g(i, j) = g(j, i) = comps[i * dim + j]->evaluate(x);
                          return g;
                        }},
            {}};
  }
  if (kind == "conformal") {
    check_keys(p, pp, {"base", "u"});
    if (!p.contains("base")) throw SpecError(pp + ".base", "missing");
    if (!p.contains("u")) throw SpecError(pp + ".u", "missing");
    const MetricField base = build_metric(p.at("base"), pp + ".base", dim).metric;
    const Expression u = expression(p.at("u"), pp + ".u", dim);
    return {conformal_rescale(base, {base.chart, [u](std::span<const Jet> x) { return u.evaluate(x); }}), {}};
  }
  if (kind == "warped") {
    check_keys(p, pp, {"warping", "fiber", "interval"});
    require_dim(3);
    if (!p.contains("warping")) throw SpecError(pp + ".warping", "missing");
    if (!p.contains("fiber")) throw SpecError(pp + ".fiber", "missing");
    const Expression w = expression(p.at("warping"), pp + ".warping", 1);
    const MetricField fiber = build_metric(p.at("fiber"), pp + ".fiber", dim - 1).metric;
    Interval iv{-2.0, 2.0};
    if (p.contains("interval")) {
      const json& r = p.at("interval");
      if (!r.is_array() || r.size() != 2) throw SpecError(pp + ".interval", "expected [lo, hi]");
      iv = {r[0].get<double>(), r[1].get<double>()};
    }
    try {
      return {warped_product([w](const Jet& t) { return w.evaluate(std::span<const Jet>(&t, 1)); }, iv, fiber), {}};
    } catch (const std::invalid_argument& err) {
      throw SpecError(pp, err.what());
    }
  }
  if (kind == "product") {
    check_keys(p, pp, {"factors"});
    const json& f = p.value("factors", json());
    if (!f.is_array() || f.size() != 2) throw SpecError(pp + ".factors", "expected two factor metrics");
    std::vector<MetricField> parts;
    int total = 0;
    for (int k = 0; k < 2; ++k) {
      const std::string fp = pp + ".factors[" + std::to_string(k) + "]";
      if (!f[k].is_object() || !f[k].contains("dim") || !f[k].at("dim").is_number_integer())
        throw SpecError(fp + ".dim", "each factor needs an integer dim");
      const int d = f[k].at("dim").get<int>();
      parts.push_back(build_metric(f[k], fp, d).metric);
      total += d;
    }
    if (total != dim) throw SpecError(pp + ".factors", "factor dimensions do not add up to the spec dimension");
    return {product_metric(parts[0], parts[1]), {}};
  }
  throw SpecError(path + ".kind", "unknown metric kind '" + kind + "'");
}

ScalarPotential with_chart(ScalarPotential f, const Chart& c) {
  f.chart = c;
  return f;
}

VectorFieldSpec with_chart(VectorFieldSpec v, const Chart& c) {
  v.chart = c;
  return v;
}

}  // namespace

CatalogEntry load_geometry_spec(const json& spec) {
  check_keys(spec, "", {"name", "dim", "metric", "potential", "vector_field", "chart"});
  if (!spec.contains("dim") || !spec.at("dim").is_number_integer()) throw SpecError("dim", "missing or not an integer");
  const int dim = spec.at("dim").get<int>();
  if (dim < 2) throw SpecError("dim", "must be at least 2");
  if (!spec.contains("metric")) throw SpecError("metric", "missing");

  Built built = build_metric(spec.at("metric"), "metric", dim);
  CatalogEntry e;
  if (built.catalog) e = *built.catalog;
  e.name = spec.contains("name") ? spec.at("name").get<std::string>() : (built.catalog ? e.name : "custom");
  e.metric = built.metric;
  if (spec.contains("chart")) e.metric.chart = parse_chart(spec.at("chart"), dim);
  const Chart& chart = e.metric.chart;
  if (chart.dim() != dim) throw SpecError("metric", "metric dimension does not match dim");

  if (spec.contains("potential")) {
    const json& pj = spec.at("potential");
    const std::string kind = kind_of(pj, "potential");
    const json p = params_of(pj, "potential");
    if (kind == "expression") {
      check_keys(p, "potential.params", {"expr"});
      if (!p.contains("expr")) throw SpecError("potential.params.expr", "missing");
      const Expression f = expression(p.at("expr"), "potential.params.expr", dim);
      e.potential = ScalarPotential{chart, [f](std::span<const Jet> x) { return f.evaluate(x); }};
    } else if (kind == "zero") {
      check_keys(p, "potential.params", {});
      e.potential = ScalarPotential{chart, [](std::span<const Jet> x) { return constant_like(x[0], 0.0); }};
    } else if (kind == "catalog") {
      check_keys(p, "potential.params", {});
      if (!built.catalog || !built.catalog->potential) throw SpecError("potential", "no catalog potential to use");
    } else {
      throw SpecError("potential.kind", "unknown potential kind '" + kind + "'");
    }
  } else if (!built.catalog) {
    e.potential.reset();
  }

  if (spec.contains("vector_field")) {
    const json& vj = spec.at("vector_field");
    const std::string kind = kind_of(vj, "vector_field");
    const json p = params_of(vj, "vector_field");
    if (kind == "expression") {
      check_keys(p, "vector_field.params", {"components"});
      if (!p.contains("components")) throw SpecError("vector_field.params.components", "missing");
      const auto comps = expression_list(p.at("components"), "vector_field.params.components", dim, dim);
      e.vector_field = VectorFieldSpec{chart, [comps](std::span<const Jet> x) {
                                         std::vector<Jet> v;
                                         for (const auto& c : comps) v.push_back(c.evaluate(x));
                                         return v;
                                       }};
    } else if (kind == "zero") {
      check_keys(p, "vector_field.params", {});
      e.vector_field = VectorFieldSpec{chart, [dim](std::span<const Jet> x) {
                                         return std::vector<Jet>(dim, constant_like(x[0], 0.0));
                                       }};
    } else if (kind == "gradient") {
      check_keys(p, "vector_field.params", {});
      if (!e.potential) throw SpecError("vector_field", "gradient field needs a potential");
      e.vector_field = gradient_field(e.metric, with_chart(*e.potential, chart));
    } else if (kind == "catalog") {
      check_keys(p, "vector_field.params", {});
      if (!built.catalog || !built.catalog->vector_field) throw SpecError("vector_field", "no catalog field to use");
    } else {
      throw SpecError("vector_field.kind", "unknown vector field kind '" + kind + "'");
    }
  } else if (!built.catalog) {
    e.vector_field.reset();
  }

  if (e.potential) e.potential = with_chart(*e.potential, chart);
  if (e.vector_field) e.vector_field = with_chart(*e.vector_field, chart);
  // Expectations only travel with an unmodified catalog entry.
  if (!built.catalog || spec.contains("potential") || spec.contains("vector_field") || spec.contains("chart")) {
    e.expected_memberships.clear();
    e.known = {};
  }

  for (const Point& pt : sample_points(chart, 16, 1)) {
    try {
      e.metric.value(pt);
      if (e.potential) e.potential->eval(pt, 0);
      if (e.vector_field) e.vector_field->eval(pt, 0);
    } catch (const std::exception& err) {
      throw SpecError("metric", std::string("evaluation failed inside the chart: ") + err.what());
    }
  }
  return e;
}

CatalogEntry load_geometry_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("", "cannot open geometry spec '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& err) {
    throw SpecError("", "invalid JSON in '" + path + "': " + err.what());
  }
  return load_geometry_spec(j);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string var(int i) { return "x" + std::to_string(i + 1); }

std::string sum_of_squares(int from, int to) {
  std::string s;
  for (int i = from; i < to; ++i) s += (s.empty() ? "" : " + ") + var(i) + "^2";
  return s;
}

}  // namespace

json random_expression_spec(std::uint64_t seed, int dim) {
  std::mt19937_64 gen(seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53); };
  auto pick = [&] { return static_cast<int>(gen() % static_cast<std::uint64_t>(dim)); };
  // On [-1, 1]^n the diagonal stays above e^{-0.6} and each row's off-diagonal sum below 0.1,
  // so the matrix is diagonally dominant.
  json rows = json::array();
  std::vector<std::vector<std::string>> c(dim, std::vector<std::string>(dim));
  for (int i = 0; i < dim; ++i) {
    c[i][i] = "exp(" + num(uni(-0.3, 0.3)) + "*sin(" + var(pick()) + ") + " + num(uni(-0.3, 0.3)) + "*" + var(pick()) +
              "*" + var(pick()) + ")";
    for (int j = i + 1; j < dim; ++j)
      c[i][j] = c[j][i] = num(uni(-0.1, 0.1) / dim) + "*" + var(pick()) + "*cos(" + var(pick()) + ")";
  }
  for (const auto& r : c) rows.push_back(r);
  const std::string f = num(uni(-1.0, 1.0)) + "*" + var(0) + "*" + var(1) + " + " + num(uni(-1.0, 1.0)) + "*cos(" +
                        var(pick()) + ") + " + num(uni(-1.0, 1.0)) + "*" + var(pick()) + "^2";
  return {{"name", "random_expression_" + std::to_string(seed)},
          {"dim", dim},
          {"metric", {{"kind", "expression"}, {"params", {{"components", rows}}}}},
          {"potential", {{"kind", "expression"}, {"params", {{"expr", f}}}}},
          {"chart", {{"ranges", json(dim, json::array({-1.0, 1.0}))}, {"margin", 0.1}}}};
}

json random_geometry_spec(std::uint64_t seed) {
  std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53); };
  auto integer = [&](int lo, int hi) { return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1)); };
  const int family = integer(0, 7);
  json spec;
  if (family <= 2) {
    spec = random_expression_spec(seed, integer(2, 4));
  } else if (family == 3) {
    const int n = integer(2, 5);
    const double lambda = uni(-2.0, 2.0);
    spec = {{"name", "gaussian"},
            {"dim", n},
            {"metric", {{"kind", "flat"}}},
            {"potential", {{"kind", "expression"}, {"params", {{"expr", num(0.5 * lambda) + "*(" + sum_of_squares(0, n) + ")"}}}}}};
  } else if (family == 4) {
    const int n = integer(2, 5);
    std::string f = num(uni(-1.0, 1.0));
    for (int i = 0; i < n; ++i) f += " + " + num(uni(-1.0, 1.0)) + "*" + var(i);
    spec = {{"name", "flat_linear"},
            {"dim", n},
            {"metric", {{"kind", "flat"}}},
            {"potential", {{"kind", "expression"}, {"params", {{"expr", f}}}}}};
  } else if (family == 5) {
    const int n = integer(2, 4);
    spec = {{"name", "round_sphere"},
            {"dim", n},
            {"metric", {{"kind", "sphere"}, {"params", {{"radius", uni(0.5, 2.0)}}}}},
            {"potential", {{"kind", "expression"}, {"params", {{"expr", num(uni(-1.0, 1.0))}}}}}};
  } else if (family == 6) {
    // R^k x S^m(r) with f = |x|^2 / (2 r^2) (m - 1): Ric_f = ((m - 1) / r^2) g.
    const int m = integer(2, 3);
    const int k = m == 2 ? integer(1, 2) : 1;
    // The printed coefficient is exact; the radius is derived from it.
    const std::string coeff = num(uni(0.25, 1.0));
    const double r = std::sqrt((m - 1) / (2.0 * std::stod(coeff)));
    const std::string f = coeff + "*(" + sum_of_squares(0, k) + ")";
    const json sphere = {{"kind", "sphere"}, {"params", {{"radius", r}}}, {"dim", m}};
    const json metric = k == 1 ? json{{"kind", "warped"}, {"params", {{"warping", "1"}, {"fiber", sphere}}}}
                               : json{{"kind", "product"},
                                      {"params", {{"factors", json::array({json{{"kind", "flat"}, {"dim", k}}, sphere})}}}};
    spec = {{"name", "sphere_product"},
            {"dim", k + m},
            {"metric", metric},
            {"potential", {{"kind", "expression"}, {"params", {{"expr", f}}}}}};
  } else {
    const int n = integer(3, 5);
    spec = {{"name", "warped_gaussian"},
            {"dim", n},
            {"metric", {{"kind", "warped"}, {"params", {{"warping", "exp(x1^2)"}, {"fiber", {{"kind", "flat"}}}}}}},
            {"potential", {{"kind", "expression"}, {"params", {{"expr", num(0.5 * n) + "*log(1 + x1^2)"}}}}}};
  }
  if (family > 2) spec["name"] = spec["name"].get<std::string>() + "_" + std::to_string(seed);
  return spec;
}

}  // namespace curvlab
