#include "curvlab/geometry.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <stdexcept>

namespace curvlab {

namespace {

void require_point(const Chart& chart, std::span<const double> p) {
  if (static_cast<int>(p.size()) != chart.dim())
    throw std::invalid_argument("point has " + std::to_string(p.size()) + " coordinates, chart has " +
                                std::to_string(chart.dim()));
}

Point subpoint(std::span<const Jet> x, std::span<const int> var_map) {
  Point p;
  p.reserve(var_map.size());
  for (int v : var_map) p.push_back(x[v].value());
  return p;
}

std::vector<int> iota_map(int count, int offset) {
  std::vector<int> m(count);
  for (int i = 0; i < count; ++i) m[i] = i + offset;
  return m;
}

}  // namespace

Chart::Chart(std::vector<Interval> ranges, double margin) : ranges_(std::move(ranges)), margin_(margin) {
  if (ranges_.size() < 2) throw std::invalid_argument("chart dimension must be at least 2");
  if (!(margin_ > 0.0 && margin_ < 0.5)) throw std::invalid_argument("chart margin must lie in (0, 0.5)");
  for (const auto& r : ranges_)
    if (!(r.hi > r.lo)) throw std::invalid_argument("chart range has empty interior");
}

std::vector<Interval> Chart::interior() const {
  std::vector<Interval> out;
  out.reserve(ranges_.size());
  for (const auto& r : ranges_) out.push_back({r.lo + margin_ * r.side(), r.hi - margin_ * r.side()});
  return out;
}

bool Chart::contains(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  const auto box = interior();
  for (int i = 0; i < dim(); ++i)
    if (p[i] < box[i].lo || p[i] > box[i].hi) return false;
  return true;
}

void require_positive_definite(const TensorD& g, const std::string& what) {
  const Eigen::MatrixXd m = to_matrix(g);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success || !m.allFinite())
    throw std::domain_error(what + ": metric is not positive definite");
}

TensorJ MetricField::eval(std::span<const double> p, int order) const {
  require_point(chart, p);
  const auto x = seed_point(p, order);
  TensorJ g = fn(x);
  if (g.rank() != 2 || g.dim() != dim()) throw std::logic_error("metric evaluator returned a tensor of wrong shape");
  const int n = dim();
  // Products of jets commute only up to rounding, so near-equal mirror entries are averaged.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto a = g(i, j).coeffs();
      auto b = g(j, i).coeffs();
      for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k] - b[k]) > 1e-12 * (1.0 + std::abs(a[k])))
          throw std::logic_error("metric evaluator returned a non-symmetric matrix");
      const Jet avg = 0.5 * (g(i, j) + g(j, i));
      g(i, j) = avg;
      g(j, i) = avg;
    }
  require_positive_definite(values(g), "metric evaluation");
  return g;
}

Jet ScalarPotential::eval(std::span<const double> p, int order) const {
  require_point(chart, p);
  const auto x = seed_point(p, order);
  return fn(x);
}

std::vector<Jet> VectorFieldSpec::eval(std::span<const double> p, int order) const {
  require_point(chart, p);
  const auto x = seed_point(p, order);
  auto v = fn(x);
  if (static_cast<int>(v.size()) != chart.dim()) throw std::logic_error("vector field has wrong component count");
  return v;
}

MetricField conformal_rescale(const MetricField& g, const ScalarPotential& u) {
  if (!(g.chart == u.chart)) throw std::invalid_argument("conformal rescale needs a shared chart");
  MetricField out;
  out.chart = g.chart;
  out.fn = [g, u](std::span<const Jet> x) {
    TensorJ m = g.fn(x);
    const Jet factor = exp(2.0 * u.fn(x));
    for (auto& c : m.data()) c = c * factor;
    return m;
  };
  return out;
}

MetricField warped_product(std::function<Jet(const Jet&)> warping, const Interval& interval, const MetricField& fiber) {
  std::vector<Interval> ranges{interval};
  ranges.insert(ranges.end(), fiber.chart.ranges().begin(), fiber.chart.ranges().end());
  MetricField out;
  out.chart = Chart(std::move(ranges), fiber.chart.margin());
  const int n = out.chart.dim();
  out.fn = [warping, fiber, n](std::span<const Jet> x) {
    const Jet f = warping(x[0]);
    if (!(f.value() > 0.0)) throw std::domain_error("warping function is nonpositive at t = " + std::to_string(x[0].value()));
    const auto map = iota_map(n - 1, 1);
    const TensorJ h = fiber.fn(seed_point(subpoint(x, map), x[0].order()));
    const Jet zero = constant_like(x[0], 0.0);
    TensorJ g(n, 2, zero);
    g(0, 0) = constant_like(x[0], 1.0);
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j) g(i, j) = f * h(i - 1, j - 1).embedded(n, map);
    return g;
  };
  return out;
}

MetricField product_metric(const MetricField& first, const MetricField& second) {
  std::vector<Interval> ranges = first.chart.ranges();
  ranges.insert(ranges.end(), second.chart.ranges().begin(), second.chart.ranges().end());
  MetricField out;
  out.chart = Chart(std::move(ranges), std::min(first.chart.margin(), second.chart.margin()));
  const int n1 = first.dim();
  const int n = out.chart.dim();
  out.fn = [first, second, n1, n](std::span<const Jet> x) {
    const auto map1 = iota_map(n1, 0);
    const auto map2 = iota_map(n - n1, n1);
    const int order = x[0].order();
    const TensorJ a = first.fn(seed_point(subpoint(x, map1), order));
    const TensorJ b = second.fn(seed_point(subpoint(x, map2), order));
    TensorJ g(n, 2, constant_like(x[0], 0.0));
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j) g(i, j) = a(i, j).embedded(n, map1);
    for (int i = n1; i < n; ++i)
      for (int j = n1; j < n; ++j) g(i, j) = b(i - n1, j - n1).embedded(n, map2);
    return g;
  };
  return out;
}

VectorFieldSpec gradient_field(const MetricField& g, const ScalarPotential& f) {
  if (!(g.chart == f.chart)) throw std::invalid_argument("gradient field needs a shared chart");
  VectorFieldSpec out;
  out.chart = g.chart;
  out.fn = [g, f](std::span<const Jet> x) {
    const int n = static_cast<int>(x.size());
    const int order = x[0].order();
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = x[i].value();
    const Jet fj = f.fn(seed_point(p, order + 1));
    const TensorJ g_inv = inverse(g.fn(x));
    std::vector<Jet> v(n, constant_like(x[0], 0.0));
    for (int j = 0; j < n; ++j) {
      const Jet df = fj.derivative(j);
      for (int i = 0; i < n; ++i) v[i] += g_inv(i, j) * df;
    }
    return v;
  };
  return out;
}

ScalarPotential lift_potential(const ScalarPotential& f, int dims, std::vector<int> var_map, const Chart& chart) {
  if (static_cast<int>(var_map.size()) != f.chart.dim()) throw std::invalid_argument("variable map has wrong length");
  ScalarPotential out;
  out.chart = chart;
  out.fn = [f, dims, var_map](std::span<const Jet> x) {
    return f.fn(seed_point(subpoint(x, var_map), x[0].order())).embedded(dims, var_map);
  };
  return out;
}

VectorFieldSpec lift_vector_field(const VectorFieldSpec& v, int dims, std::vector<int> var_map, const Chart& chart) {
  if (static_cast<int>(var_map.size()) != v.chart.dim()) throw std::invalid_argument("variable map has wrong length");
  VectorFieldSpec out;
  out.chart = chart;
  out.fn = [v, dims, var_map](std::span<const Jet> x) {
    const auto sub = v.fn(seed_point(subpoint(x, var_map), x[0].order()));
    std::vector<Jet> full(dims, constant_like(x[0], 0.0));
    for (std::size_t k = 0; k < var_map.size(); ++k) full[var_map[k]] = sub[k].embedded(dims, var_map);
    return full;
  };
  return out;
}

std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample count must be at least 1");
  std::mt19937_64 gen(seed);
  const auto box = chart.interior();
  std::vector<Point> points(count, Point(chart.dim()));
  for (auto& p : points)
    for (int i = 0; i < chart.dim(); ++i) {
      // 53 random bits mapped to [0, 1) so the stream is identical on every platform.
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      p[i] = box[i].lo + u * box[i].side();
    }
  return points;
}

TensorJ inverse(const TensorJ& m) {
  if (m.rank() != 2) throw std::invalid_argument("inverse needs a 2-tensor");
  const int n = m.dim();
  TensorJ a = m;
  const Jet zero = m(0, 0) * 0.0;
  TensorJ inv(n, 2, zero);
  for (int i = 0; i < n; ++i) inv(i, i) = zero + 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col).value()) > std::abs(a(pivot, col).value())) pivot = r;
    if (a(pivot, col).value() == 0.0) throw std::domain_error("singular matrix in jet inverse");
    if (pivot != col)
      for (int c = 0; c < n; ++c) {
        std::swap(a(pivot, c), a(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    const Jet scale = 1.0 / a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) = a(col, c) * scale;
      inv(col, c) = inv(col, c) * scale;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet factor = a(r, col);
      for (int c = 0; c < n; ++c) {
        a(r, c) -= factor * a(col, c);
        inv(r, c) -= factor * inv(col, c);
      }
    }
  }
  return inv;
}

}  // namespace curvlab
