#include "curvlab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace curvlab {

namespace {

void enumerate_degree(int dims, int degree, int var, std::vector<int>& current, std::vector<int>& out) {
  if (var == dims - 1) {
    current[var] = degree;
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = e;
    enumerate_degree(dims, degree - e, var + 1, current, out);
  }
  current[var] = 0;
}

}  // namespace

JetLayout::JetLayout(int dims, int order) : dims_(dims), order_(order) {
  std::vector<int> current(dims, 0);
  for (int d = 0; d <= order; ++d) {
    const std::size_t before = exponents_.size() / dims;
    enumerate_degree(dims, d, 0, current, exponents_);
    const std::size_t after = exponents_.size() / dims;
    degree_.insert(degree_.end(), after - before, d);
  }
  const int count = size();
  lookup_.reserve(count);
  for (int k = 0; k < count; ++k) lookup_.emplace_back(key(multi_index(k)), k);
  std::sort(lookup_.begin(), lookup_.end());

  raise_.assign(static_cast<std::size_t>(count) * dims, -1);
  std::vector<int> alpha(dims);
  for (int k = 0; k < count; ++k) {
    if (degree_[k] == order) continue;
    for (int i = 0; i < dims; ++i) {
      auto mi = multi_index(k);
      std::copy(mi.begin(), mi.end(), alpha.begin());
      alpha[i] += 1;
      raise_[static_cast<std::size_t>(k) * dims + i] = index_of(alpha);
    }
  }

  for (int l = 0; l < count; ++l) {
    for (int r = 0; r < count; ++r) {
      if (degree_[l] + degree_[r] > order) continue;
      auto a = multi_index(l);
      auto b = multi_index(r);
      for (int i = 0; i < dims; ++i) alpha[i] = a[i] + b[i];
      products_.push_back({l, r, index_of(alpha)});
    }
  }
  std::sort(products_.begin(), products_.end(),
            [](const Product& x, const Product& y) { return x.out < y.out; });
}

std::uint64_t JetLayout::key(std::span<const int> alpha) const {
  std::uint64_t k = 0;
  for (int e : alpha) k = k * static_cast<std::uint64_t>(order_ + 1) + static_cast<std::uint64_t>(e);
  return k;
}

int JetLayout::index_of(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dims_) throw std::invalid_argument("multi-index has wrong length");
  int total = 0;
  for (int e : alpha) {
    if (e < 0) throw std::invalid_argument("negative exponent in multi-index");
    total += e;
  }
  if (total > order_) return -1;
  const std::uint64_t k = key(alpha);
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::make_pair(k, -1));
  return it->second;
}

const JetLayout& JetLayout::get(int dims, int order) {
  if (dims < 1 || dims > kMaxJetDims) throw std::invalid_argument("jet dims must be in 1.." + std::to_string(kMaxJetDims));
  if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("jet order must be in 0.." + std::to_string(kMaxJetOrder));
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dims, order}];
  if (!slot) slot.reset(new JetLayout(dims, order));
  return *slot;
}

Jet Jet::constant(double value, int dims, int order) {
  const JetLayout& layout = JetLayout::get(dims, order);
  std::vector<double> c(layout.size(), 0.0);
  c[0] = value;
  return Jet(&layout, std::move(c));
}

Jet Jet::variable(int i, double value, int dims, int order) {
  if (order < 1) throw std::invalid_argument("seeded variable needs order >= 1");
  if (i < 0 || i >= dims) throw std::out_of_range("variable index out of range");
  Jet j = constant(value, dims, order);
  j.coeffs_[1 + i] = 1.0;
  return j;
}

double Jet::coeff(std::span<const int> alpha) const {
  const int k = layout_->index_of(alpha);
  if (k < 0) throw std::out_of_range("multi-index exceeds jet order");
  return coeffs_[k];
}

double Jet::partial(std::span<const int> alpha) const {
  double factorial = 1.0;
  for (int e : alpha)
    for (int m = 2; m <= e; ++m) factorial *= m;
  return factorial * coeff(alpha);
}

double Jet::gradient(int i) const {
  if (order() < 1) throw std::out_of_range("jet order 0 carries no derivatives");
  return coeffs_[1 + i];
}

Jet Jet::derivative(int i) const {
  if (order() < 1) throw std::out_of_range("cannot differentiate an order-0 jet");
  if (i < 0 || i >= dims()) throw std::out_of_range("variable index out of range");
  const JetLayout& lower = JetLayout::get(dims(), order() - 1);
  std::vector<double> c(lower.size());
  for (int k = 0; k < lower.size(); ++k) {
    const int up = layout_->raise(k, i);
    c[k] = (layout_->multi_index(k)[i] + 1) * coeffs_[up];
  }
  return Jet(&lower, std::move(c));
}

Jet Jet::truncated(int order) const {
  if (order > this->order()) throw std::invalid_argument("truncation cannot raise the order");
  if (order == this->order()) return *this;
  const JetLayout& lower = JetLayout::get(dims(), order);
  return Jet(&lower, std::vector<double>(coeffs_.begin(), coeffs_.begin() + lower.size()));
}

Jet Jet::embedded(int dims, std::span<const int> var_map) const {
  if (static_cast<int>(var_map.size()) != this->dims()) throw std::invalid_argument("variable map has wrong length");
  const JetLayout& target = JetLayout::get(dims, order());
  std::vector<double> c(target.size(), 0.0);
  std::vector<int> alpha(dims);
  for (int k = 0; k < layout_->size(); ++k) {
    std::fill(alpha.begin(), alpha.end(), 0);
    auto mi = layout_->multi_index(k);
    for (int v = 0; v < this->dims(); ++v) {
      if (var_map[v] < 0 || var_map[v] >= dims) throw std::out_of_range("variable map target out of range");
      alpha[var_map[v]] += mi[v];
    }
    c[target.index_of(alpha)] += coeffs_[k];
  }
  return Jet(&target, std::move(c));
}

void Jet::check_compatible(const Jet& other) const {
  if (layout_ != other.layout_)
    throw std::invalid_argument("jet arithmetic on mismatched dims/order (" + std::to_string(dims()) + "," +
                                std::to_string(order()) + ") vs (" + std::to_string(other.dims()) + "," +
                                std::to_string(other.order()) + ")");
}

Jet& Jet::operator+=(const Jet& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& other) { return *this = *this * other; }
Jet& Jet::operator/=(const Jet& other) { return *this = *this / other; }

Jet& Jet::operator+=(double c) {
  coeffs_[0] += c;
  return *this;
}
Jet& Jet::operator-=(double c) {
  coeffs_[0] -= c;
  return *this;
}
Jet& Jet::operator*=(double c) {
  for (double& x : coeffs_) x *= c;
  return *this;
}
Jet& Jet::operator/=(double c) {
  for (double& x : coeffs_) x /= c;
  return *this;
}

Jet operator-(Jet a) {
  for (double& x : a.coeffs_) x = -x;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.check_compatible(b);
  std::vector<double> c(a.coeffs_.size(), 0.0);
  const double* x = a.coeffs_.data();
  const double* y = b.coeffs_.data();
  for (const auto& p : a.layout_->products()) c[p.out] += x[p.left] * y[p.right];
  return Jet(a.layout_, std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) {
  a.check_compatible(b);
  return a * pow(b, -1.0);
}

Jet operator/(double c, const Jet& a) { return pow(a, -1.0) * c; }

Jet compose(const Jet& a, std::span<const double> derivatives) {
  const int order = a.order();
  Jet h = a;
  h.coeffs_[0] = 0.0;
  Jet result = Jet::constant(derivatives[0], a.dims(), order);
  Jet power = h;
  double factorial = 1.0;
  for (int m = 1; m <= order; ++m) {
    factorial *= m;
    const double scale = derivatives[m] / factorial;
    for (std::size_t k = 0; k < result.coeffs_.size(); ++k) result.coeffs_[k] += scale * power.coeffs_[k];
    if (m < order) power = power * h;
  }
  return result;
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  std::vector<double> d(a.order() + 1, e);
  return compose(a, d);
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw std::domain_error("log of a jet with nonpositive constant term");
  std::vector<double> d(a.order() + 1);
  d[0] = std::log(x);
  double factorial = 1.0;
  for (int m = 1; m <= a.order(); ++m) {
    if (m > 1) factorial *= (m - 1);
    d[m] = ((m % 2) ? 1.0 : -1.0) * factorial / std::pow(x, m);
  }
  return compose(a, d);
}

Jet pow(const Jet& a, double r) {
  const double x = a.value();
  if (r == 0.0) return Jet::constant(1.0, a.dims(), a.order());
  const bool integral = std::floor(r) == r && std::abs(r) <= 64;
  if (x == 0.0 || (x < 0.0 && !integral))
    throw std::domain_error("pow of a jet outside its domain (constant term " + std::to_string(x) + ")");
  std::vector<double> d(a.order() + 1);
  double falling = 1.0;
  for (int m = 0; m <= a.order(); ++m) {
    d[m] = falling * std::pow(x, r - m);
    falling *= (r - m);
  }
  return compose(a, d);
}

Jet ipow(const Jet& a, int k) {
  if (k < 0) return pow(a, static_cast<double>(k));
  Jet result = Jet::constant(1.0, a.dims(), a.order());
  Jet base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw std::domain_error("sqrt of a jet with nonpositive constant term");
  return pow(a, 0.5);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> d(a.order() + 1);
  for (int m = 0; m <= a.order(); ++m) d[m] = cycle[m % 4];
  return compose(a, d);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> d(a.order() + 1);
  for (int m = 0; m <= a.order(); ++m) d[m] = cycle[m % 4];
  return compose(a, d);
}

Jet tanh(const Jet& a) {
  // d^m/dx^m tanh = P_m(tanh) with P_0(T) = T and P_{m+1} = P_m'(T) (1 - T^2).
  const double t = std::tanh(a.value());
  std::vector<double> poly = {0.0, 1.0};
  std::vector<double> d(a.order() + 1);
  for (int m = 0; m <= a.order(); ++m) {
    double v = 0.0;
    for (std::size_t p = poly.size(); p-- > 0;) v = v * t + poly[p];
    d[m] = v;
    std::vector<double> deriv(poly.size() > 1 ? poly.size() - 1 : 1, 0.0);
    for (std::size_t p = 1; p < poly.size(); ++p) deriv[p - 1] = p * poly[p];
    std::vector<double> next(deriv.size() + 2, 0.0);
    for (std::size_t p = 0; p < deriv.size(); ++p) {
      next[p] += deriv[p];
      next[p + 2] -= deriv[p];
    }
    poly = std::move(next);
  }
  return compose(a, d);
}

Jet constant_like(const Jet& like, double value) { return Jet::constant(value, like.dims(), like.order()); }

std::vector<Jet> seed_point(std::span<const double> point, int order) {
  const int dims = static_cast<int>(point.size());
  std::vector<Jet> x;
  x.reserve(dims);
  for (int i = 0; i < dims; ++i)
    x.push_back(order == 0 ? Jet::constant(point[i], dims, 0) : Jet::variable(i, point[i], dims, order));
  return x;
}

}  // namespace curvlab
