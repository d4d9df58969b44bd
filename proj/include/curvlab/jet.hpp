#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace curvlab {

/// Maximum truncation order supported by the jet engine.
inline constexpr int kMaxJetOrder = 5;
/// Maximum number of chart variables.
inline constexpr int kMaxJetDims = 8;

/// Dense graded-lexicographic enumeration of multi-indices with |alpha| <= order.
///
/// Degree-d multi-indices come after all degree < d ones, and inside one degree they
/// are sorted lexicographically with the first variable's exponent descending. A lower
/// order layout is therefore a prefix of a higher order one with the same dims, which
/// makes truncation a resize.
class JetLayout {
 public:
  /// Shared, immutable layout for (dims, order); thread-safe.
  static const JetLayout& get(int dims, int order);

  int dims() const { return dims_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(degree_.size()); }

  std::span<const int> multi_index(int k) const {
    return {exponents_.data() + static_cast<std::size_t>(k) * dims_, static_cast<std::size_t>(dims_)};
  }
  int degree(int k) const { return degree_[k]; }

  /// Index of a multi-index, or -1 when |alpha| > order.
  int index_of(std::span<const int> alpha) const;

  /// Index of alpha + e_i, or -1 when it exceeds the order.
  int raise(int k, int i) const { return raise_[static_cast<std::size_t>(k) * dims_ + i]; }

  /// (left, right, out) triples with |left| + |right| <= order, grouped by out.
  struct Product {
    int left;
    int right;
    int out;
  };
  std::span<const Product> products() const { return products_; }

 private:
  JetLayout(int dims, int order);

  int dims_;
  int order_;
  std::vector<int> exponents_;
  std::vector<int> degree_;
  std::vector<int> raise_;
  std::vector<Product> products_;
  std::vector<std::pair<std::uint64_t, int>> lookup_;

  std::uint64_t key(std::span<const int> alpha) const;
};

/// Truncated multivariate Taylor polynomial around an evaluation point.
///
/// coeffs()[k] is the coefficient of prod x_i^{alpha_i} for the k-th multi-index of the
/// layout, i.e. the partial derivative divided by alpha!. Arithmetic requires identical
/// (dims, order); use truncated() to lower the order explicitly.
class Jet {
 public:
  Jet() = default;

  static Jet constant(double value, int dims, int order);
  /// Coordinate function x_i seeded at `value`.
  static Jet variable(int i, double value, int dims, int order);

  int dims() const { return layout_ ? layout_->dims() : 0; }
  int order() const { return layout_ ? layout_->order() : 0; }
  const JetLayout& layout() const { return *layout_; }
  bool empty() const { return layout_ == nullptr; }

  double value() const { return coeffs_[0]; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double coeff(std::span<const int> alpha) const;

  /// True partial derivative alpha! * coeff(alpha).
  double partial(std::span<const int> alpha) const;
  /// First partial d/dx_i at the expansion point.
  double gradient(int i) const;

  /// d/dx_i as a jet of order - 1.
  Jet derivative(int i) const;
  Jet truncated(int order) const;
  /// Re-express a jet in a larger chart: variable v of this jet becomes variable var_map[v].
  Jet embedded(int dims, std::span<const int> var_map) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator/=(const Jet& other);
  Jet& operator+=(double c);
  Jet& operator-=(double c);
  Jet& operator*=(double c);
  Jet& operator/=(double c);

  friend Jet operator-(Jet a);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double c) { return a += c; }
  friend Jet operator+(double c, Jet a) { return a += c; }
  friend Jet operator-(Jet a, double c) { return a -= c; }
  friend Jet operator-(double c, const Jet& a) { return -a + c; }
  friend Jet operator*(Jet a, double c) { return a *= c; }
  friend Jet operator*(double c, Jet a) { return a *= c; }
  friend Jet operator/(Jet a, double c) { return a /= c; }
  friend Jet operator/(double c, const Jet& a);

 private:
  Jet(const JetLayout* layout, std::vector<double> coeffs) : layout_(layout), coeffs_(std::move(coeffs)) {}
  void check_compatible(const Jet& other) const;

  /// Sum_m d[m] / m! * (a - a0)^m; d holds f^{(m)}(a0) for m = 0..order.
  friend Jet compose(const Jet& a, std::span<const double> derivatives);

  const JetLayout* layout_ = nullptr;
  std::vector<double> coeffs_;
};

Jet compose(const Jet& a, std::span<const double> derivatives);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, double r);
/// Integer power by repeated multiplication; valid for any constant term.
Jet ipow(const Jet& a, int k);
Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tanh(const Jet& a);

/// Constant jet sharing the layout of `like`.
Jet constant_like(const Jet& like, double value);

/// Seeds for every coordinate of `point`; constants when order == 0.
std::vector<Jet> seed_point(std::span<const double> point, int order);

}  // namespace curvlab
