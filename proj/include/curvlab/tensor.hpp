#pragma once

#include <Eigen/Dense>

#include <array>
#include <initializer_list>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "curvlab/jet.hpp"

namespace curvlab {

/// Dense covariant tensor of arbitrary rank over a chart of dimension `dim`.
///
/// Entries are stored row-major, so the last index varies fastest. Derivative indices
/// produced by covariant differentiation are appended last, matching T_{ab,c} = nabla_c T_{ab}.
template <typename Scalar>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank, const Scalar& fill) : dim_(dim), rank_(rank), data_(count(dim, rank), fill) {}

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  template <typename... Index>
  Scalar& operator()(Index... idx) {
    return data_[offset(std::array<int, sizeof...(Index)>{static_cast<int>(idx)...})];
  }
  template <typename... Index>
  const Scalar& operator()(Index... idx) const {
    return data_[offset(std::array<int, sizeof...(Index)>{static_cast<int>(idx)...})];
  }

  Scalar& at_flat(std::size_t k) { return data_[k]; }
  const Scalar& at_flat(std::size_t k) const { return data_[k]; }
  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }

  /// Multi-index of flat position k.
  std::vector<int> unflatten(std::size_t k) const {
    std::vector<int> idx(rank_);
    for (int r = rank_; r-- > 0;) {
      idx[r] = static_cast<int>(k % dim_);
      k /= dim_;
    }
    return idx;
  }
  std::size_t flatten(std::span<const int> idx) const {
    std::size_t k = 0;
    for (int i : idx) k = k * dim_ + i;
    return k;
  }

  Tensor& operator+=(const Tensor& o) {
    check_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Tensor& operator*=(double c) {
    for (auto& x : data_) x *= c;
    return *this;
  }
  Tensor& operator*=(const Scalar& c) requires(!std::is_same_v<Scalar, double>) {
    for (auto& x : data_) x = x * c;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double c) { return a *= c; }
  friend Tensor operator*(double c, Tensor a) { return a *= c; }
  friend Tensor operator-(Tensor a) { return a *= -1.0; }

  void check_shape(const Tensor& o) const {
    if (dim_ != o.dim_ || rank_ != o.rank_) throw std::invalid_argument("tensor shape mismatch");
  }

 private:
  static std::size_t count(int dim, int rank) {
    std::size_t c = 1;
    for (int r = 0; r < rank; ++r) c *= static_cast<std::size_t>(dim);
    return c;
  }
  template <std::size_t N>
  std::size_t offset(const std::array<int, N>& idx) const {
    std::size_t k = 0;
    for (int i : idx) k = k * dim_ + i;
    return k;
  }

  int dim_ = 0;
  int rank_ = 0;
  std::vector<Scalar> data_;
};

using TensorD = Tensor<double>;
using TensorJ = Tensor<Jet>;

/// Scalar-field product c * T.
template <typename Scalar>
Tensor<Scalar> scaled(Tensor<Scalar> t, const Scalar& c) {
  for (auto& x : t.data()) x = x * c;
  return t;
}

/// Kulkarni-Nomizu product of symmetric 2-tensors:
/// (a o b)_{ijkt} = a_ik b_jt - a_it b_jk + a_jt b_ik - a_jk b_it.
template <typename Scalar>
Tensor<Scalar> kulkarni_nomizu(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim() != b.dim())
    throw std::invalid_argument("Kulkarni-Nomizu product needs two 2-tensors of equal dimension");
  const int n = a.dim();
  Tensor<Scalar> out(n, 4, a(0, 0) * 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int t = 0; t < n; ++t)
          out(i, j, k, t) = a(i, k) * b(j, t) - a(i, t) * b(j, k) + a(j, t) * b(i, k) - a(j, k) * b(i, t);
  return out;
}

/// Constant terms of a jet tensor.
inline TensorD values(const TensorJ& t) {
  TensorD out(t.dim(), t.rank(), 0.0);
  for (std::size_t k = 0; k < t.size(); ++k) out.at_flat(k) = t.at_flat(k).value();
  return out;
}

inline TensorJ truncated(const TensorJ& t, int order) {
  TensorJ out = t;
  for (auto& x : out.data()) x = x.truncated(order);
  return out;
}

inline Eigen::MatrixXd to_matrix(const TensorD& t) {
  if (t.rank() != 2) throw std::invalid_argument("to_matrix needs a 2-tensor");
  Eigen::MatrixXd m(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) m(i, j) = t(i, j);
  return m;
}

inline TensorD from_matrix(const Eigen::MatrixXd& m) {
  TensorD t(static_cast<int>(m.rows()), 2, 0.0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
  return t;
}

/// Raise slot `slot` with the inverse metric; the raised index stays in place.
template <typename Scalar>
Tensor<Scalar> raise_slot(const Tensor<Scalar>& t, const Tensor<Scalar>& g_inv, int slot) {
  const int n = t.dim();
  Tensor<Scalar> out(n, t.rank(), t.at_flat(0) * 0.0);
  std::size_t stride = 1;
  for (int r = t.rank() - 1; r > slot; --r) stride *= n;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const int a = static_cast<int>((k / stride) % n);
    const std::size_t base = k - static_cast<std::size_t>(a) * stride;
    Scalar acc = g_inv(a, 0) * t.at_flat(base);
    for (int b = 1; b < n; ++b) acc += g_inv(a, b) * t.at_flat(base + b * stride);
    out.at_flat(k) = acc;
  }
  return out;
}

/// Contract slots s1 < s2 of t with the inverse metric (a trace).
template <typename Scalar>
Tensor<Scalar> trace(const Tensor<Scalar>& t, const Tensor<Scalar>& g_inv, int s1, int s2) {
  if (s1 == s2 || s1 < 0 || s2 < 0 || s1 >= t.rank() || s2 >= t.rank())
    throw std::invalid_argument("invalid trace slots");
  if (s1 > s2) std::swap(s1, s2);
  const Tensor<Scalar> raised = raise_slot(t, g_inv, s1);
  const int n = t.dim();
  Tensor<Scalar> out(n, t.rank() - 2, t.at_flat(0) * 0.0);
  std::vector<int> full(t.rank());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::vector<int> rest = out.unflatten(k);
    Scalar acc = t.at_flat(0) * 0.0;
    for (int a = 0; a < n; ++a) {
      int p = 0;
      for (int r = 0; r < t.rank(); ++r) full[r] = (r == s1 || r == s2) ? a : rest[p++];
      acc += raised.at_flat(raised.flatten(full));
    }
    out.at_flat(k) = acc;
  }
  return out;
}

/// Squared norm with every index contracted by the inverse metric.
inline double norm_sq(const TensorD& t, const TensorD& g_inv) {
  if (t.rank() == 0) return t.at_flat(0) * t.at_flat(0);
  TensorD raised = t;
  for (int s = 0; s < t.rank(); ++s) raised = raise_slot(raised, g_inv, s);
  double acc = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) acc += raised.at_flat(k) * t.at_flat(k);
  return acc;
}

inline double norm(const TensorD& t, const TensorD& g_inv) { return std::sqrt(std::max(0.0, norm_sq(t, g_inv))); }

/// Rank-0 tensor holding a scalar.
template <typename Scalar>
Tensor<Scalar> scalar_tensor(int dim, const Scalar& s) {
  return Tensor<Scalar>(dim, 0, s);
}

/// Slot permutation: out(i_0, ..., i_{r-1}) = t(i_{perm[0]}, ..., i_{perm[r-1]}).
template <typename Scalar>
Tensor<Scalar> permuted(const Tensor<Scalar>& t, std::initializer_list<int> perm_list) {
  const std::vector<int> perm(perm_list);
  if (static_cast<int>(perm.size()) != t.rank()) throw std::invalid_argument("permutation has wrong length");
  Tensor<Scalar> out = t;
  std::vector<int> src(t.rank());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::vector<int> idx = out.unflatten(k);
    for (int r = 0; r < t.rank(); ++r) src[r] = idx[perm[r]];
    out.at_flat(k) = t.at_flat(t.flatten(src));
  }
  return out;
}

}  // namespace curvlab
