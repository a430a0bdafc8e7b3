#pragma once

#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "homog/errors.hpp"
#include "homog/multi_index.hpp"
#include "homog/polynomial.hpp"
#include "homog/scalar.hpp"

namespace homog {

/// Symmetric tensor of order m, stored by multi-index |alpha| = m. Absent
/// entries are zero. Order 0 is a scalar stored at the zero multi-index.
template <Scalar T>
class SymTensor {
 public:
  SymTensor() = default;
  SymTensor(std::size_t dim, int order) : dim_(dim), order_(order) {
    if (dim == 0) throw ContractViolation("tensor dimension must be >= 1");
    if (order < 0) throw ContractViolation("tensor order must be >= 0");
  }

  std::size_t dim() const { return dim_; }
  int order() const { return order_; }
  const std::map<MultiIndex, T>& entries() const { return entries_; }

  T at(const MultiIndex& alpha) const {
    check_index(alpha);
    auto it = entries_.find(alpha);
    return it == entries_.end() ? T(0) : it->second;
  }

  void set(const MultiIndex& alpha, const T& value) {
    check_index(alpha);
    T v = value;
    canonicalize(v);
    if (homog::is_zero(v))
      entries_.erase(alpha);
    else
      entries_[alpha] = std::move(v);
  }

  bool is_zero() const { return entries_.empty(); }

  /// x^{(x)m}: entries x^alpha.
  static SymTensor outer_power(std::span<const T> x, int m) {
    SymTensor t(x.size(), m);
    for (const auto& a : multi_indices_of_order(x.size(), m)) {
      T v(1);
      for (std::size_t i = 0; i < x.size(); ++i)
        for (int k = 0; k < a[i]; ++k) v *= x[i];
      t.set(a, v);
    }
    return t;
  }

  /// Order-2 tensor from a symmetric matrix given row-major (d*d entries).
  static SymTensor from_matrix(std::size_t dim, std::span<const T> m) {
    if (m.size() != dim * dim) throw ContractViolation("matrix size does not match dimension");
    SymTensor t(dim, 2);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) {
        if (m[i * dim + j] != m[j * dim + i]) throw ContractViolation("matrix is not symmetric");
        t.set(MultiIndex::unit(dim, i) + MultiIndex::unit(dim, j), m[i * dim + j]);
      }
    return t;
  }

  /// Row-major symmetric matrix M_ij = T_{e_i + e_j}; requires order 2.
  std::vector<T> to_matrix() const {
    if (order_ != 2) throw ContractViolation("matrix form requires an order-2 tensor");
    std::vector<T> m(dim_ * dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m[i * dim_ + j] = at(MultiIndex::unit(dim_, i) + MultiIndex::unit(dim_, j));
    return m;
  }

  /// The polynomial xi -> T : xi^{(x)m} = sum binom(m,alpha) T_alpha xi^alpha.
  Polynomial<T> avatar() const {
    Polynomial<T> p(dim_);
    for (const auto& [a, v] : entries_) p.add_term(a, T(v * scalar_from<T>(multinomial(a))));
    return p;
  }

  /// Inverse of avatar(); p must be homogeneous of degree `order`.
  static SymTensor from_avatar(const Polynomial<T>& p, int order) {
    SymTensor t(p.dim(), order);
    for (const auto& [a, c] : p.terms()) {
      if (a.order() != order) throw ContractViolation("avatar polynomial is not homogeneous of the tensor order");
      t.set(a, T(c / scalar_from<T>(multinomial(a))));
    }
    return t;
  }

  SymTensor& operator+=(const SymTensor& o) {
    check_same(o);
    for (const auto& [a, v] : o.entries_) set(a, T(at(a) + v));
    return *this;
  }
  SymTensor& operator*=(const T& s) {
    T f = s;
    canonicalize(f);
    for (auto it = entries_.begin(); it != entries_.end();) {
      it->second *= f;
      if (homog::is_zero(it->second))
        it = entries_.erase(it);
      else
        ++it;
    }
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) {
    SymTensor nb = b;
    nb *= T(-1);
    return a += nb;
  }
  friend bool operator==(const SymTensor& a, const SymTensor& b) {
    return a.dim_ == b.dim_ && a.order_ == b.order_ && a.entries_ == b.entries_;
  }

  SymTensor<double> to_double() const {
    SymTensor<double> t(dim_, order_);
    for (const auto& [a, v] : entries_) t.set(a, homog::to_double(v));
    return t;
  }

  void check_same(const SymTensor& o) const {
    if (o.dim_ != dim_ || o.order_ != order_) throw ContractViolation("tensor order or dimension mismatch");
  }

 private:
  void check_index(const MultiIndex& alpha) const {
    if (alpha.dim() != dim_ || alpha.order() != order_)
      throw ContractViolation("multi-index " + alpha.to_string() + " does not match tensor order " +
                              std::to_string(order_));
  }

  std::size_t dim_ = 1;
  int order_ = 0;
  std::map<MultiIndex, T> entries_;
};

/// (S:T) = sum_{|alpha|=m} binom(m,alpha) S_alpha T_alpha.
template <Scalar T>
T tensor_pair(const SymTensor<T>& s, const SymTensor<T>& t) {
  if (s.order() != t.order() || s.dim() != t.dim())
    throw ContractViolation("tensor_pair requires tensors of equal order and dimension");
  T sum(0);
  for (const auto& [a, v] : s.entries()) {
    auto it = t.entries().find(a);
    if (it != t.entries().end()) sum += scalar_from<T>(multinomial(a)) * v * it->second;
  }
  return sum;
}

/// |T| = (T:T)^{1/2}
template <Scalar T>
double tensor_norm(const SymTensor<T>& t) {
  return std::sqrt(to_double(tensor_pair(t, t)));
}

}  // namespace homog
