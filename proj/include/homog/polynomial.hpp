#pragma once

#include <climits>
#include <map>
#include <span>
#include <vector>

#include "homog/errors.hpp"
#include "homog/multi_index.hpp"
#include "homog/scalar.hpp"

namespace homog {

/// Sparse multivariate polynomial: multi-index -> coefficient. Exact zeros
/// are never stored, so the zero polynomial has no terms.
template <Scalar T>
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, T>;
  static constexpr int kZeroDegree = INT_MIN;  // stands in for -infinity

  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ContractViolation("polynomial dimension must be >= 1");
  }

  static Polynomial constant(std::size_t dim, const T& c) {
    Polynomial p(dim);
    p.add_term(MultiIndex(dim), c);
    return p;
  }
  static Polynomial monomial(const MultiIndex& alpha, const T& c) {
    Polynomial p(alpha.dim());
    p.add_term(alpha, c);
    return p;
  }
  static Polynomial variable(std::size_t dim, std::size_t axis) {
    return monomial(MultiIndex::unit(dim, axis), T(1));
  }
  /// |x|^2
  static Polynomial radius_squared(std::size_t dim) {
    Polynomial p(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      MultiIndex a(dim);
      a.set(i, 2);
      p.add_term(a, T(1));
    }
    return p;
  }

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    // map order is graded, so the last key has maximal order
    return terms_.empty() ? kZeroDegree : terms_.rbegin()->first.order();
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    return terms_.begin()->first.order() == terms_.rbegin()->first.order();
  }

  T coeff(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? T(0) : it->second;
  }

  void add_term(const MultiIndex& alpha, const T& c) {
    if (alpha.dim() != dim_) throw ContractViolation("term dimension does not match polynomial");
    T v = c;
    canonicalize(v);
    if (homog::is_zero(v)) return;
    auto [it, inserted] = terms_.try_emplace(alpha, v);
    if (!inserted) {
      it->second += v;
      if (homog::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Sum of the terms of total order m.
  Polynomial homogeneous_part(int m) const {
    Polynomial r(dim_);
    for (const auto& [a, c] : terms_)
      if (a.order() == m) r.terms_.emplace(a, c);
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, T(-c));
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    T f = s;
    canonicalize(f);
    if (homog::is_zero(f)) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= f;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= T(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial r(a.dim_);
    for (const auto& [x, cx] : a.terms_)
      for (const auto& [y, cy] : b.terms_) r.add_term(x + y, T(cx * cy));
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Partial derivative along one axis.
  Polynomial derivative(std::size_t axis) const {
    Polynomial r(dim_);
    for (const auto& [a, c] : terms_) {
      if (a[axis] == 0) continue;
      MultiIndex b = a;
      b.increment(axis, -1);
      r.add_term(b, T(c * scalar_from<T>(static_cast<long long>(a[axis]))));
    }
    return r;
  }

  /// Mixed partial derivative d^alpha.
  Polynomial derivative(const MultiIndex& alpha) const {
    if (alpha.dim() != dim_) throw ContractViolation("derivative multi-index dimension mismatch");
    Polynomial r(dim_);
    for (const auto& [a, c] : terms_) {
      if (!alpha.divides(a)) continue;
      T factor(1);
      for (std::size_t i = 0; i < dim_; ++i)
        for (int k = 0; k < alpha[i]; ++k) factor *= scalar_from<T>(static_cast<long long>(a[i] - k));
      r.add_term(a - alpha, T(c * factor));
    }
    return r;
  }

  template <class X>
  X evaluate(std::span<const X> x) const {
    if (x.size() != dim_) throw ContractViolation("evaluation point dimension mismatch");
    X sum(0);
    for (const auto& [a, c] : terms_) {
      X term = X(to_value<X>(c));
      for (std::size_t i = 0; i < dim_; ++i)
        for (int k = 0; k < a[i]; ++k) term *= x[i];
      sum += term;
    }
    return sum;
  }

  double evaluate(std::span<const double> x) const { return evaluate<double>(x); }

  /// Lossy conversion of the coefficients to double.
  Polynomial<double> to_double() const {
    Polynomial<double> r(dim_);
    for (const auto& [a, c] : terms_) r.add_term(a, homog::to_double(c));
    return r;
  }

 private:
  template <class X>
  static X to_value(const T& c) {
    if constexpr (std::is_same_v<X, double>) {
      return homog::to_double(c);
    } else {
      return X(c);
    }
  }

  void check_dim(const Polynomial& o) const {
    if (o.dim_ != dim_) throw ContractViolation("polynomial dimension mismatch");
  }

  std::size_t dim_ = 1;
  Terms terms_;
};

using RationalPolynomial = Polynomial<Rational>;
using RealPolynomial = Polynomial<double>;

/// Exact lift of a double polynomial (each double is an exact rational).
RationalPolynomial to_rational(const RealPolynomial& p);

}  // namespace homog
