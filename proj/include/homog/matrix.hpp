#pragma once

#include <initializer_list>
#include <vector>

#include "homog/errors.hpp"
#include "homog/scalar.hpp"

namespace homog {

/// Small dense square matrix, row-major, over an exact or real scalar.
template <Scalar T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), v_(n * n, T(0)) {}
  SquareMatrix(std::size_t n, std::vector<T> row_major) : n_(n), v_(std::move(row_major)) {
    if (v_.size() != n * n) throw ContractViolation("matrix entry count does not match size");
  }

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static SquareMatrix diagonal(std::initializer_list<T> d) {
    SquareMatrix m(d.size());
    std::size_t i = 0;
    for (const T& x : d) {
      m(i, i) = x;
      ++i;
    }
    return m;
  }

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return v_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }
  const std::vector<T>& data() const { return v_; }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    if (a.n_ != b.n_) throw ContractViolation("matrix size mismatch");
    SquareMatrix r(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t k = 0; k < a.n_; ++k)
        for (std::size_t j = 0; j < a.n_; ++j) r(i, j) += a(i, k) * b(k, j);
    return r;
  }

  SquareMatrix transpose() const {
    SquareMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  /// Determinant by Gaussian elimination with partial pivoting.
  T determinant() const {
    SquareMatrix a = *this;
    T det(1);
    for (std::size_t c = 0; c < n_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n_; ++r)
        if (abs_value(a(r, c)) > abs_value(a(piv, c))) piv = r;
      if (homog::is_zero(a(piv, c))) return T(0);
      if (piv != c) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(a(c, j), a(piv, j));
        det = -det;
      }
      det *= a(c, c);
      for (std::size_t r = c + 1; r < n_; ++r) {
        T f = a(r, c) / a(c, c);
        for (std::size_t j = c; j < n_; ++j) a(r, j) -= f * a(c, j);
      }
    }
    return det;
  }

  friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) { return a.n_ == b.n_ && a.v_ == b.v_; }

 private:
  std::size_t n_ = 0;
  std::vector<T> v_;
};

}  // namespace homog
