#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace homog {

using Rational = mpq_class;
using Integer = mpz_class;

/// Multi-index alpha in N_0^d. Ordered graded-lexicographically: lower total
/// order first, and within one order the larger leading exponent first, so
/// iteration over a polynomial reads 1, x1, x2, x1^2, x1 x2, x2^2, ...
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : e_(dim, 0) {}
  MultiIndex(std::initializer_list<int> entries);
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex unit(std::size_t dim, std::size_t axis);

  std::size_t dim() const { return e_.size(); }
  int order() const { return order_; }

  int operator[](std::size_t i) const { return e_[i]; }
  void set(std::size_t i, int value);
  void increment(std::size_t i, int by = 1);

  const std::vector<int>& entries() const { return e_; }

  /// Componentwise <=.
  bool divides(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Throws ContractViolation when a component would become negative.
  MultiIndex operator-(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e_ == b.e_; }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b);

  std::string to_string() const;

 private:
  std::vector<int> e_;
  int order_ = 0;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& a);

/// All multi-indices of total order m in dimension d, in canonical order.
std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int m);

/// All multi-indices of total order <= m, in canonical order.
std::vector<MultiIndex> multi_indices_up_to(std::size_t dim, int m);

Integer factorial(unsigned n);
/// alpha! = alpha_1! ... alpha_d!
Integer factorial(const MultiIndex& alpha);
/// binom(|alpha|, alpha) = |alpha|! / alpha!
Integer multinomial(const MultiIndex& alpha);
Integer binomial(unsigned n, unsigned k);
/// prod_i binom(alpha_i, beta_i); requires beta <= alpha componentwise.
Integer binomial(const MultiIndex& alpha, const MultiIndex& beta);

/// Dimension of the homogeneous polynomials of degree m in d variables.
long long homogeneous_dim(std::size_t dim, int m);

}  // namespace homog
