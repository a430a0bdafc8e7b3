#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "homog/correctors.hpp"
#include "homog/norms.hpp"
#include "homog/polynomial.hpp"
#include "homog/sym_tensor.hpp"

namespace homog {

/// A = -sum_k abar_{2k} : grad^{2k}, k >= 1. Odd orders are never stored.
class HomogenizedOperator {
 public:
  /// Even-order tensors of a corrector table up to max_order (default: all).
  static HomogenizedOperator from_table(const CorrectorTable& t, int max_order = -1);
  /// Exact operator; keys are tensor orders (even, >= 2; order 2 required).
  static HomogenizedOperator synthetic(std::map<int, SymTensor<Rational>> tensors);
  /// Real-valued operator.
  static HomogenizedOperator real(std::map<int, SymTensor<double>> tensors, std::string provenance = "synthetic");

  std::size_t dim() const { return dim_; }
  int max_order() const { return tensors_.empty() ? 0 : tensors_.rbegin()->first; }
  const std::map<int, SymTensor<double>>& tensors() const { return tensors_; }
  const std::optional<std::map<int, SymTensor<Rational>>>& exact() const { return exact_; }
  const std::string& provenance() const { return provenance_; }
  /// abar_2 as a matrix.
  SquareMatrix<double> abar() const;
  /// The same operator with only abar_2 kept.
  HomogenizedOperator leading_part() const;

 private:
  void validate();

  std::size_t dim_ = 2;
  std::map<int, SymTensor<double>> tensors_;
  std::optional<std::map<int, SymTensor<Rational>>> exact_;
  std::string provenance_;
};

/// -sum_k abar_{2k} : grad^{2k} p (multinomial-weighted pairing).
RealPolynomial apply_A(const HomogenizedOperator& op, const RealPolynomial& p);
/// Exact version; needs op.exact().
RationalPolynomial apply_A(const HomogenizedOperator& op, const RationalPolynomial& p);

struct AHarmonicPolynomial {
  std::shared_ptr<const HomogenizedOperator> op;
  /// The abar-harmonic seed p.
  RealPolynomial seed;
  RealPolynomial q;
  /// Exact q when the rational path was taken.
  std::optional<RationalPolynomial> q_exact;
  int degree() const { return q.is_zero() ? 0 : q.degree(); }
};

/// q = sum_k q_k in coordinates where abar_2 = I, with q_0 = p,
/// p_k = sum_{j=2}^{k+1} abar_{2j} : grad^{2j} q_{k+1-j}, q_k = -S(p_k); mapped back.
/// The exact path is used when op is exact and abar_2 = I.
AHarmonicPolynomial build_A_harmonic(std::shared_ptr<const HomogenizedOperator> op, const RationalPolynomial& p);
AHarmonicPolynomial build_A_harmonic(const HomogenizedOperator& op, const RationalPolynomial& p);
/// Real seed, lifted exactly to rationals.
AHarmonicPolynomial build_A_harmonic(std::shared_ptr<const HomogenizedOperator> op, const RealPolynomial& p);

/// Seed p (abar-harmonic) obtained from a Laplace-harmonic h by h(abar^{-1/2} x).
RealPolynomial abar_harmonic_from(const HomogenizedOperator& op, const RationalPolynomial& h);

struct HarmonicApproximation {
  RealPolynomial p;
  double rel_error = 0;
};

/// p = seed, rel_error = ||q - p||_{L2(E_r)} / ||q||_{L2(E_r)}.
HarmonicApproximation harmonic_approximation(const AHarmonicPolynomial& q, double r);

/// sum_{n <= m} dim of homogeneous harmonics of degree n.
long long a_harmonic_dim(std::size_t dim, int m);

}  // namespace homog
