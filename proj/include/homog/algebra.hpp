#pragma once

#include <map>
#include <optional>
#include <vector>

#include "homog/matrix.hpp"
#include "homog/polynomial.hpp"
#include "homog/sym_tensor.hpp"

namespace homog {

/// <p, q>_P = sum_k (1/k!) grad^k p(0) : grad^k q(0); on monomials
/// <x^alpha, x^beta> = alpha! [alpha == beta].
template <Scalar T>
T poly_inner(const Polynomial<T>& p, const Polynomial<T>& q);

/// ||p||_P as a double.
template <Scalar T>
double poly_norm(const Polynomial<T>& p);

template <Scalar T>
Polynomial<T> laplacian(const Polynomial<T>& p);

/// |x|^2 p
template <Scalar T>
Polynomial<T> mult_r2(const Polynomial<T>& p);

/// |x|^{2k} p
template <Scalar T>
Polynomial<T> mult_r2k(const Polynomial<T>& p, int k);

template <Scalar T>
std::vector<Polynomial<T>> poly_gradient(const Polynomial<T>& p);

/// grad^n p as a symmetric-tensor-valued polynomial: component alpha holds
/// d^alpha p.
template <Scalar T>
struct GradientTensor {
  std::size_t dim = 1;
  int order = 0;
  std::map<MultiIndex, Polynomial<T>> components;

  bool is_zero() const;
  /// Evaluates every component at x.
  SymTensor<T> at(std::span<const T> x) const;
};

template <Scalar T>
GradientTensor<T> grad_tensor(const Polynomial<T>& p, int n);

/// t : grad^k p with the multinomial-weighted pairing (k = t.order()).
template <Scalar T>
Polynomial<T> contract_gradient(const SymTensor<T>& t, const Polynomial<T>& p);

/// Splits a homogeneous p of degree m as sum_k |x|^{2k} p_k with p_k
/// harmonic and homogeneous of degree m - 2k. Returns (p_0, ..., p_{m/2}).
/// The zero polynomial needs `degree` to size the list (else {0}).
template <Scalar T>
std::vector<Polynomial<T>> harmonic_decompose(const Polynomial<T>& p, std::optional<int> degree = std::nullopt);

/// Right inverse of the Laplacian whose range is orthogonal to the
/// harmonic polynomials under <.,.>_P.
template <Scalar T>
Polynomial<T> apply_S(const Polynomial<T>& p);

/// x -> p(L x), expanded. Throws on singular L.
template <Scalar T>
Polynomial<T> change_of_variables(const Polynomial<T>& p, const SquareMatrix<T>& L);

/// x -> p(x + shift), expanded.
template <Scalar T>
Polynomial<T> translate(const Polynomial<T>& p, std::span<const T> shift);

}  // namespace homog
