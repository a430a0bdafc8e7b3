#pragma once

#include <cstdint>
#include <vector>

#include "homog/polynomial.hpp"

namespace homog {

/// Dimension of the homogeneous harmonic polynomials of degree n in d variables.
long long harmonic_dim(std::size_t dim, int n);

/// Basis of the homogeneous harmonic polynomials of degree m, pairwise
/// orthogonal in L^2(B_1) (exact), built from harmonic projections of
/// monomials. Not normalized.
std::vector<RationalPolynomial> harmonic_basis(std::size_t dim, int m);

/// Same basis scaled to unit mean-square on B_1.
std::vector<RealPolynomial> orthonormal_harmonic_basis(std::size_t dim, int m);

/// sum_i c_i b_i over the orthonormal basis with c_i uniform in [-1, 1].
/// Coefficients are rounded to dyadic rationals (2^-20) so the seed lifts to
/// an exact rational that is still harmonic.
RationalPolynomial random_harmonic_seed(std::size_t dim, int m, std::uint64_t seed);

}  // namespace homog
