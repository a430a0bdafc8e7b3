#pragma once

#include <span>
#include <vector>

#include "homog/matrix.hpp"
#include "homog/polynomial.hpp"

namespace homog {

/// Average of x^alpha over the unit ball B_1 in dimension alpha.dim():
/// zero if any exponent is odd, else prod (alpha_i - 1)!! / prod_{j=1}^{|alpha|/2} (d + 2j).
/// Memoized; safe to call concurrently.
const Rational& ball_mean_moment(const MultiIndex& alpha);

/// |B_r| in dimension d.
double ball_volume(std::size_t dim, double r);

/// Exact average of p q over B_1.
Rational ball_mean_inner(const RationalPolynomial& p, const RationalPolynomial& q);

/// int_{B_r} p q dx
double l2_sq_inner_ball(const RealPolynomial& p, const RealPolynomial& q, double r);
/// ||p||_{L^2(B_r)}
double l2_norm_ball(const RealPolynomial& p, double r);
/// ||grad p||_{L^2(B_r)} = (sum_i ||d_i p||^2)^{1/2}
double l2_norm_gradient_ball(const RealPolynomial& p, double r);

/// Symmetric positive-definite helpers (small dense eigendecomposition).
bool is_spd(const SquareMatrix<double>& a);
std::vector<double> symmetric_eigenvalues(const SquareMatrix<double>& a);
SquareMatrix<double> spd_sqrt(const SquareMatrix<double>& a);
SquareMatrix<double> spd_inverse(const SquareMatrix<double>& a);
SquareMatrix<double> spd_inverse_sqrt(const SquareMatrix<double>& a);

/// E_r = { x : x . abar^{-1} x <= r^2 }.
class Ellipsoid {
 public:
  Ellipsoid(SquareMatrix<double> abar, double r);

  const SquareMatrix<double>& abar() const { return abar_; }
  const SquareMatrix<double>& abar_inverse() const { return inv_; }
  const SquareMatrix<double>& abar_sqrt() const { return sqrt_; }
  double radius() const { return r_; }
  std::size_t dim() const { return abar_.size(); }
  double det_abar() const { return det_; }

  bool contains(std::span<const double> x) const;
  /// x . abar^{-1} x
  double quadratic_form(std::span<const double> x) const;
  /// |E_r| = r^d det(abar)^{1/2} |B_1|
  double volume() const;
  /// Half-width of the bounding box along axis i: r sqrt(abar_ii).
  double half_extent(std::size_t axis) const;

  Ellipsoid with_radius(double r) const;

 private:
  SquareMatrix<double> abar_, inv_, sqrt_;
  double r_ = 1.0;
  double det_ = 1.0;
};

/// int_{E} p q dx, via x = abar^{1/2} y so the integral becomes
/// det(abar)^{1/2} int_{B_r} (p o abar^{1/2})(q o abar^{1/2}) dy.
double l2_sq_inner_ellipsoid(const RealPolynomial& p, const RealPolynomial& q, const Ellipsoid& e);
double l2_norm_ellipsoid(const RealPolynomial& p, const Ellipsoid& e);
/// Volume-normalized norm ||p||_{underline L^2(E)}.
double mean_l2_norm_ellipsoid(const RealPolynomial& p, const Ellipsoid& e);

}  // namespace homog
