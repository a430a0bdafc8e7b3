#include "homog/norms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include <Eigen/Eigenvalues>

#include "homog/algebra.hpp"

namespace homog {

namespace {

Rational compute_ball_mean_moment(const MultiIndex& alpha) {
  for (int v : alpha.entries())
    if (v % 2) return Rational(0);
  Integer num = 1;
  for (int v : alpha.entries())
    for (int k = v - 1; k > 0; k -= 2) num *= k;
  Integer den = 1;
  const long d = static_cast<long>(alpha.dim());
  for (long j = 1; j <= alpha.order() / 2; ++j) den *= d + 2 * j;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

struct MomentCache {
  std::shared_mutex mutex;
  std::map<MultiIndex, Rational> values;
};

MomentCache& moment_cache() {
  static MomentCache cache;
  return cache;
}

Eigen::MatrixXd to_eigen(const SquareMatrix<double>& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(i, j);
  return m;
}

SquareMatrix<double> from_eigen(const Eigen::MatrixXd& m) {
  SquareMatrix<double> a(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  return a;
}

SquareMatrix<double> spectral_function(const SquareMatrix<double>& a, double (*f)(double)) {
  if (!is_spd(a)) throw ContractViolation("matrix is not symmetric positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  Eigen::VectorXd ev = es.eigenvalues().unaryExpr(f);
  Eigen::MatrixXd m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  // exact symmetry
  m = 0.5 * (m + m.transpose()).eval();
  return from_eigen(m);
}

}  // namespace

const Rational& ball_mean_moment(const MultiIndex& alpha) {
  auto& cache = moment_cache();
  {
    std::shared_lock lock(cache.mutex);
    auto it = cache.values.find(alpha);
    if (it != cache.values.end()) return it->second;
  }
  Rational v = compute_ball_mean_moment(alpha);
  std::unique_lock lock(cache.mutex);
  // idempotent fill: a concurrent writer may have inserted the same value
  auto [it, inserted] = cache.values.try_emplace(alpha, std::move(v));
  return it->second;
}

double ball_volume(std::size_t dim, double r) {
  const double d = static_cast<double>(dim);
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
}

Rational ball_mean_inner(const RationalPolynomial& p, const RationalPolynomial& q) {
  if (p.dim() != q.dim()) throw ContractViolation("ball_mean_inner: dimension mismatch");
  Rational sum(0);
  for (const auto& [a, ca] : p.terms())
    for (const auto& [b, cb] : q.terms()) {
      const Rational& mom = ball_mean_moment(a + b);
      if (sgn(mom) != 0) sum += ca * cb * mom;
    }
  return sum;
}

double l2_sq_inner_ball(const RealPolynomial& p, const RealPolynomial& q, double r) {
  if (!(r > 0)) throw ContractViolation("ball radius must be positive");
  if (p.dim() != q.dim()) throw ContractViolation("l2_sq_inner_ball: dimension mismatch");
  // scale to the unit ball: p(r y) has coefficients c_alpha r^{|alpha|}
  double sum = 0.0;
  for (const auto& [a, ca] : p.terms()) {
    const double sa = ca * std::pow(r, a.order());
    for (const auto& [b, cb] : q.terms()) {
      const MultiIndex ab = a + b;
      bool odd = false;
      for (int v : ab.entries()) odd = odd || (v % 2);
      if (odd) continue;
      sum += sa * cb * std::pow(r, b.order()) * ball_mean_moment(ab).get_d();
    }
  }
  return sum * ball_volume(p.dim(), r);
}

double l2_norm_ball(const RealPolynomial& p, double r) {
  return std::sqrt(std::max(0.0, l2_sq_inner_ball(p, p, r)));
}

double l2_norm_gradient_ball(const RealPolynomial& p, double r) {
  double s = 0.0;
  for (const auto& g : poly_gradient(p)) s += l2_sq_inner_ball(g, g, r);
  return std::sqrt(std::max(0.0, s));
}

bool is_spd(const SquareMatrix<double>& a) {
  if (a.size() == 0) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double tol = 1e-12 * (std::fabs(a(i, j)) + std::fabs(a(j, i)) + 1e-300);
      if (std::fabs(a(i, j) - a(j, i)) > tol) return false;
    }
  for (double v : a.data())
    if (!std::isfinite(v)) return false;
  auto ev = symmetric_eigenvalues(a);
  return ev.front() > 0.0;
}

std::vector<double> symmetric_eigenvalues(const SquareMatrix<double>& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a), Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return v;  // ascending
}

SquareMatrix<double> spd_sqrt(const SquareMatrix<double>& a) {
  return spectral_function(a, [](double x) { return std::sqrt(x); });
}

SquareMatrix<double> spd_inverse(const SquareMatrix<double>& a) {
  return spectral_function(a, [](double x) { return 1.0 / x; });
}

SquareMatrix<double> spd_inverse_sqrt(const SquareMatrix<double>& a) {
  return spectral_function(a, [](double x) { return 1.0 / std::sqrt(x); });
}

Ellipsoid::Ellipsoid(SquareMatrix<double> abar, double r) : abar_(std::move(abar)), r_(r) {
  if (!(r > 0)) throw ContractViolation("ellipsoid radius must be positive");
  if (!is_spd(abar_)) throw ContractViolation("ellipsoid matrix is not symmetric positive definite");
  inv_ = spd_inverse(abar_);
  sqrt_ = spd_sqrt(abar_);
  det_ = abar_.determinant();
}

double Ellipsoid::quadratic_form(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) s += x[i] * inv_(i, j) * x[j];
  return s;
}

bool Ellipsoid::contains(std::span<const double> x) const { return quadratic_form(x) <= r_ * r_; }

double Ellipsoid::volume() const { return ball_volume(dim(), r_) * std::sqrt(det_); }

double Ellipsoid::half_extent(std::size_t axis) const { return r_ * std::sqrt(abar_(axis, axis)); }

Ellipsoid Ellipsoid::with_radius(double r) const {
  Ellipsoid e = *this;
  if (!(r > 0)) throw ContractViolation("ellipsoid radius must be positive");
  e.r_ = r;
  return e;
}

double l2_sq_inner_ellipsoid(const RealPolynomial& p, const RealPolynomial& q, const Ellipsoid& e) {
  auto pt = change_of_variables(p, e.abar_sqrt());
  auto qt = change_of_variables(q, e.abar_sqrt());
  return std::sqrt(e.det_abar()) * l2_sq_inner_ball(pt, qt, e.radius());
}

double l2_norm_ellipsoid(const RealPolynomial& p, const Ellipsoid& e) {
  return std::sqrt(std::max(0.0, l2_sq_inner_ellipsoid(p, p, e)));
}

double mean_l2_norm_ellipsoid(const RealPolynomial& p, const Ellipsoid& e) {
  return l2_norm_ellipsoid(p, e) / std::sqrt(e.volume());
}

}  // namespace homog
