#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homog/algebra.hpp"
#include "homog/harmonic_basis.hpp"
#include "homog/norms.hpp"
#include "homog/serialize.hpp"

using namespace homog;

namespace {

RationalPolynomial x(std::size_t d, std::size_t i) { return RationalPolynomial::variable(d, i); }
RationalPolynomial cst(std::size_t d, long n, long den = 1) { return RationalPolynomial::constant(d, Rational(n, den)); }

RationalPolynomial random_homogeneous(std::size_t d, int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-9, 9);
  RationalPolynomial p(d);
  for (const auto& a : multi_indices_of_order(d, m)) p.add_term(a, Rational(u(rng), 1 + (u(rng) + 9) % 5));
  return p;
}

}  // namespace

TEST(MultiIndex, OrderingIsGraded) {
  auto v = multi_indices_up_to(2, 2);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v[0], MultiIndex({0, 0}));
  EXPECT_EQ(v[1], MultiIndex({1, 0}));
  EXPECT_EQ(v[2], MultiIndex({0, 1}));
  EXPECT_EQ(v[3], MultiIndex({2, 0}));
  EXPECT_EQ(multinomial(MultiIndex({1, 1})), 2);
  EXPECT_THROW(MultiIndex({1, 0}) - MultiIndex({0, 1}), ContractViolation);
}

TEST(TensorPair, Examples) {
  SymTensor<Rational> s(2, 2);
  s.set(MultiIndex({1, 1}), Rational(1));
  EXPECT_EQ(tensor_pair(s, s), 2);
  std::vector<Rational> e1{Rational(1), Rational(0)};
  auto t = SymTensor<Rational>::outer_power(std::span<const Rational>(e1), 2);
  EXPECT_EQ(tensor_pair(t, t), 1);
  EXPECT_THROW(tensor_pair(s, SymTensor<Rational>(2, 3)), ContractViolation);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(-5, 5);
  SymTensor<Rational> a(3, 3), b(3, 3);
  for (const auto& al : multi_indices_of_order(3, 3)) {
    a.set(al, Rational(u(rng)));
    b.set(al, Rational(u(rng)));
  }
  EXPECT_EQ(tensor_pair(a, b), tensor_pair(b, a));
  EXPECT_GT(tensor_pair(a, a), 0);
}

TEST(TensorPair, MatchesFullContraction) {
  // sum over ordered index tuples of S_{i1..im} T_{i1..im}
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  SymTensor<double> s(3, 3), t(3, 3);
  for (const auto& al : multi_indices_of_order(3, 3)) {
    s.set(al, u(rng));
    t.set(al, u(rng));
  }
  double full = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        MultiIndex a(3);
        a.increment(i);
        a.increment(j);
        a.increment(k);
        full += s.at(a) * t.at(a);
      }
  EXPECT_NEAR(tensor_pair(s, t), full, 1e-14);
}

TEST(PolyInner, Examples) {
  auto x1 = x(2, 0), x2 = x(2, 1);
  EXPECT_EQ(poly_inner(x1 * x1, x1 * x1), 2);
  EXPECT_EQ(poly_inner(x1 * x2, x1 * x2), 1);
  EXPECT_EQ(poly_inner(x1 * x1, RationalPolynomial::radius_squared(2)), 2);
  EXPECT_THROW(poly_inner(x1, x(3, 0)), ContractViolation);
}

TEST(Laplacian, Examples) {
  for (std::size_t d : {2u, 3u}) {
    auto r2 = RationalPolynomial::radius_squared(d);
    EXPECT_TRUE(laplacian(x(d, 0) * x(d, 0) - x(d, 1) * x(d, 1)).is_zero());
    EXPECT_EQ(laplacian(r2), cst(d, 2 * static_cast<long>(d)));
    EXPECT_EQ(laplacian(r2 * r2), r2 * Rational(4 * (static_cast<long>(d) + 2)));
  }
}

TEST(MultR2, Examples) {
  EXPECT_EQ(mult_r2(cst(3, 1)), RationalPolynomial::radius_squared(3));
  EXPECT_TRUE(mult_r2(RationalPolynomial(2)).is_zero());
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    auto p = random_homogeneous(3, 3, rng);
    auto q = random_homogeneous(3, 5, rng) + random_homogeneous(3, 2, rng);
    EXPECT_EQ(poly_inner(mult_r2(p), q), poly_inner(p, laplacian(q)));
  }
}

TEST(Gradient, Examples) {
  auto g = poly_gradient(x(2, 0) * x(2, 1));
  EXPECT_EQ(g[0], x(2, 1));
  EXPECT_EQ(g[1], x(2, 0));
  auto p = x(3, 0) * x(3, 0) * x(3, 0) * x(3, 0);
  auto t = grad_tensor(p, 4);
  ASSERT_EQ(t.components.size(), 1u);
  EXPECT_EQ(t.components.at(MultiIndex({4, 0, 0})), cst(3, 24));
  EXPECT_TRUE(grad_tensor(p, 5).is_zero());
  EXPECT_EQ(grad_tensor(p, 0).components.at(MultiIndex(3)), p);
}

TEST(HarmonicDecompose, Examples) {
  auto x1 = x(2, 0), x2 = x(2, 1);
  auto parts = harmonic_decompose(x1 * x1);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0], (x1 * x1 - x2 * x2) * Rational(1, 2));
  EXPECT_EQ(parts[1], cst(2, 1, 2));
  auto h = x1 * x1 * x1 - Rational(3) * x1 * x2 * x2;
  parts = harmonic_decompose(h);
  EXPECT_EQ(parts[0], h);
  EXPECT_TRUE(parts[1].is_zero());
  auto r2 = RationalPolynomial::radius_squared(3);
  parts = harmonic_decompose(r2 * r2);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_TRUE(parts[0].is_zero());
  EXPECT_TRUE(parts[1].is_zero());
  EXPECT_EQ(parts[2], cst(3, 1));
  EXPECT_THROW(harmonic_decompose(x1 + x1 * x1), ContractViolation);
  EXPECT_EQ(harmonic_decompose(RationalPolynomial(2), 4).size(), 3u);
}

TEST(ApplyS, Examples) {
  for (std::size_t d : {2u, 3u}) {
    const long dl = static_cast<long>(d);
    auto r2 = RationalPolynomial::radius_squared(d);
    EXPECT_EQ(apply_S(cst(d, 1)), r2 * Rational(1, 2 * dl));
    EXPECT_EQ(apply_S(x(d, 0)), r2 * x(d, 0) * Rational(1, 2 * (dl + 2)));
    EXPECT_EQ(apply_S(r2), r2 * r2 * Rational(1, 4 * (dl + 2)));
    EXPECT_TRUE(apply_S(RationalPolynomial(d)).is_zero());
  }
}

TEST(ApplyS, InverseAndOrthogonal) {
  std::mt19937_64 rng(11);
  for (std::size_t d : {2u, 3u})
    for (int m = 0; m <= 6; ++m) {
      auto p = random_homogeneous(d, m, rng);
      auto s = apply_S(p);
      EXPECT_EQ(laplacian(s), p);
      for (const auto& h : harmonic_basis(d, m + 2)) EXPECT_EQ(poly_inner(s, h), 0);
    }
}

TEST(BallNorms, Examples) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(std::pow(l2_norm_ball(RealPolynomial::constant(2, 1.0), 1.0), 2), pi, 1e-14);
  EXPECT_NEAR(std::pow(l2_norm_ball(RealPolynomial::variable(2, 0), 1.0), 2), pi / 4, 1e-14);
  EXPECT_NEAR(std::pow(l2_norm_ball(RealPolynomial::variable(3, 0), 1.0), 2), 4 * pi / 15, 1e-14);
  EXPECT_THROW(l2_norm_ball(RealPolynomial::constant(2, 1.0), 0.0), ContractViolation);
}

TEST(BallNorms, MonteCarloCrossCheck) {
  // independent oracle: sampling the cube [-1,1]^3
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  double s = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a * a + b * b + c * c <= 1) s += a * a;
  }
  const double mc = 8.0 * s / n;
  EXPECT_NEAR(mc, std::pow(l2_norm_ball(RealPolynomial::variable(3, 0), 1.0), 2), 3e-3);
}

TEST(BallNorms, PolarQuadratureCrossCheck) {
  // d = 2, p = x1^2 x2 + x2^3: midpoint in (rho, angle)
  RealPolynomial p(2);
  p.add_term(MultiIndex({2, 1}), 1.0);
  p.add_term(MultiIndex({0, 3}), 1.0);
  const int n = 600;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double rho = 2.0 * (i + 0.5) / n, t = 2 * std::numbers::pi * (j + 0.5) / n;
      std::array<double, 2> pt{rho * std::cos(t), rho * std::sin(t)};
      const double v = p.evaluate(std::span<const double>(pt));
      s += v * v * rho;
    }
  s *= (2.0 / n) * (2 * std::numbers::pi / n);
  EXPECT_NEAR(l2_sq_inner_ball(p, p, 2.0) / s, 1.0, 1e-4);
}

TEST(Ellipsoid, Examples) {
  RealPolynomial one = RealPolynomial::constant(2, 1.0);
  Ellipsoid e(SquareMatrix<double>::diagonal({4.0, 1.0}), 1.0);
  EXPECT_NEAR(std::pow(l2_norm_ellipsoid(one, e), 2), 2 * std::numbers::pi, 1e-13);
  Ellipsoid id(SquareMatrix<double>::identity(2), 3.0);
  RealPolynomial p = RealPolynomial::variable(2, 0) * RealPolynomial::variable(2, 1) + one;
  EXPECT_NEAR(l2_norm_ellipsoid(p, id), l2_norm_ball(p, 3.0), 1e-12);
  const double theta = 0.3;
  EXPECT_NEAR(l2_norm_ellipsoid(one, e.with_radius(5.0)) / l2_norm_ellipsoid(one, e.with_radius(5.0 * theta)),
              std::pow(theta, -1.0), 1e-12);
  EXPECT_NEAR(mean_l2_norm_ellipsoid(one, e.with_radius(7.0)), 1.0, 1e-13);
  EXPECT_THROW(Ellipsoid(SquareMatrix<double>::diagonal({1.0, -1.0}), 1.0), ContractViolation);
  EXPECT_THROW(Ellipsoid(SquareMatrix<double>(2, {1.0, 0.5, 0.0, 1.0}), 1.0), ContractViolation);
}

TEST(Ellipsoid, QuadratureCrossCheck) {
  // rotated ellipse, p = x1^2: midpoint rule on the bounding box
  SquareMatrix<double> a(2, {3.0, 1.0, 1.0, 2.0});
  Ellipsoid e(a, 1.5);
  RealPolynomial p = RealPolynomial::variable(2, 0) * RealPolynomial::variable(2, 0);
  const int n = 1500;
  const double hx = e.half_extent(0), hy = e.half_extent(1);
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::array<double, 2> pt{-hx + 2 * hx * (i + 0.5) / n, -hy + 2 * hy * (j + 0.5) / n};
      if (e.contains(pt)) s += std::pow(pt[0], 4);
    }
  s *= (2 * hx / n) * (2 * hy / n);
  EXPECT_NEAR(std::pow(l2_norm_ellipsoid(p, e), 2) / s, 1.0, 2e-3);
}

TEST(ChangeOfVariables, Examples) {
  auto x1 = x(2, 0), x2 = x(2, 1);
  EXPECT_EQ(change_of_variables(x1 * x2 + x1, SquareMatrix<Rational>::identity(2)), x1 * x2 + x1);
  EXPECT_EQ(change_of_variables(x1 * x1, SquareMatrix<Rational>::diagonal({Rational(2), Rational(1)})),
            x1 * x1 * Rational(4));
  SquareMatrix<Rational> rot(2, {Rational(0), Rational(-1), Rational(1), Rational(0)});
  EXPECT_EQ(change_of_variables(x1 * x2, rot), -(x1 * x2));
  EXPECT_THROW(change_of_variables(x1, SquareMatrix<Rational>(2)), ContractViolation);
  SquareMatrix<Rational> m(2, {Rational(1), Rational(2), Rational(3), Rational(5)});
  auto p = x1 * x1 * x2 + x2;
  EXPECT_EQ(change_of_variables(change_of_variables(p, rot), m), change_of_variables(p, rot * m));
}

TEST(HarmonicBasis, DimensionsAndOrthogonality) {
  EXPECT_EQ(harmonic_dim(2, 0), 1);
  EXPECT_EQ(harmonic_dim(2, 5), 2);
  EXPECT_EQ(harmonic_dim(3, 2), 5);
  for (std::size_t d : {2u, 3u})
    for (int m = 0; m <= 6; ++m) {
      auto b = harmonic_basis(d, m);
      ASSERT_EQ(static_cast<long long>(b.size()), harmonic_dim(d, m));
      for (std::size_t i = 0; i < b.size(); ++i) {
        EXPECT_TRUE(laplacian(b[i]).is_zero());
        for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(ball_mean_inner(b[i], b[j]), 0);
      }
    }
  auto s1 = random_harmonic_seed(3, 4, 99), s2 = random_harmonic_seed(3, 4, 99);
  EXPECT_EQ(s1, s2);
  EXPECT_TRUE(laplacian(s1).is_zero());
  EXPECT_EQ(s1.degree(), 4);
}

TEST(Serialize, RoundTrip) {
  auto p = x(2, 0) * Rational(3, 7) + cst(2, -5, 11);
  EXPECT_EQ(rational_polynomial_from_json(to_json(p)), p);
  auto pd = p.to_double();
  EXPECT_EQ(real_polynomial_from_json(Json::parse(to_json(pd).dump())), pd);
  SymTensor<Rational> t(3, 4);
  t.set(MultiIndex({2, 1, 1}), Rational(-1, 10));
  EXPECT_EQ(rational_tensor_from_json(to_json(t)), t);
  EXPECT_THROW(rational_polynomial_from_json(Json::parse(R"({"d":2,"terms":[{"alpha":[1],"num":"1","den":"1"}]})")),
               FormatError);
}
