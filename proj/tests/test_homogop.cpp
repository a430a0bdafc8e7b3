#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "homog/algebra.hpp"
#include "homog/harmonic_basis.hpp"
#include "homog/heterogeneous.hpp"
#include "homog/homogop.hpp"
#include "homog/matrix.hpp"

using namespace homog;

namespace {

MultiIndex mi(std::initializer_list<int> v) { return MultiIndex(std::vector<int>(v)); }

SymTensor<Rational> identity2(std::size_t d) {
  return SymTensor<Rational>::from_avatar(RationalPolynomial::radius_squared(d), 2);
}

RationalPolynomial x4_harmonic() {
  RationalPolynomial p(2);
  p.add_term(mi({4, 0}), Rational(1));
  p.add_term(mi({2, 2}), Rational(-6));
  p.add_term(mi({0, 4}), Rational(1));
  return p;
}

// small random rational tensor, entries k/64 with |k| <= 6
SymTensor<Rational> random_tensor(std::size_t d, int order, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-6, 6);
  SymTensor<Rational> t(d, order);
  for (const auto& a : multi_indices_of_order(d, order)) t.set(a, Rational(u(rng), 64));
  return t;
}

std::size_t rational_rank(std::vector<std::vector<Rational>> c) {
  std::size_t r = 0;
  const std::size_t cols = c.empty() ? 0 : c[0].size();
  for (std::size_t j = 0; j < cols && r < c.size(); ++j) {
    std::size_t piv = r;
    while (piv < c.size() && sgn(c[piv][j]) == 0) ++piv;
    if (piv == c.size()) continue;
    std::swap(c[r], c[piv]);
    for (std::size_t i = r + 1; i < c.size(); ++i) {
      if (sgn(c[i][j]) == 0) continue;
      const Rational f = c[i][j] / c[r][j];
      for (std::size_t k = j; k < cols; ++k) c[i][k] -= f * c[r][k];
    }
    ++r;
  }
  return r;
}

}  // namespace

TEST(ApplyA, LeadingPartIsTrace) {
  SquareMatrix<double> a(2);
  a(0, 0) = 2;
  a(0, 1) = a(1, 0) = 0.5;
  a(1, 1) = 3;
  std::map<int, SymTensor<double>> m;
  m[2] = SymTensor<double>::from_matrix(2, a.data());
  auto op = HomogenizedOperator::real(m);
  // p = x1^2 + 3 x1 x2 - x2^2 + x1: -tr(A D^2 p) = -(2*2 + 2*0.5*3 + 3*(-2)) = -1
  RealPolynomial p(2);
  p.add_term(mi({2, 0}), 1);
  p.add_term(mi({1, 1}), 3);
  p.add_term(mi({0, 2}), -1);
  p.add_term(mi({1, 0}), 1);
  auto r = apply_A(op, p);
  EXPECT_NEAR(r.coeff(mi({0, 0})), -1.0, 1e-15);
  EXPECT_EQ(r.size(), 1u);
  EXPECT_TRUE(apply_A(op, RealPolynomial::variable(2, 1)).is_zero());
}

TEST(ApplyA, FourthOrderEntry) {
  const Rational t(1, 10);
  SymTensor<Rational> a4(2, 4);
  a4.set(mi({4, 0}), t);
  auto op = HomogenizedOperator::synthetic({{2, identity2(2)}, {4, a4}});
  auto r = apply_A(op, RationalPolynomial::monomial(mi({4, 0}), Rational(1)));
  RationalPolynomial expect(2);
  expect.add_term(mi({2, 0}), Rational(-12));
  expect.add_term(mi({0, 0}), Rational(-24) * t);
  EXPECT_EQ(r, expect);
  // finite-difference cross-check of the constant part: d^4/dx1^4 x1^4 = 24
  auto f = [](double x) { return x * x * x * x; };
  const double h = 0.05;
  const double d4 = (f(2 * h) - 4 * f(h) + 6 * f(0) - 4 * f(-h) + f(-2 * h)) / std::pow(h, 4);
  EXPECT_NEAR(-0.1 * d4, -24 * t.get_d(), 1e-9);
}

TEST(BuildAHarmonic, ConstantOperatorIsIdentity) {
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic({{2, identity2(2)}}));
  for (int m = 0; m <= 6; ++m)
    for (const auto& h : harmonic_basis(2, m)) {
      auto q = build_A_harmonic(op, h);
      ASSERT_TRUE(q.q_exact.has_value());
      EXPECT_EQ(*q.q_exact, h);
    }
}

TEST(BuildAHarmonic, LowDegreeUnchanged) {
  std::mt19937_64 rng(3);
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic(
      {{2, identity2(3)}, {4, random_tensor(3, 4, rng)}, {6, random_tensor(3, 6, rng)}}));
  for (int m = 0; m <= 3; ++m)
    for (const auto& h : harmonic_basis(3, m)) EXPECT_EQ(*build_A_harmonic(op, h).q_exact, h);
}

TEST(BuildAHarmonic, OneStepExample) {
  SymTensor<Rational> a4(2, 4);
  a4.set(mi({4, 0}), Rational(1, 20));
  a4.set(mi({2, 2}), Rational(-1, 30));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic({{2, identity2(2)}, {4, a4}}));
  const auto p = x4_harmonic();
  auto q = build_A_harmonic(op, p);
  // a4 : grad^4 p is constant; q = p - S(const)
  auto c = contract_gradient(a4, p);
  EXPECT_EQ(c.degree(), 0);
  EXPECT_EQ(*q.q_exact, p - apply_S(c));
  EXPECT_TRUE(apply_A(*op, *q.q_exact).is_zero());
}

TEST(BuildAHarmonic, RandomOperatorsExact) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    for (std::size_t d : {2u, 3u}) {
      auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic(
          {{2, identity2(d)}, {4, random_tensor(d, 4, rng)}, {6, random_tensor(d, 6, rng)}}));
      const int mmax = d == 2 ? 8 : 6;
      for (int m = 4; m <= mmax; ++m) {
        auto p = random_harmonic_seed(d, m, 100 + m);
        auto q = build_A_harmonic(op, p);
        EXPECT_TRUE(apply_A(*op, *q.q_exact).is_zero()) << "d=" << d << " m=" << m;
        EXPECT_LE((*q.q_exact - p).degree(), m - 2);
      }
    }
  }
}

TEST(BuildAHarmonic, Linearity) {
  std::mt19937_64 rng(5);
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic(
      {{2, identity2(2)}, {4, random_tensor(2, 4, rng)}, {6, random_tensor(2, 6, rng)}}));
  auto p1 = random_harmonic_seed(2, 6, 1), p2 = random_harmonic_seed(2, 5, 2);
  auto q1 = build_A_harmonic(op, p1), q2 = build_A_harmonic(op, p2), q12 = build_A_harmonic(op, p1 + p2);
  EXPECT_EQ(*q12.q_exact, *q1.q_exact + *q2.q_exact);
}

TEST(BuildAHarmonic, NonHarmonicSeedRejected) {
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic({{2, identity2(2)}}));
  EXPECT_THROW(build_A_harmonic(op, RationalPolynomial::radius_squared(2)), ContractViolation);
}

TEST(BuildAHarmonic, GeneralAbarReal) {
  std::map<int, SymTensor<double>> m;
  SquareMatrix<double> a(2);
  a(0, 0) = 1.5;
  a(0, 1) = a(1, 0) = 0.2;
  a(1, 1) = 1.2;
  m[2] = SymTensor<double>::from_matrix(2, a.data());
  SymTensor<double> a4(2, 4);
  a4.set(mi({4, 0}), 0.03);
  a4.set(mi({1, 3}), -0.02);
  a4.set(mi({2, 2}), 0.01);
  m[4] = a4;
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::real(m));
  auto seed = abar_harmonic_from(*op, x4_harmonic());
  auto q = build_A_harmonic(op, seed);
  EXPECT_LT(poly_norm(apply_A(*op, q.q)), 1e-10 * poly_norm(q.q));
  EXPECT_FALSE(q.q_exact.has_value());
}

TEST(BuildAHarmonic, BasisRank) {
  std::mt19937_64 rng(9);
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic(
      {{2, identity2(2)}, {4, random_tensor(2, 4, rng)}, {6, random_tensor(2, 6, rng)}}));
  const int m = 6;
  std::vector<RationalPolynomial> outs;
  for (int n = 0; n <= m; ++n)
    for (const auto& h : harmonic_basis(2, n)) outs.push_back(*build_A_harmonic(op, h).q_exact);
  const auto monos = multi_indices_up_to(2, m);
  std::vector<std::vector<Rational>> c(outs.size(), std::vector<Rational>(monos.size()));
  for (std::size_t i = 0; i < outs.size(); ++i)
    for (std::size_t j = 0; j < monos.size(); ++j) c[i][j] = outs[i].coeff(monos[j]);
  EXPECT_EQ(static_cast<long long>(rational_rank(c)), a_harmonic_dim(2, m));
}

TEST(AHarmonicDim, Examples) {
  EXPECT_EQ(a_harmonic_dim(2, 3), 7);
  EXPECT_EQ(a_harmonic_dim(3, 2), 9);
  EXPECT_EQ(a_harmonic_dim(2, 0), 1);
}

TEST(HarmonicApproximation, Decay) {
  SymTensor<Rational> a4(2, 4);
  a4.set(mi({4, 0}), Rational(1, 20));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic({{2, identity2(2)}, {4, a4}}));
  auto q = build_A_harmonic(op, x4_harmonic());
  const double e1 = harmonic_approximation(q, 5).rel_error, e2 = harmonic_approximation(q, 10).rel_error;
  EXPECT_GT(e1, 0);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
  auto c = std::make_shared<HomogenizedOperator>(HomogenizedOperator::synthetic({{2, identity2(2)}}));
  EXPECT_EQ(harmonic_approximation(build_A_harmonic(c, x4_harmonic()), 3).rel_error, 0.0);
  EXPECT_EQ(harmonic_approximation(build_A_harmonic(op, RationalPolynomial::variable(2, 0)), 3).rel_error, 0.0);
}

TEST(Heterogeneous, ConstantCoefficientsGiveQ) {
  SquareMatrix<double> a(2);
  a(0, 0) = 2;
  a(1, 1) = 1;
  auto field = std::make_shared<CoefficientField>(CoefficientField::constant(2, 16, a));
  auto table = std::make_shared<CorrectorTable>(compute_correctors(field, 4));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  auto q = build_A_harmonic(op, abar_harmonic_from(*op, x4_harmonic()));
  auto psi = build_heterogeneous(q, table);
  for (double x : {0.1, 1.37, -2.2}) {
    std::vector<double> pt{x, 0.5 * x + 0.3};
    EXPECT_NEAR(psi(pt), q.q.evaluate(pt), 1e-9 * (1 + std::fabs(q.q.evaluate(pt))));
  }
  EXPECT_LT(residual_psi(psi), 1e-8);
  EXPECT_LT(psi_poly_error(psi, 6), 1e-8);
  Ellipsoid e(op->abar(), 6);
  auto in = psi.integrals(e);
  EXPECT_NEAR(in.psi_sq(), l2_sq_inner_ellipsoid(q.q, q.q, e), 1e-8 * in.qq);
}

TEST(Heterogeneous, ConstantSeed) {
  auto field = std::make_shared<CoefficientField>(CoefficientField::checkerboard(2, 16, 1, 4));
  auto table = std::make_shared<CorrectorTable>(compute_correctors(field, 2));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  auto psi = build_heterogeneous(build_A_harmonic(op, RationalPolynomial::constant(2, Rational(1))), table);
  std::vector<double> pt{0.3, 0.7};
  EXPECT_DOUBLE_EQ(psi(pt), 1.0);
  EXPECT_EQ(psi_poly_error(psi, 5), 0.0);
}

TEST(Heterogeneous, LaminateFirstOrder) {
  const double a = 1, b = 2, ah = 4.0 / 3.0;
  auto field = std::make_shared<CoefficientField>(CoefficientField::laminate(2, 64, a, b));
  auto table = std::make_shared<CorrectorTable>(compute_correctors(field, 2));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  auto psi = build_heterogeneous(build_A_harmonic(op, RationalPolynomial::variable(2, 0)), table);
  // psi = x1 + phi, with phi' = ah/alpha - 1; check the increments over grid nodes
  for (double x : {0.125, 0.375, 0.625, 0.875}) {
    std::vector<double> p0{x, 0.2}, p1{x + 0.125, 0.2};
    const double slope = (psi(p1) - psi(p0)) / 0.125;
    const double alpha = x < 0.5 ? a : b;
    if (x + 0.125 <= 0.5 || x >= 0.5) {
      EXPECT_NEAR(slope, ah / alpha, 1e-9);
    }
  }
  EXPECT_LT(residual_psi(psi), 1e-8);
}

TEST(Heterogeneous, TruncatedTableRejectedUnlessAllowed) {
  auto field = std::make_shared<CoefficientField>(CoefficientField::laminate(2, 16, 1, 2));
  auto table = std::make_shared<CorrectorTable>(compute_correctors(field, 2));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  auto q = build_A_harmonic(op, abar_harmonic_from(*op, harmonic_basis(2, 3).back()));
  EXPECT_THROW(build_heterogeneous(q, table), ContractViolation);
  EXPECT_NO_THROW(build_heterogeneous(q, table, true));
}

TEST(Heterogeneous, QuadratureRefusesCoarseSampling) {
  auto field = std::make_shared<CoefficientField>(CoefficientField::laminate(2, 16, 1, 2));
  auto table = std::make_shared<CorrectorTable>(compute_correctors(field, 2));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  auto psi = build_heterogeneous(build_A_harmonic(op, RationalPolynomial::variable(2, 0)), table);
  EXPECT_THROW(psi.integrals(Ellipsoid(op->abar(), 4), 4), ContractViolation);
}

// the lattice/boundary split of the fast quadrature against brute-force midpoint sampling
TEST(Heterogeneous, FastQuadratureMatchesBruteForce) {
  auto field = std::make_shared<CoefficientField>(CoefficientField::checkerboard(2, 16, 1, 4));
  auto table = std::make_shared<CorrectorTable>(compute_correctors(field, 3));
  auto op = std::make_shared<HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  auto q = build_A_harmonic(op, abar_harmonic_from(*op, harmonic_basis(2, 3).back()));
  auto psi = build_heterogeneous(q, table);
  const double r = 3.3;
  Ellipsoid e(op->abar(), r);
  auto in = psi.integrals(e, 8);
  const int nq = 16;  // integrals() reports the 2Q value
  const double hx = 1.0 / nq;
  const long ext = static_cast<long>(std::ceil(e.half_extent(0) + e.half_extent(1))) + 1;
  double qw = 0, ww = 0;
  for (long i = -ext * nq; i < ext * nq; ++i)
    for (long j = -ext * nq; j < ext * nq; ++j) {
      std::vector<double> x{(i + 0.5) * hx, (j + 0.5) * hx};
      if (!e.contains(x)) continue;
      const double w = psi.corrector_part(x), qv = q.q.evaluate(x);
      qw += w * qv;
      ww += w * w;
    }
  qw *= hx * hx;
  ww *= hx * hx;
  EXPECT_NEAR(in.qw, qw, 1e-9 * (std::fabs(qw) + in.qq));
  EXPECT_NEAR(in.ww, ww, 1e-9 * (ww + 1));
}
