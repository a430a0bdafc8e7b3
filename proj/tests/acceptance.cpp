// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "homog/algebra.hpp"
#include "homog/harmonic_basis.hpp"
#include "homog/verify.hpp"

using namespace homog;

namespace {

// pinned tolerances
constexpr int kExactMaxDegree = 12;
constexpr int kBoundSamples = 200;
constexpr double kBoundRelTol = 1e-12;
constexpr std::size_t kLaminateN = 512;
constexpr double kAbarTol = 2e-3;
constexpr double kPhi1Tol = 5e-3;
constexpr double kOddTol = 5e-2;
constexpr double kIdentityTol = 5e-2;
// below this a value is roundoff and "strictly smaller at 2N" carries no information
constexpr double kRefinementFloor = 1e-6;
constexpr int kContractOperators = 20;
constexpr int kContractMaxDegree = 8;
constexpr double kSyntheticMagnitude = 0.1;
constexpr double kResidualRatio = 1.7;
constexpr double kResidualFloor = 1e-10;
constexpr double kSlopeLo = -1.3, kSlopeHi = -0.7;
constexpr double kControlTol = 1e-3;
constexpr double kDoublingVariation = 0.10;

int failures = 0;

void report(int k, bool pass, const std::string& what, double seconds) {
  std::printf("criterion %2d: %s  %s  [%.1fs]\n", k, pass ? "PASS" : "FAIL", what.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

RationalPolynomial random_rational(std::size_t d, int m, bool homogeneous, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-9, 9), den(1, 7);
  RationalPolynomial p(d);
  const auto idx = homogeneous ? multi_indices_of_order(d, m) : multi_indices_up_to(d, m);
  for (const auto& a : idx) p.add_term(a, Rational(u(rng), den(rng)));
  return p;
}

RealPolynomial random_real(std::size_t d, int m, bool homogeneous, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  RealPolynomial p(d);
  const auto idx = homogeneous ? multi_indices_of_order(d, m) : multi_indices_up_to(d, m);
  for (const auto& a : idx) p.add_term(a, u(rng));
  return p;
}

// 1D closed form: mean-zero corrector of the half-period laminate
double laminate_phi1(double x, double a, double b) {
  const double ah = 2.0 / (1.0 / a + 1.0 / b);
  const double s1 = ah / a - 1, s2 = ah / b - 1;
  const double prim = x < 0.5 ? s1 * x : s1 * 0.5 + s2 * (x - 0.5);
  const double mean = s1 * 0.125 + s1 * 0.25 + s2 * 0.125;
  return prim - mean;
}

// sharp constant C_m with ||grad p||_{B_1} <= C_m ||p||_{B_1} on P_m (generalized eigenproblem)
double sharp_markov(std::size_t d, int m) {
  const auto mons = multi_indices_up_to(d, m);
  const auto n = static_cast<Eigen::Index>(mons.size());
  Eigen::MatrixXd A(n, n), B(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto p = RealPolynomial::monomial(mons[i], 1.0), q = RealPolynomial::monomial(mons[j], 1.0);
      B(i, j) = l2_sq_inner_ball(p, q, 1.0);
      const auto gp = poly_gradient(p), gq = poly_gradient(q);
      double s = 0;
      for (std::size_t k = 0; k < d; ++k) s += l2_sq_inner_ball(gp[k], gq[k], 1.0);
      A(i, j) = s;
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

bool refines(double coarse, double fine, double tol) {
  return coarse < tol && (fine < coarse || (coarse <= kRefinementFloor && fine <= kRefinementFloor));
}

void criterion1() {
  Timer t;
  std::mt19937_64 rng(101);
  long bad_inverse = 0, bad_orth = 0, bad_adjoint = 0, bad_decomp = 0, cases = 0;
  for (std::size_t d : {2u, 3u})
    for (int m = 0; m <= kExactMaxDegree; ++m) {
      ++cases;
      const auto p = random_rational(d, m, true, rng);
      const auto s = apply_S(p);
      if (!(laplacian(s) == p)) ++bad_inverse;
      for (const auto& h : harmonic_basis(d, m + 2))
        if (sgn(poly_inner(s, h)) != 0) ++bad_orth;
      const auto q = random_rational(d, m + 2, false, rng);
      if (poly_inner(mult_r2(p), q) != poly_inner(p, laplacian(q))) ++bad_adjoint;
      const auto parts = harmonic_decompose(p, m);
      RationalPolynomial sum(d);
      std::vector<RationalPolynomial> pieces;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (!laplacian(parts[k]).is_zero()) ++bad_decomp;
        pieces.push_back(mult_r2k(parts[k], static_cast<int>(k)));
        sum += pieces.back();
      }
      if (!(sum == p)) ++bad_decomp;
      for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
          if (sgn(poly_inner(pieces[i], pieces[j])) != 0) ++bad_decomp;
    }
  const double sec = t.seconds();
  const bool pass = bad_inverse + bad_orth + bad_adjoint + bad_decomp == 0 && sec < 10;
  report(1, pass,
         "exact algebra, d in {2,3}, m <= 12 (" + std::to_string(cases) + " cases): failures DeltaS=" +
             std::to_string(bad_inverse) + " orth=" + std::to_string(bad_orth) + " adjoint=" +
             std::to_string(bad_adjoint) + " decomposition=" + std::to_string(bad_decomp) + "; runtime < 10 s",
         sec);
}

void criterion2() {
  Timer t;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> dd(2, 3), mm(1, 8), mm0(0, 8);
  std::uniform_real_distribution<double> rr(0.5, 4.0);
  int bad_inv = 0, bad_lemma = 0, bad_markov = 0;
  std::map<int, int> markov_by_m;
  for (int i = 0; i < kBoundSamples; ++i) {
    const std::size_t d = dd(rng);
    const int m = mm0(rng);
    const auto p = random_real(d, m, true, rng);
    const auto s = apply_S(p);
    if (poly_norm(s) > (1 + kBoundRelTol) * poly_norm(p) / std::sqrt(4.0 * m + 2.0 * d)) ++bad_inv;
  }
  for (int i = 0; i < kBoundSamples; ++i) {
    const std::size_t d = dd(rng);
    const int m = mm0(rng);
    const double r = rr(rng);
    const auto p = random_real(d, m, true, rng);
    if (l2_norm_ball(apply_S(p), r) > (1 + kBoundRelTol) * r * r / (m + 1.0) * l2_norm_ball(p, r)) ++bad_lemma;
  }
  for (int i = 0; i < kBoundSamples; ++i) {
    const std::size_t d = dd(rng);
    const int m = mm(rng);
    const double r = rr(rng);
    const auto p = random_real(d, m, false, rng);
    if (l2_norm_gradient_ball(p, r) > (1 + kBoundRelTol) * m * m / r * l2_norm_ball(p, r)) {
      ++bad_markov;
      ++markov_by_m[m];
    }
  }
  std::string by_m;
  for (const auto& [m, c] : markov_by_m) by_m += " m=" + std::to_string(m) + ":" + std::to_string(c);
  const std::string sharp = " sharp Markov constants d=2: m=1 " + fmt("%.3f", sharp_markov(2, 1)) + ", m=2 " +
                            fmt("%.3f", sharp_markov(2, 2)) + ", m=3 " + fmt("%.3f", sharp_markov(2, 3));
  const double sec = t.seconds();
  report(2, bad_inv + bad_lemma + bad_markov == 0 && sec < 30,
         "stated bounds on 200 random polynomials each: violations inversion=" + std::to_string(bad_inv) +
             " lemma=" + std::to_string(bad_lemma) + " markov=" + std::to_string(bad_markov) +
             (by_m.empty() ? "" : " (" + by_m.substr(1) + ")") + ";" + sharp,
         sec);
}

void criterion3() {
  Timer t;
  const double a = 1, b = 2;
  auto field = std::make_shared<const CoefficientField>(CoefficientField::laminate(2, kLaminateN, a, b));
  const auto table = compute_correctors(field, 2);
  const auto ab = homogenized_matrix(table);
  const double e11 = std::fabs(ab(0, 0) - 4.0 / 3.0) / (4.0 / 3.0), e22 = std::fabs(ab(1, 1) - 1.5) / 1.5;
  const double off = std::fabs(ab(0, 1)) / 1.5;
  const auto& phi = *table.component(1, MultiIndex::unit(2, 0));
  double num = 0, den = 0;
  for (std::size_t i = 0; i < kLaminateN; ++i)
    for (std::size_t j = 0; j < kLaminateN; ++j) {
      const double ex = laminate_phi1(static_cast<double>(i) / kLaminateN, a, b);
      const double v = phi[i * kLaminateN + j];
      num += (v - ex) * (v - ex);
      den += ex * ex;
    }
  const double rel = std::sqrt(num / den);
  const double err = std::max({e11, e22, off});
  const double sec = t.seconds();
  report(3, err <= kAbarTol && rel <= kPhi1Tol && sec < 60,
         "laminate(1,2) N=512: abar_2 rel err " + fmt("%.2e", err) + " (tol 2e-3), phi_1 rel L2 err " +
             fmt("%.2e", rel) + " (tol 5e-3)",
         sec);
}

void criteria4and5() {
  Timer t;
  auto f128 = std::make_shared<const CoefficientField>(CoefficientField::checkerboard(2, 128, 1, 4));
  auto f256 = std::make_shared<const CoefficientField>(CoefficientField::checkerboard(2, 256, 1, 4));
  const auto r128 = check_identities(compute_correctors(f128, 5));
  const auto r256 = check_identities(compute_correctors(f256, 5));
  const double sec = t.seconds();
  bool pass4 = true;
  std::string msg4 = "checkerboard(1,4):";
  for (int m : {3, 5}) {
    const double c = r128.odd_ratio.at(m), f = r256.odd_ratio.at(m);
    pass4 = pass4 && refines(c, f, kOddTol);
    msg4 += " |abar_" + std::to_string(m) + "|/|abar_2| N=128 " + fmt("%.2e", c) + ", N=256 " + fmt("%.2e", f) + ";";
  }
  report(4, pass4 && sec < 300, msg4 + " tol 5e-2, strictly smaller at 2N unless both <= 1e-6", sec);

  double w128 = 0, w256 = 0;
  std::string worst;
  for (const auto& c : r128.checks)
    if (c.discrepancy >= w128) {
      w128 = c.discrepancy;
      worst = c.name;
    }
  for (const auto& c : r256.checks) w256 = std::max(w256, c.discrepancy);
  report(5, refines(w128, w256, kIdentityTol),
         "identity and even-order formula (" + std::to_string(r128.checks.size()) + " checks): worst discrepancy N=128 " +
             fmt("%.2e", w128) + " (" + worst + "), N=256 " + fmt("%.2e", w256) +
             "; tol 5e-2, decreasing unless both <= 1e-6",
         0.0);
}

void criterion6() {
  Timer t;
  std::mt19937_64 rng(606);
  // entries k/100 with |k| <= 10
  std::uniform_int_distribution<int> u(-static_cast<int>(kSyntheticMagnitude * 100), static_cast<int>(kSyntheticMagnitude * 100));
  long seeds = 0, bad = 0;
  for (int i = 0; i < kContractOperators; ++i) {
    const std::size_t d = i % 2 == 0 ? 2 : 3;
    std::map<int, SymTensor<Rational>> ts{{2, SymTensor<Rational>::from_avatar(RationalPolynomial::radius_squared(d), 2)}};
    for (int o : {4, 6}) {
      SymTensor<Rational> tt(d, o);
      for (const auto& a : multi_indices_of_order(d, o)) tt.set(a, Rational(u(rng), 100));
      ts[o] = tt;
    }
    auto op = std::make_shared<const HomogenizedOperator>(HomogenizedOperator::synthetic(ts));
    for (int m = 0; m <= kContractMaxDegree; ++m)
      for (const auto& h : harmonic_basis(d, m)) {
        ++seeds;
        if (!apply_A(*op, *build_A_harmonic(op, h).q_exact).is_zero()) ++bad;
      }
  }
  const double sec = t.seconds();
  report(6, bad == 0 && sec < 60,
         "apply_A(op, q) == 0 exactly: " + std::to_string(seeds) + " basis seeds of degree <= 8 over 20 operators (d=2,3), " +
             std::to_string(bad) + " nonzero",
         sec);
}

double laminate_residual(std::size_t n, int deg, int table_order, bool truncated) {
  auto field = std::make_shared<const CoefficientField>(CoefficientField::laminate(2, n, 1, 2));
  auto table = std::make_shared<const CorrectorTable>(compute_correctors(field, table_order));
  auto op = std::make_shared<const HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  const auto q = build_A_harmonic(op, abar_harmonic_from(*op, random_harmonic_seed(2, deg, 7)));
  return residual_psi(build_heterogeneous(q, table, truncated));
}

void criterion7() {
  Timer t;
  bool pass = true;
  std::string msg = "laminate(1,2) psi residual N=64 -> 128:";
  for (int deg = 1; deg <= 4; ++deg) {
    const double c = laminate_residual(64, deg, 4, false), f = laminate_residual(128, deg, 4, false);
    const bool floor = c <= kResidualFloor && f <= kResidualFloor;
    const bool ok = floor || c / f >= kResidualRatio;
    pass = pass && ok;
    msg += " deg " + std::to_string(deg) + ": " + fmt("%.2e", c) + "/" + fmt("%.2e", f) +
           (floor ? " (roundoff)" : " ratio " + fmt("%.2f", c / f)) + ";";
  }
  report(7, pass, msg + " ratio >= 1.7 unless both <= 1e-10", t.seconds());
}

std::shared_ptr<const CorrectorTable> laminate_table64() {
  static auto table = [] {
    auto field = std::make_shared<const CoefficientField>(CoefficientField::laminate(2, 64, 1, 2));
    return std::make_shared<const CorrectorTable>(compute_correctors(field, 6));
  }();
  return table;
}

ScalingConfig study_config() {
  ScalingConfig cfg;
  cfg.theta = 0.5;
  cfg.m_list = {2, 4, 6};
  cfg.r_list = {64, 128, 256, 512, 1024};
  cfg.slope_r_lo = kSlopeLo;
  cfg.slope_r_hi = kSlopeHi;
  cfg.doubling_variation_max = kDoublingVariation;
  return cfg;
}

void criteria8and9() {
  Timer t;
  const auto rep = run_scaling_study(study_config(), laminate_table64());
  auto cfield = std::make_shared<const CoefficientField>(
      CoefficientField::constant(2, 8, SquareMatrix<double>::diagonal({4.0 / 3.0, 1.5})));
  const auto crep = run_scaling_study(study_config(), std::make_shared<const CorrectorTable>(compute_correctors(cfield, 6)));
  double control = 0;
  for (const auto& row : crep.rows) control = std::max(control, std::fabs(row.three_ratio - 1));
  const double sec = t.seconds();

  bool pass8 = rep.errors.empty() && crep.errors.empty() && control <= kControlTol;
  std::string msg8 = "laminate N=64, theta=1/2, r=64..1024: slope of log|ratio-1| vs log r:";
  for (const auto& d : rep.degrees) {
    pass8 = pass8 && d.r_fit.points >= 2 && d.r_fit.slope >= kSlopeLo && d.r_fit.slope <= kSlopeHi;
    msg8 += " m=" + std::to_string(d.m) + " " + fmt("%.3f", d.r_fit.slope) + " (min ratio-1 " +
            fmt("%.1e", d.min_ratio_minus_one) + ");";
  }
  report(8, pass8 && sec < 600,
         msg8 + " band [-1.3,-0.7]; constant control max|ratio-1| " + fmt("%.1e", control) + " (tol 1e-3)", sec);

  bool pass9 = rep.errors.empty();
  std::string msg9 = "doubling profile over r in [m^4, 1024]:";
  int evaluated = 0;
  for (const auto& d : rep.degrees) {
    if (d.doubling_window.empty()) {
      msg9 += " m=" + std::to_string(d.m) + " empty range (m^4 > 1024);";
      continue;
    }
    ++evaluated;
    pass9 = pass9 && d.doubling_variation <= kDoublingVariation;
    msg9 += " m=" + std::to_string(d.m) + " variation " + fmt("%.1e", d.doubling_variation) + " over " +
            std::to_string(d.doubling_window.size()) + " radii;";
  }
  report(9, pass9 && evaluated > 0, msg9 + " tol 10%", 0.0);
}

void criterion10() {
  Timer t;
  auto cfg = study_config();
  cfg.negative_control = true;
  const auto rep = run_scaling_study(cfg, laminate_table64());
  bool detected_a = !rep.errors.empty();
  std::string slopes;
  for (const auto& d : rep.degrees) {
    const bool no_decay = !(d.r_fit.points >= 2 && d.r_fit.slope <= kSlopeHi) || !d.eventually_decreasing;
    detected_a = detected_a || no_decay;
    slopes += " m=" + std::to_string(d.m) + " " + fmt("%.3f", d.r_fit.slope);
  }
  const double c = laminate_residual(64, 4, 3, true), f = laminate_residual(128, 4, 3, true);
  const bool detected_b = c / f < kResidualRatio && c > kResidualFloor;
  report(10, detected_a && detected_b,
         std::string("negative controls: uncorrected q ") + (detected_a ? "detected" : "NOT detected") +
             " (ratio-1 still decays, slopes" + slopes + "); truncated table " +
             (detected_b ? "detected" : "NOT detected") + " (residual " + fmt("%.2e", c) + " -> " + fmt("%.2e", f) +
             ", ratio " + fmt("%.2f", c / f) + " < 1.7)",
         t.seconds());
}

void guarded(const char* name, void (*fn)()) {
  try {
    fn();
  } catch (const std::exception& e) {
    std::printf("%s: FAIL  exception: %s\n", name, e.what());
    ++failures;
  }
}

}  // namespace

int main() {
  guarded("criterion  1", criterion1);
  guarded("criterion  2", criterion2);
  guarded("criterion  3", criterion3);
  guarded("criteria 4/5", criteria4and5);
  guarded("criterion  6", criterion6);
  guarded("criterion  7", criterion7);
  guarded("criteria 8/9", criteria8and9);
  guarded("criterion 10", criterion10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
