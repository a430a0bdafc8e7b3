#include "homog/harmonic_basis.hpp"

#include <cmath>
#include <random>

#include "homog/algebra.hpp"
#include "homog/norms.hpp"

namespace homog {

long long harmonic_dim(std::size_t dim, int n) {
  if (n < 0) return 0;
  if (n < 2) return homogeneous_dim(dim, n);
  return homogeneous_dim(dim, n) - homogeneous_dim(dim, n - 2);
}

namespace {

// Gaussian elimination on coefficient rows; true if v is independent of rows.
bool reduce_against(std::vector<std::pair<MultiIndex, std::map<MultiIndex, Rational>>>& echelon,
                    const RationalPolynomial& p) {
  std::map<MultiIndex, Rational> v(p.terms().begin(), p.terms().end());
  for (const auto& [pivot, row] : echelon) {
    auto it = v.find(pivot);
    if (it == v.end()) continue;
    const Rational f = it->second / row.at(pivot);
    for (const auto& [a, c] : row) {
      Rational& t = v[a];
      t -= f * c;
      if (sgn(t) == 0) v.erase(a);
    }
  }
  if (v.empty()) return false;
  const MultiIndex pivot = v.begin()->first;
  echelon.emplace_back(pivot, std::move(v));
  return true;
}

}  // namespace

std::vector<RationalPolynomial> harmonic_basis(std::size_t dim, int m) {
  if (dim == 0 || m < 0) throw ContractViolation("harmonic_basis: need d >= 1 and m >= 0");
  const long long want = harmonic_dim(dim, m);
  std::vector<RationalPolynomial> raw;
  std::vector<std::pair<MultiIndex, std::map<MultiIndex, Rational>>> echelon;
  for (const auto& a : multi_indices_of_order(dim, m)) {
    auto h = harmonic_decompose(RationalPolynomial::monomial(a, Rational(1)), m)[0];
    if (h.is_zero()) continue;
    if (reduce_against(echelon, h)) raw.push_back(std::move(h));
    if (static_cast<long long>(raw.size()) == want) break;
  }
  if (static_cast<long long>(raw.size()) != want) throw std::logic_error("harmonic_basis: rank deficit");

  // exact Gram-Schmidt in the B_1 mean inner product
  std::vector<RationalPolynomial> basis;
  std::vector<Rational> sq;
  for (auto& p : raw) {
    RationalPolynomial v = p;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Rational c = ball_mean_inner(p, basis[j]) / sq[j];
      v -= basis[j] * c;
    }
    sq.push_back(ball_mean_inner(v, v));
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<RealPolynomial> orthonormal_harmonic_basis(std::size_t dim, int m) {
  std::vector<RealPolynomial> out;
  for (const auto& b : harmonic_basis(dim, m)) {
    const double n = std::sqrt(ball_mean_inner(b, b).get_d());
    out.push_back(b.to_double() * (1.0 / n));
  }
  return out;
}

RationalPolynomial random_harmonic_seed(std::size_t dim, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  RationalPolynomial out(dim);
  for (const auto& b : harmonic_basis(dim, m)) {
    const double n = std::sqrt(ball_mean_inner(b, b).get_d());
    const double c = uni(rng) / n;
    // dyadic rounding keeps the seed an exact rational combination of harmonics
    const double q = std::ldexp(std::nearbyint(std::ldexp(c, 20)), -20);
    out += b * Rational(q);
  }
  return out;
}

}  // namespace homog
