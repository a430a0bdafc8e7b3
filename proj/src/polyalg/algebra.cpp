#include "homog/algebra.hpp"

#include <cmath>

namespace homog {

template <Scalar T>
T poly_inner(const Polynomial<T>& p, const Polynomial<T>& q) {
  if (p.dim() != q.dim()) throw ContractViolation("poly_inner: dimension mismatch");
  T sum(0);
  const auto& small = p.size() <= q.size() ? p : q;
  const auto& large = p.size() <= q.size() ? q : p;
  for (const auto& [a, c] : small.terms()) {
    auto it = large.terms().find(a);
    if (it != large.terms().end()) sum += c * it->second * scalar_from<T>(factorial(a));
  }
  return sum;
}

template <Scalar T>
double poly_norm(const Polynomial<T>& p) {
  return std::sqrt(to_double(poly_inner(p, p)));
}

template <Scalar T>
Polynomial<T> laplacian(const Polynomial<T>& p) {
  Polynomial<T> r(p.dim());
  for (const auto& [a, c] : p.terms()) {
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (a[i] < 2) continue;
      MultiIndex b = a;
      b.increment(i, -2);
      r.add_term(b, T(c * scalar_from<T>(static_cast<long long>(a[i]) * (a[i] - 1))));
    }
  }
  return r;
}

template <Scalar T>
Polynomial<T> mult_r2(const Polynomial<T>& p) {
  Polynomial<T> r(p.dim());
  for (const auto& [a, c] : p.terms()) {
    for (std::size_t i = 0; i < p.dim(); ++i) {
      MultiIndex b = a;
      b.increment(i, 2);
      r.add_term(b, c);
    }
  }
  return r;
}

template <Scalar T>
Polynomial<T> mult_r2k(const Polynomial<T>& p, int k) {
  Polynomial<T> r = p;
  for (int i = 0; i < k; ++i) r = mult_r2(r);
  return r;
}

template <Scalar T>
std::vector<Polynomial<T>> poly_gradient(const Polynomial<T>& p) {
  std::vector<Polynomial<T>> g;
  g.reserve(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) g.push_back(p.derivative(i));
  return g;
}

template <Scalar T>
bool GradientTensor<T>::is_zero() const {
  for (const auto& [a, c] : components)
    if (!c.is_zero()) return false;
  return true;
}

template <Scalar T>
SymTensor<T> GradientTensor<T>::at(std::span<const T> x) const {
  SymTensor<T> t(dim, order);
  for (const auto& [a, c] : components) t.set(a, c.template evaluate<T>(x));
  return t;
}

template <Scalar T>
GradientTensor<T> grad_tensor(const Polynomial<T>& p, int n) {
  if (n < 0) throw ContractViolation("grad_tensor: order must be >= 0");
  GradientTensor<T> g;
  g.dim = p.dim();
  g.order = n;
  for (const auto& a : multi_indices_of_order(p.dim(), n)) {
    auto d = p.derivative(a);
    if (!d.is_zero()) g.components.emplace(a, std::move(d));
  }
  return g;
}

template <Scalar T>
Polynomial<T> contract_gradient(const SymTensor<T>& t, const Polynomial<T>& p) {
  if (t.dim() != p.dim()) throw ContractViolation("contract_gradient: dimension mismatch");
  Polynomial<T> r(p.dim());
  if (p.degree() < t.order()) return r;
  for (const auto& [a, v] : t.entries()) {
    auto d = p.derivative(a);
    d *= T(v * scalar_from<T>(multinomial(a)));
    r += d;
  }
  return r;
}

template <Scalar T>
std::vector<Polynomial<T>> harmonic_decompose(const Polynomial<T>& p, std::optional<int> degree) {
  const std::size_t d = p.dim();
  if (!p.is_homogeneous()) throw ContractViolation("harmonic_decompose: polynomial is not homogeneous");
  int m = 0;
  if (p.is_zero()) {
    m = degree.value_or(0);
  } else {
    m = p.degree();
    if (degree && *degree != m) throw ContractViolation("harmonic_decompose: degree does not match polynomial");
  }
  const int top = m / 2;
  std::vector<Polynomial<T>> parts(top + 1, Polynomial<T>(d));
  if (p.is_zero()) return parts;

  // Delta^k kills |x|^{2j} p_j for j < k and maps |x|^{2k} p_k to c_k p_k,
  // so peel the components off from the top.
  Polynomial<T> rem = p;
  for (int k = top; k >= 0; --k) {
    const long long n = m - 2 * k;
    T c(1);
    for (long long l = 1; l <= k; ++l)
      c *= scalar_from<T>(2 * l * (static_cast<long long>(d) + 2 * n + 2 * l - 2));
    Polynomial<T> lap = rem;
    for (int j = 0; j < k; ++j) lap = laplacian(lap);
    lap *= T(T(1) / c);
    rem -= mult_r2k(lap, k);
    parts[k] = std::move(lap);
  }
  return parts;
}

template <Scalar T>
Polynomial<T> apply_S(const Polynomial<T>& p) {
  const long long d = static_cast<long long>(p.dim());
  Polynomial<T> out(p.dim());
  if (p.is_zero()) return out;
  for (int m = 0; m <= p.degree(); ++m) {
    auto part = p.homogeneous_part(m);
    if (part.is_zero()) continue;
    auto comps = harmonic_decompose(part, m);
    for (std::size_t k = 0; k < comps.size(); ++k) {
      if (comps[k].is_zero()) continue;
      const long long kk = static_cast<long long>(k);
      const long long b = (2 * kk + 2) * (d + 2 * m - 2 * kk);
      auto term = mult_r2k(comps[k], static_cast<int>(k) + 1);
      term *= T(T(1) / scalar_from<T>(b));
      out += term;
    }
  }
  return out;
}

template <Scalar T>
Polynomial<T> change_of_variables(const Polynomial<T>& p, const SquareMatrix<T>& L) {
  const std::size_t d = p.dim();
  if (L.size() != d) throw ContractViolation("change_of_variables: matrix size does not match dimension");
  const T det = L.determinant();
  if constexpr (std::is_same_v<T, double>) {
    double scale = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < d; ++j) row += L(i, j) * L(i, j);
      scale *= std::sqrt(row);
    }
    if (!(std::fabs(det) > 1e-14 * scale)) throw ContractViolation("change_of_variables: singular matrix");
  } else {
    if (is_zero(det)) throw ContractViolation("change_of_variables: singular matrix");
  }

  const int deg = p.is_zero() ? 0 : p.degree();
  // powers[i][k] = (L x)_i^k
  std::vector<std::vector<Polynomial<T>>> powers(d);
  for (std::size_t i = 0; i < d; ++i) {
    Polynomial<T> form(d);
    for (std::size_t j = 0; j < d; ++j) form.add_term(MultiIndex::unit(d, j), L(i, j));
    powers[i].push_back(Polynomial<T>::constant(d, T(1)));
    for (int k = 1; k <= deg; ++k) powers[i].push_back(powers[i].back() * form);
  }
  Polynomial<T> out(d);
  for (const auto& [a, c] : p.terms()) {
    Polynomial<T> term = Polynomial<T>::constant(d, c);
    for (std::size_t i = 0; i < d; ++i)
      if (a[i] > 0) term = term * powers[i][a[i]];
    out += term;
  }
  return out;
}

template <Scalar T>
Polynomial<T> translate(const Polynomial<T>& p, std::span<const T> shift) {
  const std::size_t d = p.dim();
  if (shift.size() != d) throw ContractViolation("translate: shift dimension mismatch");
  Polynomial<T> out(d);
  for (const auto& [a, c] : p.terms()) {
    // prod_i (x_i + s_i)^{a_i} = sum_{g <= a} binom(a, g) s^{a-g} x^g
    MultiIndex g(d);
    while (true) {
      T v = c * scalar_from<T>(binomial(a, g));
      for (std::size_t i = 0; i < d; ++i)
        for (int k = 0; k < a[i] - g[i]; ++k) v *= shift[i];
      out.add_term(g, v);
      std::size_t i = 0;
      while (i < d && g[i] == a[i]) {
        g.set(i, 0);
        ++i;
      }
      if (i == d) break;
      g.increment(i);
    }
  }
  return out;
}

RationalPolynomial to_rational(const RealPolynomial& p) {
  RationalPolynomial r(p.dim());
  for (const auto& [a, c] : p.terms()) r.add_term(a, Rational(c));
  return r;
}

#define HOMOG_INSTANTIATE(T)                                                                           \
  template T poly_inner(const Polynomial<T>&, const Polynomial<T>&);                                   \
  template double poly_norm(const Polynomial<T>&);                                                     \
  template Polynomial<T> laplacian(const Polynomial<T>&);                                              \
  template Polynomial<T> mult_r2(const Polynomial<T>&);                                                \
  template Polynomial<T> mult_r2k(const Polynomial<T>&, int);                                          \
  template std::vector<Polynomial<T>> poly_gradient(const Polynomial<T>&);                             \
  template struct GradientTensor<T>;                                                                   \
  template GradientTensor<T> grad_tensor(const Polynomial<T>&, int);                                   \
  template Polynomial<T> contract_gradient(const SymTensor<T>&, const Polynomial<T>&);                 \
  template std::vector<Polynomial<T>> harmonic_decompose(const Polynomial<T>&, std::optional<int>);    \
  template Polynomial<T> apply_S(const Polynomial<T>&);                                                \
  template Polynomial<T> change_of_variables(const Polynomial<T>&, const SquareMatrix<T>&);        \
  template Polynomial<T> translate(const Polynomial<T>&, std::span<const T>);

HOMOG_INSTANTIATE(Rational)
HOMOG_INSTANTIATE(double)

#undef HOMOG_INSTANTIATE

}  // namespace homog
