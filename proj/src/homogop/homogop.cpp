#include "homog/homogop.hpp"

#include <cmath>

#include "homog/algebra.hpp"
#include "homog/harmonic_basis.hpp"

namespace homog {

namespace {

template <Scalar T>
Polynomial<T> apply_tensors(const std::map<int, SymTensor<T>>& tensors, const Polynomial<T>& p) {
  Polynomial<T> out(p.dim());
  for (const auto& [order, t] : tensors) {
    if (t.dim() != p.dim()) throw ContractViolation("apply_A: dimension mismatch");
    out -= contract_gradient(t, p);
  }
  return out;
}

// abar~ = (L^{-1})^{(x)m} abar: avatar composed with L^{-1} (L symmetric).
SymTensor<double> push_forward(const SymTensor<double>& t, const SquareMatrix<double>& l_inv) {
  return SymTensor<double>::from_avatar(change_of_variables(t.avatar(), l_inv), t.order());
}

template <Scalar T>
Polynomial<T> recursion(const std::map<int, SymTensor<T>>& tensors, const Polynomial<T>& q0) {
  const int m = q0.is_zero() ? 0 : q0.degree();
  std::vector<Polynomial<T>> q{q0};
  Polynomial<T> sum = q0;
  for (int k = 1; 2 * k <= m; ++k) {
    Polynomial<T> pk(q0.dim());
    for (int j = 2; j <= k + 1; ++j) {
      auto it = tensors.find(2 * j);
      if (it == tensors.end()) continue;
      pk += contract_gradient(it->second, q[k + 1 - j]);
    }
    Polynomial<T> qk = apply_S(pk);
    qk *= T(-1);
    sum += qk;
    q.push_back(std::move(qk));
  }
  return sum;
}

}  // namespace

HomogenizedOperator HomogenizedOperator::from_table(const CorrectorTable& t, int max_order) {
  if (t.m_max < 2) throw ContractViolation("operator needs abar_2 (m_max >= 2)");
  const int top = max_order < 0 ? t.m_max : std::min(max_order, t.m_max);
  std::map<int, SymTensor<double>> ts;
  for (int k = 2; k <= top; k += 2) ts.emplace(k, t.abar[k]);
  // make abar_2 exactly symmetric-consistent (it is stored by multi-index already)
  return real(std::move(ts), "corrector table: " + t.field->description() + ", N=" + std::to_string(t.shape().n));
}

HomogenizedOperator HomogenizedOperator::synthetic(std::map<int, SymTensor<Rational>> tensors) {
  HomogenizedOperator op;
  std::map<int, SymTensor<double>> real_t;
  for (const auto& [k, t] : tensors) real_t.emplace(k, t.to_double());
  op.tensors_ = std::move(real_t);
  op.exact_ = std::move(tensors);
  op.provenance_ = "synthetic";
  op.validate();
  return op;
}

HomogenizedOperator HomogenizedOperator::real(std::map<int, SymTensor<double>> tensors, std::string provenance) {
  HomogenizedOperator op;
  op.tensors_ = std::move(tensors);
  op.provenance_ = std::move(provenance);
  op.validate();
  return op;
}

void HomogenizedOperator::validate() {
  auto it = tensors_.find(2);
  if (it == tensors_.end()) throw ContractViolation("homogenized operator needs abar_2");
  dim_ = it->second.dim();
  for (const auto& [k, t] : tensors_) {
    if (k < 2 || k % 2) throw ContractViolation("homogenized operator tensors must have even order >= 2");
    if (t.order() != k || t.dim() != dim_) throw ContractViolation("tensor order or dimension inconsistent");
  }
  auto ev = symmetric_eigenvalues(abar());
  if (!(ev.front() > 0)) throw ContractViolation("abar_2 is not positive definite");
}

SquareMatrix<double> HomogenizedOperator::abar() const {
  return SquareMatrix<double>(dim_, tensors_.at(2).to_matrix());
}

HomogenizedOperator HomogenizedOperator::leading_part() const {
  HomogenizedOperator op = *this;
  op.tensors_ = {{2, tensors_.at(2)}};
  if (exact_) op.exact_ = std::map<int, SymTensor<Rational>>{{2, exact_->at(2)}};
  op.provenance_ = provenance_ + " (abar_2 only)";
  return op;
}

RealPolynomial apply_A(const HomogenizedOperator& op, const RealPolynomial& p) {
  if (p.dim() != op.dim()) throw ContractViolation("apply_A: dimension mismatch");
  return apply_tensors(op.tensors(), p);
}

RationalPolynomial apply_A(const HomogenizedOperator& op, const RationalPolynomial& p) {
  if (!op.exact()) throw ContractViolation("apply_A: operator has no exact tensors");
  if (p.dim() != op.dim()) throw ContractViolation("apply_A: dimension mismatch");
  return apply_tensors(*op.exact(), p);
}

RealPolynomial abar_harmonic_from(const HomogenizedOperator& op, const RationalPolynomial& h) {
  return change_of_variables(h.to_double(), spd_inverse_sqrt(op.abar()));
}

AHarmonicPolynomial build_A_harmonic(std::shared_ptr<const HomogenizedOperator> op, const RationalPolynomial& p) {
  if (p.dim() != op->dim()) throw ContractViolation("build_A_harmonic: dimension mismatch");
  AHarmonicPolynomial out;
  out.op = op;
  out.seed = p.to_double();

  bool identity = false;
  if (op->exact()) identity = op->exact()->at(2) == SymTensor<Rational>::from_avatar(
                                                         RationalPolynomial::radius_squared(op->dim()), 2);
  if (identity) {
    if (!laplacian(p).is_zero()) throw ContractViolation("build_A_harmonic: seed is not harmonic");
    auto q = recursion(*op->exact(), p);
    out.q = q.to_double();
    out.q_exact = std::move(q);
    return out;
  }

  const SquareMatrix<double> l = spd_sqrt(op->abar());
  const SquareMatrix<double> l_inv = spd_inverse_sqrt(op->abar());
  const RealPolynomial pt = change_of_variables(out.seed, l);
  // seed must be abar-harmonic: Delta of the transformed seed vanishes
  const double lap = poly_norm(laplacian(pt));
  if (lap > 1e-9 * std::max(1.0, poly_norm(pt)))
    throw ContractViolation("build_A_harmonic: seed is not abar-harmonic (|Delta p~| = " + std::to_string(lap) + ")");
  std::map<int, SymTensor<double>> tt;
  for (const auto& [k, t] : op->tensors())
    if (k >= 4) tt.emplace(k, push_forward(t, l_inv));
  out.q = change_of_variables(recursion(tt, pt), l_inv);
  return out;
}

AHarmonicPolynomial build_A_harmonic(const HomogenizedOperator& op, const RationalPolynomial& p) {
  return build_A_harmonic(std::make_shared<const HomogenizedOperator>(op), p);
}

AHarmonicPolynomial build_A_harmonic(std::shared_ptr<const HomogenizedOperator> op, const RealPolynomial& p) {
  return build_A_harmonic(std::move(op), to_rational(p));
}

HarmonicApproximation harmonic_approximation(const AHarmonicPolynomial& q, double r) {
  if (!(r > 0)) throw ContractViolation("radius must be positive");
  Ellipsoid e(q.op->abar(), r);
  HarmonicApproximation h;
  h.p = q.seed;
  const double den = l2_norm_ellipsoid(q.q, e);
  h.rel_error = den > 0 ? l2_norm_ellipsoid(q.q - q.seed, e) / den : 0.0;
  return h;
}

long long a_harmonic_dim(std::size_t dim, int m) {
  if (dim < 2 || m < 0) throw ContractViolation("a_harmonic_dim needs d >= 2 and m >= 0");
  long long s = 0;
  for (int n = 0; n <= m; ++n) s += harmonic_dim(dim, n);
  return s;
}

}  // namespace homog
