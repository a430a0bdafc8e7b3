#include "homog/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "homog/errors.hpp"
#include "homog/norms.hpp"
#include "homog/parallel.hpp"

namespace homog {

GridShape::GridShape(std::size_t d, std::size_t n_per_axis) : dim(d), n(n_per_axis) {
  if (d < 1 || d > 3) throw ContractViolation("grid dimension must be 1, 2 or 3");
  if (n_per_axis < 2) throw ContractViolation("grid needs at least 2 points per axis");
}

std::size_t GridShape::size() const {
  std::size_t s = 1;
  for (std::size_t k = 0; k < dim; ++k) s *= n;
  return s;
}

std::size_t GridShape::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t k = axis + 1; k < dim; ++k) s *= n;
  return s;
}

std::array<std::size_t, 3> GridShape::unflatten(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t k = dim; k-- > 0;) {
    idx[k] = flat % n;
    flat /= n;
  }
  return idx;
}

std::size_t GridShape::flatten(std::span<const std::size_t> idx) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < dim; ++k) f = f * n + idx[k] % n;
  return f;
}

void GridShape::corner_nodes(std::size_t e, std::span<std::size_t> out) const {
  auto idx = unflatten(e);
  for (std::size_t c = 0; c < corners(); ++c) {
    std::size_t f = 0;
    for (std::size_t k = 0; k < dim; ++k) f = f * n + (idx[k] + ((c >> k) & 1u)) % n;
    out[c] = f;
  }
}

GridFunction::GridFunction(GridShape s, std::vector<double> values) : shape_(s), v_(std::move(values)) {
  if (v_.size() != s.size()) throw ContractViolation("grid function size does not match shape");
}

double GridFunction::mean() const { return pairwise_sum(v_) / static_cast<double>(v_.size()); }

double GridFunction::max_abs() const {
  double m = 0;
  for (double x : v_) m = std::max(m, std::fabs(x));
  return m;
}

double GridFunction::l2_norm() const {
  // int (Q1 f)^2 = sum_e f_e^T M_e f_e; assembled via corner tensor products
  const auto& s = shape_;
  const std::size_t nc = s.corners();
  std::vector<double> local(s.size());
  std::vector<std::size_t> nodes(nc);
  for (std::size_t e = 0; e < s.size(); ++e) {
    s.corner_nodes(e, nodes);
    double acc = 0;
    for (std::size_t b = 0; b < nc; ++b)
      for (std::size_t c = 0; c < nc; ++c) {
        double w = 1;
        for (std::size_t k = 0; k < s.dim; ++k) w *= (((b ^ c) >> k) & 1u) ? 1.0 / 6.0 : 1.0 / 3.0;
        acc += w * v_[nodes[b]] * v_[nodes[c]];
      }
    local[e] = acc;
  }
  return std::sqrt(std::max(0.0, pairwise_sum(local) / static_cast<double>(s.size())));
}

double GridFunction::interpolate(std::span<const double> x) const {
  const auto& s = shape_;
  std::array<std::size_t, 3> base{};
  std::array<double, 3> t{};
  const double nd = static_cast<double>(s.n);
  for (std::size_t k = 0; k < s.dim; ++k) {
    const double u = x[k] * nd;
    const double f = std::floor(u);
    t[k] = u - f;
    const long long i = static_cast<long long>(f) % static_cast<long long>(s.n);
    base[k] = static_cast<std::size_t>(i < 0 ? i + static_cast<long long>(s.n) : i);
  }
  double out = 0;
  for (std::size_t c = 0; c < s.corners(); ++c) {
    double w = 1;
    std::size_t f = 0;
    for (std::size_t k = 0; k < s.dim; ++k) {
      const bool up = (c >> k) & 1u;
      w *= up ? t[k] : 1.0 - t[k];
      f = f * s.n + (base[k] + (up ? 1 : 0)) % s.n;
    }
    if (w != 0.0) out += w * v_[f];
  }
  return out;
}

double ElementField::integral() const {
  const std::size_t nc = shape_.corners();
  std::vector<double> per(shape_.size());
  for (std::size_t e = 0; e < shape_.size(); ++e) {
    double s = 0;
    for (std::size_t c = 0; c < nc; ++c) s += v_[e * nc + c];
    per[e] = s / static_cast<double>(nc);
  }
  return pairwise_sum(per) / static_cast<double>(shape_.size());
}

double ElementField::mean_abs() const {
  double s = 0;
  for (double x : v_) s += std::fabs(x);
  return v_.empty() ? 0.0 : s / static_cast<double>(v_.size());
}

ElementField ElementField::from_nodal(const GridFunction& f) {
  ElementField out(f.shape());
  const std::size_t nc = f.shape().corners();
  std::vector<std::size_t> nodes(nc);
  for (std::size_t e = 0; e < f.shape().size(); ++e) {
    f.shape().corner_nodes(e, nodes);
    for (std::size_t c = 0; c < nc; ++c) out.v_[e * nc + c] = f[nodes[c]];
  }
  return out;
}

CoefficientField::CoefficientField(GridShape s, std::vector<double> values, double lambda, std::string description)
    : shape_(s), v_(std::move(values)), lambda_(lambda), description_(std::move(description)) {
  const std::size_t dd = s.dim * s.dim;
  if (v_.size() != s.size() * dd) throw ContractViolation("coefficient array size does not match grid");
  isotropic_ = true;
  for (std::size_t e = 0; e < s.size() && isotropic_; ++e) {
    const double* a = at(e);
    for (std::size_t i = 0; i < s.dim; ++i)
      for (std::size_t j = 0; j < s.dim; ++j)
        if ((i == j && a[i * s.dim + j] != a[0]) || (i != j && a[i * s.dim + j] != 0.0)) isotropic_ = false;
  }
  if (!(lambda_ > 0)) {
    double mx = 0;
    for (std::size_t e = 0; e < s.size(); ++e) {
      SquareMatrix<double> m(s.dim, std::vector<double>(at(e), at(e) + dd));
      mx = std::max(mx, symmetric_eigenvalues(m).back());
    }
    lambda_ = mx;
  }
}

namespace {

CoefficientField isotropic_field(std::size_t dim, std::size_t n, double lambda, std::string desc,
                                 const std::function<double(std::span<const double>)>& alpha) {
  GridShape s(dim, n);
  std::vector<double> v(s.size() * dim * dim, 0.0);
  std::array<double, 3> x{};
  for (std::size_t e = 0; e < s.size(); ++e) {
    auto idx = s.unflatten(e);
    for (std::size_t k = 0; k < dim; ++k) x[k] = (static_cast<double>(idx[k]) + 0.5) * s.h();
    const double a = alpha(std::span<const double>(x.data(), dim));
    for (std::size_t i = 0; i < dim; ++i) v[e * dim * dim + i * dim + i] = a;
  }
  return CoefficientField(s, std::move(v), lambda, std::move(desc));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

CoefficientField CoefficientField::constant(std::size_t dim, std::size_t n, const SquareMatrix<double>& a,
                                            double lambda) {
  if (a.size() != dim) throw ContractViolation("constant coefficient matrix has wrong size");
  GridShape s(dim, n);
  std::vector<double> v;
  v.reserve(s.size() * dim * dim);
  for (std::size_t e = 0; e < s.size(); ++e) v.insert(v.end(), a.data().begin(), a.data().end());
  return CoefficientField(s, std::move(v), lambda, "constant");
}

CoefficientField CoefficientField::laminate(std::size_t dim, std::size_t n, double a, double b) {
  return isotropic_field(dim, n, std::max(a, b), "laminate(" + fmt(a) + "," + fmt(b) + ")",
                         [a, b](std::span<const double> x) { return x[0] < 0.5 ? a : b; });
}

CoefficientField CoefficientField::checkerboard(std::size_t dim, std::size_t n, double a, double b) {
  return isotropic_field(dim, n, std::max(a, b), "checkerboard(" + fmt(a) + "," + fmt(b) + ")",
                         [a, b](std::span<const double> x) {
                           long s = 0;
                           for (double xi : x) s += static_cast<long>(std::floor(2.0 * xi));
                           return s % 2 == 0 ? a : b;
                         });
}

CoefficientField CoefficientField::smooth(std::size_t dim, std::size_t n, double c) {
  if (dim < 2) throw ContractViolation("smooth coefficient needs d >= 2");
  if (c < 2) throw ContractViolation("smooth coefficient needs c >= 2 for ellipticity");
  return isotropic_field(dim, n, c + 1.0, "smooth(" + fmt(c) + ")", [c](std::span<const double> x) {
    return c + std::sin(2 * std::numbers::pi * x[0]) * std::sin(2 * std::numbers::pi * x[1]);
  });
}

SquareMatrix<double> CoefficientField::mean() const {
  const std::size_t d = dim();
  SquareMatrix<double> m(d);
  std::vector<double> comp(shape_.size());
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t e = 0; e < shape_.size(); ++e) comp[e] = at(e)[i * d + j];
      m(i, j) = pairwise_sum(comp) / static_cast<double>(shape_.size());
    }
  return m;
}

CoefficientReport validate_coefficients(const CoefficientField& a) {
  CoefficientReport r;
  const std::size_t d = a.dim();
  const double tol = 1e-12;
  r.min_eigenvalue = INFINITY;
  r.max_eigenvalue = -INFINITY;
  for (std::size_t e = 0; e < a.shape().size(); ++e) {
    const double* m = a.at(e);
    double lo, hi;
    bool finite = true;
    for (std::size_t k = 0; k < d * d; ++k) finite = finite && std::isfinite(m[k]);
    bool sym = finite;
    for (std::size_t i = 0; i < d && sym; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::fabs(m[i * d + j] - m[j * d + i]) > tol * (std::fabs(m[i * d + j]) + 1.0)) sym = false;
    if (!sym) {
      r.ok = false;
      r.offending_cell = e;
      r.message = "coefficient at cell " + std::to_string(e) + " is not a finite symmetric matrix";
      return r;
    }
    if (a.isotropic()) {
      lo = hi = m[0];
    } else {
      auto ev = symmetric_eigenvalues(SquareMatrix<double>(d, std::vector<double>(m, m + d * d)));
      lo = ev.front();
      hi = ev.back();
    }
    r.min_eigenvalue = std::min(r.min_eigenvalue, lo);
    r.max_eigenvalue = std::max(r.max_eigenvalue, hi);
    if (lo < 1.0 - tol || hi > a.lambda() * (1.0 + tol)) {
      r.ok = false;
      r.offending_cell = e;
      std::ostringstream os;
      os << "coefficient at cell " << e << " has eigenvalues in [" << lo << ", " << hi
         << "], outside [1, " << a.lambda() << "]";
      r.message = os.str();
      return r;
    }
  }
  r.message = "ok";
  return r;
}

void require_valid(const CoefficientField& a) {
  auto r = validate_coefficients(a);
  if (!r.ok) throw ContractViolation(r.message);
}

}  // namespace homog
