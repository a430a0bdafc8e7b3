#include "homog/periodic_solver.hpp"

#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "homog/errors.hpp"
#include "homog/parallel.hpp"

namespace homog {

namespace {

constexpr double kM1[2][2] = {{1.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 3.0}};
constexpr double kS1[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
// int N_a' N_b on [0,1]
constexpr double kD1[2][2] = {{-0.5, -0.5}, {0.5, 0.5}};

// planning is not thread safe in FFTW
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return pairwise_sum(p);
}

void remove_mean(std::vector<double>& v) {
  const double m = pairwise_sum(v) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

Q1Tables::Q1Tables(std::size_t d) : dim(d), nc(std::size_t{1} << d) {
  stiff.assign(d * d, std::vector<double>(nc * nc));
  grad_mass.assign(d, std::vector<double>(nc * nc));
  mass.assign(nc * nc, 0.0);
  for (std::size_t b = 0; b < nc; ++b)
    for (std::size_t c = 0; c < nc; ++c) {
      double m = 1;
      for (std::size_t j = 0; j < d; ++j) m *= kM1[(b >> j) & 1u][(c >> j) & 1u];
      mass[b * nc + c] = m;
      for (std::size_t k = 0; k < d; ++k) {
        double g = 1;
        for (std::size_t j = 0; j < d; ++j) {
          const auto bj = (b >> j) & 1u, cj = (c >> j) & 1u;
          g *= j == k ? kD1[bj][cj] : kM1[bj][cj];
        }
        grad_mass[k][b * nc + c] = g;
        for (std::size_t l = 0; l < d; ++l) {
          double s = 1;
          for (std::size_t j = 0; j < d; ++j) {
            const auto bj = (b >> j) & 1u, cj = (c >> j) & 1u;
            if (j == k && j == l)
              s *= kS1[bj][cj];
            else if (j == k)
              s *= kD1[bj][cj];
            else if (j == l)
              s *= kD1[cj][bj];
            else
              s *= kM1[bj][cj];
          }
          stiff[k * d + l][b * nc + c] = s;
        }
      }
    }
}

PeriodicOperator::PeriodicOperator(const CoefficientField& a) : a_(&a), tables_(a.dim()) {
  const std::size_t d = a.dim(), nc = tables_.nc;
  const double scale = std::pow(a.shape().h(), static_cast<double>(d) - 2.0);
  laplace_local_.assign(nc * nc, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < nc * nc; ++i) laplace_local_[i] += scale * tables_.stiff[k * d + k][i];
}

void PeriodicOperator::element_matrix(std::size_t e, std::vector<double>& out) const {
  const std::size_t d = a_->dim(), nc = tables_.nc;
  out.assign(nc * nc, 0.0);
  const double* a = a_->at(e);
  if (a_->isotropic()) {
    for (std::size_t i = 0; i < nc * nc; ++i) out[i] = a[0] * laplace_local_[i];
    return;
  }
  const double scale = std::pow(a_->shape().h(), static_cast<double>(d) - 2.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l) {
      const double akl = a[k * d + l] * scale;
      if (akl == 0.0) continue;
      const auto& t = tables_.stiff[k * d + l];
      for (std::size_t i = 0; i < nc * nc; ++i) out[i] += akl * t[i];
    }
}

void PeriodicOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
  const auto& s = shape();
  const std::size_t nc = tables_.nc;
  y.assign(s.size(), 0.0);
  std::vector<std::size_t> nodes(nc);
  std::vector<double> km(nc * nc), xl(nc);
  const bool iso = a_->isotropic();
  for (std::size_t e = 0; e < s.size(); ++e) {
    s.corner_nodes(e, nodes);
    for (std::size_t c = 0; c < nc; ++c) xl[c] = x[nodes[c]];
    if (iso) {
      const double a = a_->at(e)[0];
      for (std::size_t b = 0; b < nc; ++b) {
        double acc = 0;
        const double* row = laplace_local_.data() + b * nc;
        for (std::size_t c = 0; c < nc; ++c) acc += row[c] * xl[c];
        y[nodes[b]] += a * acc;
      }
    } else {
      element_matrix(e, km);
      for (std::size_t b = 0; b < nc; ++b) {
        double acc = 0;
        for (std::size_t c = 0; c < nc; ++c) acc += km[b * nc + c] * xl[c];
        y[nodes[b]] += acc;
      }
    }
  }
}

double PeriodicOperator::energy(const GridFunction& u, const GridFunction& w) const {
  std::vector<double> kw;
  apply(w.values(), kw);
  return dot(u.values(), kw);
}

struct FftPreconditioner::Impl {
  GridShape shape;
  std::size_t ncomplex = 0;
  std::vector<double> inv_symbol;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(fftw_plan_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

FftPreconditioner::FftPreconditioner(const PeriodicOperator& op) : impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.shape = op.shape();
  const std::size_t d = im.shape.dim, n = im.shape.n;
  im.ncomplex = im.shape.size() / n * (n / 2 + 1);
  std::vector<int> dims(d, static_cast<int>(n));

  double* rbuf = fftw_alloc_real(im.shape.size());
  fftw_complex* cbuf = fftw_alloc_complex(im.ncomplex);
  {
    std::lock_guard lock(fftw_plan_mutex());
    im.forward = fftw_plan_dft_r2c(static_cast<int>(d), dims.data(), rbuf, cbuf, FFTW_ESTIMATE);
    im.backward = fftw_plan_dft_c2r(static_cast<int>(d), dims.data(), cbuf, rbuf, FFTW_ESTIMATE);
  }

  // symbol of the constant-coefficient operator: FFT of its response to a delta
  CoefficientField mean_field = CoefficientField::constant(d, n, op.coefficients().mean(), 1e300);
  PeriodicOperator k0(mean_field);
  std::vector<double> delta(im.shape.size(), 0.0), resp;
  delta[0] = 1.0;
  k0.apply(delta, resp);
  std::copy(resp.begin(), resp.end(), rbuf);
  fftw_execute_dft_r2c(im.forward, rbuf, cbuf);
  im.inv_symbol.assign(im.ncomplex, 0.0);
  double smax = 0;
  for (std::size_t i = 0; i < im.ncomplex; ++i) smax = std::max(smax, cbuf[i][0]);
  // normalization of the unnormalized c2r transform folded in
  const double norm = static_cast<double>(im.shape.size());
  for (std::size_t i = 1; i < im.ncomplex; ++i) {
    const double lam = cbuf[i][0];
    im.inv_symbol[i] = lam > 1e-13 * smax ? 1.0 / (lam * norm) : 0.0;
  }
  fftw_free(rbuf);
  fftw_free(cbuf);
}

FftPreconditioner::~FftPreconditioner() = default;

void FftPreconditioner::apply(const std::vector<double>& r, std::vector<double>& z) const {
  const auto& im = *impl_;
  double* rbuf = fftw_alloc_real(im.shape.size());
  fftw_complex* cbuf = fftw_alloc_complex(im.ncomplex);
  std::copy(r.begin(), r.end(), rbuf);
  fftw_execute_dft_r2c(im.forward, rbuf, cbuf);
  for (std::size_t i = 0; i < im.ncomplex; ++i) {
    cbuf[i][0] *= im.inv_symbol[i];
    cbuf[i][1] *= im.inv_symbol[i];
  }
  fftw_execute_dft_c2r(im.backward, cbuf, rbuf);
  z.assign(rbuf, rbuf + im.shape.size());
  fftw_free(rbuf);
  fftw_free(cbuf);
}

PeriodicSolver::PeriodicSolver(const CoefficientField& a, SolveOptions opt)
    : op_(a), opt_(opt), pre_(std::make_shared<FftPreconditioner>(op_)) {
  if (!(opt_.rel_tol > 0)) throw ContractViolation("solver tolerance must be positive");
  if (opt_.max_iterations == 0) opt_.max_iterations = 50 * a.shape().n;
}

std::vector<double> PeriodicSolver::assemble_rhs(const std::vector<ElementField>& flux,
                                                 const ElementField& scalar) const {
  const auto& s = op_.shape();
  const auto& t = op_.tables();
  const std::size_t d = s.dim, nc = t.nc;
  if (!flux.empty() && flux.size() != d) throw ContractViolation("flux source needs d components");
  for (const auto& f : flux)
    if (!(f.shape() == s)) throw ContractViolation("flux source grid does not match coefficients");
  if (!scalar.empty() && !(scalar.shape() == s))
    throw ContractViolation("scalar source grid does not match coefficients");

  const double hd = std::pow(s.h(), static_cast<double>(d));
  const double hd1 = std::pow(s.h(), static_cast<double>(d) - 1.0);
  std::vector<double> b(s.size(), 0.0);
  std::vector<std::size_t> nodes(nc);
  for (std::size_t e = 0; e < s.size(); ++e) {
    s.corner_nodes(e, nodes);
    for (std::size_t bb = 0; bb < nc; ++bb) {
      double acc = 0;
      for (std::size_t k = 0; k < flux.size(); ++k) {
        const double* g = flux[k].element(e);
        const double* row = t.grad_mass[k].data() + bb * nc;
        double sk = 0;
        for (std::size_t c = 0; c < nc; ++c) sk += row[c] * g[c];
        acc -= hd1 * sk;
      }
      if (!scalar.empty()) {
        const double* g = scalar.element(e);
        const double* row = t.mass.data() + bb * nc;
        double sm = 0;
        for (std::size_t c = 0; c < nc; ++c) sm += row[c] * g[c];
        acc += hd * sm;
      }
      b[nodes[bb]] += acc;
    }
  }
  return b;
}

SolveResult PeriodicSolver::solve(const std::vector<ElementField>& flux, const ElementField& scalar) const {
  if (!scalar.empty()) {
    const double m = scalar.integral();
    if (std::fabs(m) > 1e-12 * std::max(1.0, scalar.mean_abs()))
      throw ContractViolation("scalar source is not compatible: its mean is " + std::to_string(m));
  }
  return solve_assembled(assemble_rhs(flux, scalar));
}

SolveResult PeriodicSolver::solve_assembled(std::vector<double> b) const {
  const auto& s = op_.shape();
  remove_mean(b);
  SolveResult res{GridFunction(s), {}};
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return res;

  std::vector<double>& x = res.solution.values();
  std::vector<double> r = b, z, p, q;
  pre_->apply(r, z);
  p = z;
  double rz = dot(r, z);
  auto& hist = res.stats.residual_history;
  hist.push_back(1.0);
  for (std::size_t it = 1; it <= opt_.max_iterations; ++it) {
    op_.apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0)) throw SolverError("CG breakdown: operator not positive on search direction", hist);
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rel = std::sqrt(dot(r, r)) / bnorm;
    hist.push_back(rel);
    res.stats.iterations = it;
    res.stats.relative_residual = rel;
    if (rel <= opt_.rel_tol) {
      remove_mean(x);
      return res;
    }
    pre_->apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverError("CG did not converge in " + std::to_string(opt_.max_iterations) + " iterations (relative residual " +
                        std::to_string(res.stats.relative_residual) + ")",
                    hist);
}

SolveResult solve_periodic(const CoefficientField& a, const std::vector<ElementField>& flux,
                           const ElementField& scalar, SolveOptions opt) {
  return PeriodicSolver(a, opt).solve(flux, scalar);
}

}  // namespace homog
