#include "homog/heterogeneous.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "homog/algebra.hpp"
#include "homog/parallel.hpp"

namespace homog {

namespace {

// Dense coefficient vector of p over a fixed monomial list.
std::vector<double> dense(const RealPolynomial& p, const std::vector<MultiIndex>& basis) {
  std::vector<double> v(basis.size(), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) v[i] = p.coeff(basis[i]);
  return v;
}

// x1-interval of { x : x.B x <= r^2 } on the line through (., x').
std::optional<std::pair<double, double>> line_interval(const SquareMatrix<double>& b, double r2,
                                                       std::span<const double> xp) {
  const std::size_t d = b.size();
  double lin = 0, c = -r2;
  for (std::size_t k = 1; k < d; ++k) {
    lin += b(0, k) * xp[k - 1];
    for (std::size_t l = 1; l < d; ++l) c += xp[k - 1] * b(k, l) * xp[l - 1];
  }
  const double a = b(0, 0);
  const double disc = lin * lin - a * c;
  if (disc < 0) return std::nullopt;
  const double s = std::sqrt(disc);
  return std::make_pair((-lin - s) / a, (-lin + s) / a);
}

}  // namespace

HeterogeneousPolynomial::HeterogeneousPolynomial(AHarmonicPolynomial q, std::shared_ptr<const CorrectorTable> table,
                                                 bool allow_truncated)
    : q_(std::move(q)), table_(std::move(table)) {
  if (!table_) throw ContractViolation("heterogeneous polynomial needs a corrector table");
  if (table_->dim() != q_.q.dim()) throw ContractViolation("heterogeneous polynomial: dimension mismatch");
  const int deg = q_.degree();
  if (table_->m_max < deg && !allow_truncated)
    throw ContractViolation("corrector table order " + std::to_string(table_->m_max) + " is below deg q = " +
                            std::to_string(deg));
  order_used_ = std::min(deg, table_->m_max);
  for (int n = 1; n <= order_used_; ++n)
    for (const auto& [beta, phi] : table_->phi[n]) {
      RealPolynomial w = q_.q.derivative(beta);
      if (w.is_zero()) continue;
      w *= multinomial(beta).get_d();
      terms_.push_back({&phi, std::move(w)});
    }
}

double HeterogeneousPolynomial::corrector_part(std::span<const double> x) const {
  double s = 0;
  for (const auto& t : terms_) s += t.weight.evaluate(x) * t.phi->interpolate(x);
  return s;
}

double HeterogeneousPolynomial::operator()(std::span<const double> x) const {
  return q_.q.evaluate(x) + corrector_part(x);
}

std::vector<double> HeterogeneousPolynomial::window_values(std::span<const long> origin_cells,
                                                           std::size_t cells) const {
  const auto& s = table_->shape();
  const std::size_t d = s.dim, per = cells * s.n + 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= per;
  std::vector<double> out(total);
  parallel_for(total, [&](std::size_t flat) {
    std::array<long, 3> idx{};
    std::size_t f = flat;
    for (std::size_t k = d; k-- > 0;) {
      idx[k] = static_cast<long>(f % per);
      f /= per;
    }
    std::array<double, 3> x{};
    std::size_t node = 0;
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = static_cast<double>(origin_cells.empty() ? 0 : origin_cells[k]) + static_cast<double>(idx[k]) * s.h();
      node = node * s.n + static_cast<std::size_t>(idx[k]) % s.n;
    }
    std::span<const double> xs(x.data(), d);
    double v = q_.q.evaluate(xs);
    for (const auto& t : terms_) v += t.weight.evaluate(xs) * (*t.phi)[node];
    out[flat] = v;
  });
  return out;
}

HeterogeneousPolynomial::PhaseTables HeterogeneousPolynomial::phase_tables(int nq) const {
  const std::size_t d = dim();
  const int deg = q_.degree();
  PhaseTables tb;
  tb.nq = nq;
  tb.deg = std::max(deg, 0);
  tb.basis = multi_indices_up_to(d, tb.deg);
  std::size_t phases = 1;
  for (std::size_t k = 0; k < d; ++k) phases *= static_cast<std::size_t>(nq);

  // per-phase polynomials in the lattice variable z: w(z + xi_j), q(z + xi_j)
  tb.wj.resize(phases);
  tb.qj.resize(phases);
  RealPolynomial a_qw(d), a_ww(d);
  std::vector<RealPolynomial> wpoly(phases, RealPolynomial(d)), qpoly(phases, RealPolynomial(d));
  parallel_for(phases, [&](std::size_t j) {
    std::vector<double> xi(d);
    std::size_t f = j;
    for (std::size_t k = d; k-- > 0;) {
      xi[k] = (static_cast<double>(f % nq) + 0.5) / nq;
      f /= nq;
    }
    RealPolynomial w(d);
    for (const auto& t : terms_) {
      const double ph = t.phi->interpolate(xi);
      if (ph != 0.0) w += translate(t.weight, std::span<const double>(xi)) * ph;
    }
    qpoly[j] = translate(q_.q, std::span<const double>(xi));
    wpoly[j] = std::move(w);
    tb.wj[j] = dense(wpoly[j], tb.basis);
    tb.qj[j] = dense(qpoly[j], tb.basis);
  });
  for (std::size_t j = 0; j < phases; ++j) {
    a_qw += wpoly[j] * qpoly[j];
    a_ww += wpoly[j] * wpoly[j];
  }
  const double inv = 1.0 / static_cast<double>(phases);
  a_qw *= inv;
  a_ww *= inv;
  tb.cqw.assign(a_qw.terms().begin(), a_qw.terms().end());
  tb.cww.assign(a_ww.terms().begin(), a_ww.terms().end());
  return tb;
}

void HeterogeneousPolynomial::integrate_tables(const PhaseTables& tb, const Ellipsoid& e, double& qw, double& ww) const {
  const std::size_t d = dim();
  const int nq = tb.nq;
  const auto& basis = tb.basis;
  const auto& wj = tb.wj;
  const auto& qj = tb.qj;
  const auto& cqw = tb.cqw;
  const auto& cww = tb.cww;
  const int deg2 = 2 * tb.deg;
  const double inv = 1.0 / static_cast<double>(wj.size());
  const SquareMatrix<double>& binv = e.abar_inverse();
  const double r2 = e.radius() * e.radius();
  // rows: integer z' = (z_2, ..., z_d) over the bounding box
  std::vector<long> lo_z(d), hi_z(d);
  for (std::size_t k = 0; k < d; ++k) {
    lo_z[k] = static_cast<long>(std::floor(-e.half_extent(k))) - 1;
    hi_z[k] = static_cast<long>(std::floor(e.half_extent(k))) + 1;
  }
  std::size_t rows = 1;
  for (std::size_t k = 1; k < d; ++k) rows *= static_cast<std::size_t>(hi_z[k] - lo_z[k] + 1);
  std::vector<double> row_qw(rows, 0.0), row_ww(rows, 0.0);

  parallel_for(rows, [&](std::size_t row) {
    std::vector<long> zp(d, 0);  // zp[0] unused
    std::size_t f = row;
    for (std::size_t k = d; k-- > 1;) {
      const auto span_k = static_cast<std::size_t>(hi_z[k] - lo_z[k] + 1);
      zp[k] = lo_z[k] + static_cast<long>(f % span_k);
      f /= span_k;
    }
    // interior cells: every corner line of the cell lies inside the interval
    long a = LONG_MIN, b = LONG_MAX;
    bool any_interior = true;
    const std::size_t corner_lines = std::size_t{1} << (d - 1);
    std::vector<double> xp(d - 1);
    for (std::size_t c = 0; c < corner_lines && any_interior; ++c) {
      for (std::size_t k = 1; k < d; ++k) xp[k - 1] = static_cast<double>(zp[k] + static_cast<long>((c >> (k - 1)) & 1u));
      auto iv = line_interval(binv, r2, xp);
      if (!iv) {
        any_interior = false;
        break;
      }
      a = std::max(a, static_cast<long>(std::ceil(iv->first)));
      b = std::min(b, static_cast<long>(std::floor(iv->second)) - 1);
    }
    if (!any_interior) {
      a = 1;
      b = 0;
    }
    double sqw = 0, sww = 0;
    if (a <= b) {
      std::vector<double> pw(deg2 + 1, 0.0);  // sum_{z1=a}^{b} z1^k
      for (long z = a; z <= b; ++z) {
        double p = 1;
        const double zd = static_cast<double>(z);
        for (int k = 0; k <= deg2; ++k) {
          pw[k] += p;
          p *= zd;
        }
      }
      auto lattice = [&](const std::vector<std::pair<MultiIndex, double>>& coeffs) {
        double s = 0;
        for (const auto& [mu, c] : coeffs) {
          double t = c * pw[mu[0]];
          for (std::size_t k = 1; k < d; ++k)
            for (int i = 0; i < mu[k]; ++i) t *= static_cast<double>(zp[k]);
          s += t;
        }
        return s;
      };
      sqw = lattice(cqw);
      sww = lattice(cww);
    }
    // boundary samples: every sample line of the row, cells outside [a, b]
    std::size_t line_count = 1;
    for (std::size_t k = 1; k < d; ++k) line_count *= static_cast<std::size_t>(nq);
    std::vector<double> zpow(basis.size());
    double bqw = 0, bww = 0;
    for (std::size_t line = 0; line < line_count; ++line) {
      std::size_t g = line, phase_tail = 0, mult = 1;
      std::vector<std::size_t> ph(d, 0);
      for (std::size_t k = d; k-- > 1;) {
        ph[k] = g % nq;
        g /= nq;
      }
      for (std::size_t k = 1; k < d; ++k) xp[k - 1] = static_cast<double>(zp[k]) + (static_cast<double>(ph[k]) + 0.5) / nq;
      // flat phase index = ph[0] * nq^{d-1} + tail
      for (std::size_t k = d; k-- > 1;) {
        phase_tail += ph[k] * mult;
        mult *= static_cast<std::size_t>(nq);
      }
      auto iv = line_interval(binv, r2, xp);
      if (!iv) continue;
      const long c0 = static_cast<long>(std::floor(iv->first)), c1 = static_cast<long>(std::floor(iv->second));
      for (long z1 = c0; z1 <= c1; ++z1) {
        if (z1 >= a && z1 <= b) continue;
        bool powers_ready = false;
        for (int i = 0; i < nq; ++i) {
          const double x1 = static_cast<double>(z1) + (i + 0.5) / nq;
          if (x1 < iv->first || x1 > iv->second) continue;
          if (!powers_ready) {
            for (std::size_t t = 0; t < basis.size(); ++t) {
              double v = 1;
              for (std::size_t k = 0; k < d; ++k) {
                const double zk = k == 0 ? static_cast<double>(z1) : static_cast<double>(zp[k]);
                for (int s = 0; s < basis[t][k]; ++s) v *= zk;
              }
              zpow[t] = v;
            }
            powers_ready = true;
          }
          const std::size_t j = static_cast<std::size_t>(i) * mult + phase_tail;
          double wv = 0, qv = 0;
          for (std::size_t t = 0; t < basis.size(); ++t) {
            wv += wj[j][t] * zpow[t];
            qv += qj[j][t] * zpow[t];
          }
          bqw += wv * qv;
          bww += wv * wv;
        }
      }
    }
    row_qw[row] = sqw + bqw * inv;
    row_ww[row] = sww + bww * inv;
  });
  qw = pairwise_sum(row_qw);
  ww = pairwise_sum(row_ww);
}

std::vector<PsiIntegrals> HeterogeneousPolynomial::integrals(std::span<const Ellipsoid> es, int samples_per_cell) const {
  if (samples_per_cell < 8) throw ContractViolation("quadrature needs at least 8 samples per unit cell per axis");
  std::vector<PsiIntegrals> out(es.size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (es[i].dim() != dim()) throw ContractViolation("ellipsoid dimension mismatch");
    out[i].samples_per_cell = samples_per_cell;
    out[i].qq = l2_sq_inner_ellipsoid(q_.q, q_.q, es[i]);
    out[i].volume = es[i].volume();
  }
  if (terms_.empty()) return out;
  std::vector<double> qw1(es.size()), ww1(es.size());
  {
    const auto tb = phase_tables(samples_per_cell);
    for (std::size_t i = 0; i < es.size(); ++i) integrate_tables(tb, es[i], qw1[i], ww1[i]);
  }
  const auto tb = phase_tables(2 * samples_per_cell);
  for (std::size_t i = 0; i < es.size(); ++i) {
    integrate_tables(tb, es[i], out[i].qw, out[i].ww);
    out[i].error_qw = std::fabs(qw1[i] - out[i].qw);
    out[i].error_ww = std::fabs(ww1[i] - out[i].ww);
  }
  return out;
}

PsiIntegrals HeterogeneousPolynomial::integrals(const Ellipsoid& e, int samples_per_cell) const {
  return integrals(std::span<const Ellipsoid>(&e, 1), samples_per_cell).front();
}

HeterogeneousPolynomial build_heterogeneous(const AHarmonicPolynomial& q, std::shared_ptr<const CorrectorTable> table,
                                            bool allow_truncated) {
  return HeterogeneousPolynomial(q, std::move(table), allow_truncated);
}

namespace {

// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 1;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1 - z);
    w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
}

struct DensePoly {
  std::vector<double> v;
  std::vector<std::vector<double>> g;  // per-axis derivative
};

DensePoly make_dense(const RealPolynomial& p, const std::vector<MultiIndex>& basis) {
  DensePoly out{dense(p, basis), {}};
  for (std::size_t k = 0; k < p.dim(); ++k) out.g.push_back(dense(p.derivative(k), basis));
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double residual_psi(const HeterogeneousPolynomial& psi, const ResidualOptions& opt) {
  const auto& s = psi.table().shape();
  const auto& a = *psi.table().field;
  const std::size_t d = s.dim, nc = s.corners();
  if (opt.cells < 1) throw ContractViolation("residual window needs at least one cell");
  std::vector<long> origin = opt.origin.empty() ? std::vector<long>(d, 0) : opt.origin;
  if (origin.size() != d) throw ContractViolation("residual window origin has wrong dimension");
  const auto vals = psi.window_values(origin, opt.cells);
  const std::size_t per = opt.cells * s.n + 1, elems_per = per - 1;
  std::size_t total = 1, elems = 1;
  for (std::size_t k = 0; k < d; ++k) {
    total *= per;
    elems *= elems_per;
  }

  const int deg = std::max(psi.q_.degree(), 0);
  const auto basis = multi_indices_up_to(d, deg);
  const DensePoly dq = make_dense(psi.q_.q, basis);
  std::vector<DensePoly> dw;
  for (const auto& t : psi.terms_) dw.push_back(make_dense(t.weight, basis));
  std::vector<double> gx, gw;
  gauss_legendre(deg / 2 + 2, gx, gw);
  const std::size_t ng = gx.size();
  std::size_t npts = 1;
  for (std::size_t k = 0; k < d; ++k) npts *= ng;
  const double h = s.h(), hd = std::pow(h, static_cast<double>(d));

  // element load vectors int a grad psi . grad N_c, computed in parallel, scattered serially
  std::vector<double> loads(elems * nc, 0.0);
  parallel_for(elems, [&](std::size_t e) {
    std::array<std::size_t, 3> idx{};
    std::size_t f = e;
    for (std::size_t k = d; k-- > 0;) {
      idx[k] = f % elems_per;
      f /= elems_per;
    }
    std::size_t cell = 0;
    for (std::size_t k = 0; k < d; ++k) cell = cell * s.n + idx[k] % s.n;
    std::vector<std::vector<double>> phic(psi.terms_.size(), std::vector<double>(nc));
    for (std::size_t c = 0; c < nc; ++c) {
      std::size_t node = 0;
      for (std::size_t k = 0; k < d; ++k) node = node * s.n + (idx[k] + ((c >> k) & 1u)) % s.n;
      for (std::size_t t = 0; t < psi.terms_.size(); ++t) phic[t][c] = (*psi.terms_[t].phi)[node];
    }
    const double* am = a.at(cell);
    std::vector<double> mono(basis.size()), shape(nc), grad_psi(d), flux(d);
    std::vector<std::vector<double>> dshape(nc, std::vector<double>(d));
    std::vector<std::vector<double>> powers(d, std::vector<double>(deg + 1));
    double* out = loads.data() + e * nc;
    for (std::size_t pidx = 0; pidx < npts; ++pidx) {
      std::array<double, 3> xi{};
      double wt = hd;
      std::size_t g = pidx;
      for (std::size_t k = 0; k < d; ++k) {
        xi[k] = gx[g % ng];
        wt *= gw[g % ng];
        g /= ng;
      }
      for (std::size_t k = 0; k < d; ++k) {
        const double x = static_cast<double>(origin[k]) + (static_cast<double>(idx[k]) + xi[k]) * h;
        powers[k][0] = 1;
        for (int j = 1; j <= deg; ++j) powers[k][j] = powers[k][j - 1] * x;
      }
      for (std::size_t b = 0; b < basis.size(); ++b) {
        double v = 1;
        for (std::size_t k = 0; k < d; ++k) v *= powers[k][basis[b][k]];
        mono[b] = v;
      }
      for (std::size_t c = 0; c < nc; ++c) {
        double v = 1;
        for (std::size_t k = 0; k < d; ++k) v *= ((c >> k) & 1u) ? xi[k] : 1 - xi[k];
        shape[c] = v;
        for (std::size_t l = 0; l < d; ++l) {
          double dv = ((c >> l) & 1u) ? 1.0 / h : -1.0 / h;
          for (std::size_t k = 0; k < d; ++k)
            if (k != l) dv *= ((c >> k) & 1u) ? xi[k] : 1 - xi[k];
          dshape[c][l] = dv;
        }
      }
      for (std::size_t k = 0; k < d; ++k) grad_psi[k] = dot(dq.g[k], mono);
      for (std::size_t t = 0; t < dw.size(); ++t) {
        double ph = 0;
        std::array<double, 3> gph{};
        for (std::size_t c = 0; c < nc; ++c) {
          ph += shape[c] * phic[t][c];
          for (std::size_t k = 0; k < d; ++k) gph[k] += dshape[c][k] * phic[t][c];
        }
        const double wv = dot(dw[t].v, mono);
        for (std::size_t k = 0; k < d; ++k) grad_psi[k] += dot(dw[t].g[k], mono) * ph + wv * gph[k];
      }
      for (std::size_t k = 0; k < d; ++k) {
        flux[k] = 0;
        for (std::size_t l = 0; l < d; ++l) flux[k] += am[k * d + l] * grad_psi[l];
      }
      for (std::size_t c = 0; c < nc; ++c) {
        double v = 0;
        for (std::size_t k = 0; k < d; ++k) v += flux[k] * dshape[c][k];
        out[c] += wt * v;
      }
    }
  });
  std::vector<double> y(total, 0.0);
  for (std::size_t e = 0; e < elems; ++e) {
    std::size_t f = e, base = 0;
    std::array<std::size_t, 3> idx{};
    for (std::size_t k = d; k-- > 0;) {
      idx[k] = f % elems_per;
      f /= elems_per;
    }
    for (std::size_t c = 0; c < nc; ++c) {
      base = 0;
      for (std::size_t k = 0; k < d; ++k) base = base * per + idx[k] + ((c >> k) & 1u);
      y[base] += loads[e * nc + c];
    }
  }
  std::vector<double> rsq, psq;
  for (std::size_t g = 0; g < total; ++g) {
    psq.push_back(vals[g] * vals[g]);
    std::size_t f = g;
    bool interior = true;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t i = f % per;
      f /= per;
      interior = interior && i > 0 && i + 1 < per;
    }
    if (interior) rsq.push_back(std::pow(y[g] / hd, 2));
  }
  const double rms_psi = std::sqrt(pairwise_sum(psq) / static_cast<double>(psq.size()));
  const double rms_res = std::sqrt(pairwise_sum(rsq) / static_cast<double>(rsq.size()));
  return rms_psi > 0 ? rms_res / rms_psi : 0.0;
}

double psi_poly_error(const HeterogeneousPolynomial& psi, double r, int samples_per_cell) {
  Ellipsoid e(psi.q().op->abar(), r);
  auto in = psi.integrals(e, samples_per_cell);
  const double den = in.psi_sq();
  return den > 0 ? std::sqrt(std::max(0.0, in.ww) / den) : 0.0;
}

}  // namespace homog
