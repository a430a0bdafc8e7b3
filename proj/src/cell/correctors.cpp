#include "homog/correctors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "homog/errors.hpp"
#include "homog/parallel.hpp"

namespace homog {

namespace {

std::size_t pair_index(std::size_t d, std::size_t i, std::size_t l) { return i * d + l; }

// Corner values of the order-m right-hand side for component alpha.
void build_sources(const CorrectorTable& t, int m, const MultiIndex& alpha, std::vector<ElementField>& flux,
                   ElementField& scalar) {
  const auto& s = t.shape();
  const std::size_t d = s.dim, nc = s.corners();
  const auto& a = *t.field;
  const double md = m;
  const double inv_h = static_cast<double>(s.n);
  flux.assign(d, ElementField(s));
  scalar = ElementField(s);

  struct Term {
    double w;
    std::size_t i;
    const GridFunction* f;
  };
  std::vector<Term> first;  // (alpha_i / m) phi_{m-1}^{alpha - e_i}
  for (std::size_t i = 0; i < d; ++i) {
    if (alpha[i] == 0) continue;
    const auto* f = t.component(m - 1, alpha - MultiIndex::unit(d, i));
    if (f) first.push_back({alpha[i] / md, i, f});
  }
  struct Term2 {
    double w;
    std::size_t i, l;
    const GridFunction* f;
  };
  std::vector<Term2> second;  // alpha_i (alpha_l - delta_il) / (m (m-1)) a_il phi_{m-2}^{alpha - e_i - e_l}
  if (m >= 2)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t l = 0; l < d; ++l) {
        const int al = alpha[l] - (i == l ? 1 : 0);
        if (alpha[i] == 0 || al <= 0) continue;
        const auto beta = alpha - MultiIndex::unit(d, i) - MultiIndex::unit(d, l);
        const auto* f = t.component(m - 2, beta);
        if (f) second.push_back({alpha[i] * al / (md * (md - 1)), i, l, f});
      }

  std::vector<std::size_t> nodes(nc);
  std::vector<double> grad(d);
  for (std::size_t e = 0; e < s.size(); ++e) {
    s.corner_nodes(e, nodes);
    const double* ae = a.at(e);
    for (std::size_t c = 0; c < nc; ++c) {
      double g = 0;
      for (const auto& term : first) {
        const double v = (*term.f)[nodes[c]];
        for (std::size_t k = 0; k < d; ++k) flux[k].element(e)[c] += term.w * ae[pair_index(d, k, term.i)] * v;
        // d_k of a Q1 field at a corner: the edge difference along k
        for (std::size_t k = 0; k < d; ++k) {
          const std::size_t lo = c & ~(std::size_t{1} << k), hi = c | (std::size_t{1} << k);
          grad[k] = ((*term.f)[nodes[hi]] - (*term.f)[nodes[lo]]) * inv_h;
        }
        double agrad = 0;
        for (std::size_t k = 0; k < d; ++k) agrad += ae[pair_index(d, term.i, k)] * grad[k];
        g += term.w * agrad;
      }
      for (const auto& term : second) g += term.w * ae[pair_index(d, term.i, term.l)] * (*term.f)[nodes[c]];
      scalar.element(e)[c] = g;
    }
  }
}

}  // namespace

const GridFunction* CorrectorTable::component(int m, const MultiIndex& alpha) const {
  if (m < 0 || m > m_max) return nullptr;
  auto it = phi[m].find(alpha);
  return it == phi[m].end() ? nullptr : &it->second;
}

double CorrectorTable::sup_norm(int m) const {
  double s = 0;
  for (const auto& [a, f] : phi.at(m)) s = std::max(s, f.max_abs());
  return s;
}

CorrectorTable CorrectorTable::truncated(int m) const {
  if (m < 0 || m > m_max) throw ContractViolation("truncation order out of range");
  CorrectorTable t = *this;
  t.m_max = m;
  t.phi.resize(m + 1);
  t.abar.resize(m + 1);
  t.iterations.resize(m + 1);
  return t;
}

CorrectorTable compute_correctors(std::shared_ptr<const CoefficientField> a, int m_max, SolveOptions opt) {
  if (m_max < 1) throw ContractViolation("m_max must be >= 1");
  require_valid(*a);
  CorrectorTable t;
  t.field = a;
  t.m_max = m_max;
  t.solver_tol = opt.rel_tol;
  const auto& s = a->shape();
  const std::size_t d = s.dim;
  t.phi.resize(m_max + 1);
  t.abar.assign(m_max + 1, SymTensor<double>());
  t.iterations.assign(m_max + 1, 0);
  t.phi[0].emplace(MultiIndex(d), GridFunction(s, 1.0));
  t.abar[0] = SymTensor<double>(d, 0);

  PeriodicSolver solver(*a, opt);
  for (int m = 1; m <= m_max; ++m) {
    const auto idx = multi_indices_of_order(d, m);
    std::vector<GridFunction> sol(idx.size());
    std::vector<double> mean(idx.size());
    std::vector<std::size_t> iters(idx.size());
    parallel_for(idx.size(), [&](std::size_t j) {
      std::vector<ElementField> flux;
      ElementField g;
      build_sources(t, m, idx[j], flux, g);
      mean[j] = g.integral();
      for (double& v : g.values()) v -= mean[j];
      auto r = solver.solve(flux, g);
      sol[j] = std::move(r.solution);
      iters[j] = r.stats.iterations;
    });
    SymTensor<double> am(d, m);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      am.set(idx[j], mean[j]);
      t.phi[m].emplace(idx[j], std::move(sol[j]));
      t.iterations[m] = std::max(t.iterations[m], iters[j]);
    }
    t.abar[m] = std::move(am);
  }
  return t;
}

CorrectorTable compute_correctors(const CoefficientField& a, int m_max, SolveOptions opt) {
  return compute_correctors(std::make_shared<const CoefficientField>(a), m_max, opt);
}

SquareMatrix<double> homogenized_matrix(const CorrectorTable& t) {
  if (t.m_max < 2) throw ContractViolation("homogenized matrix needs m_max >= 2");
  auto m = t.abar[2].to_matrix();
  const std::size_t d = t.dim();
  // mean of the two equal off-diagonal readings is the same entry; enforce exact symmetry
  return SquareMatrix<double>(d, std::move(m));
}

SymTensor<double> energy_tensor(const CorrectorTable& t, int n, int m) {
  const std::size_t d = t.dim();
  if (n < 0 || m < 0 || n > t.m_max || m > t.m_max) throw ContractViolation("energy_tensor order out of range");
  const auto& s = t.shape();
  const std::size_t nc = s.corners();
  const int total = n + m;
  SymTensor<double> out(d, total);
  std::map<MultiIndex, double> acc;

  // gradient part (phi_0 is constant, so n = 0 or m = 0 contributes nothing)
  if (n >= 1 && m >= 1) {
    PeriodicOperator op(*t.field);
    for (const auto& [g, fg] : t.phi[m]) {
      std::vector<double> kf;
      op.apply(fg.values(), kf);
      for (const auto& [b, fb] : t.phi[n]) {
        std::vector<double> p(kf.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = fb[i] * kf[i];
        const double e = pairwise_sum(p);
        const double w = Integer(multinomial(b) * multinomial(g)).get_d();
        acc[b + g] += w * e;
      }
    }
  }
  // mass part: phi_{n-1} a phi_{m-1}, a read as the order-2 tensor a_{e_i + e_l}
  if (n >= 1 && m >= 1) {
    const Q1Tables tab(d);
    const double hd = std::pow(s.h(), static_cast<double>(d));
    std::vector<std::size_t> nodes(nc);
    for (const auto& [b, fb] : t.phi[n - 1])
      for (const auto& [g, fg] : t.phi[m - 1]) {
        // per (i, l): int fb a_il fg
        std::vector<std::vector<double>> per(d * d, std::vector<double>(s.size()));
        for (std::size_t e = 0; e < s.size(); ++e) {
          s.corner_nodes(e, nodes);
          double loc = 0;
          for (std::size_t x = 0; x < nc; ++x)
            for (std::size_t y = 0; y < nc; ++y) loc += fb[nodes[x]] * tab.mass[x * nc + y] * fg[nodes[y]];
          const double* ae = t.field->at(e);
          for (std::size_t q = 0; q < d * d; ++q) per[q][e] = hd * loc * ae[q];
        }
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t l = 0; l < d; ++l) {
            const MultiIndex eps = MultiIndex::unit(d, i) + MultiIndex::unit(d, l);
            // ordered pairs (i, l) enumerate binom(2, eps) ordered tuples
            const double w = Integer(multinomial(b) * multinomial(g)).get_d();
            acc[b + eps + g] -= w * pairwise_sum(per[i * d + l]);
          }
      }
  }
  for (auto& [delta, v] : acc) out.set(delta, v / multinomial(delta).get_d());
  return out;
}

IdentityReport check_identities(const CorrectorTable& t) {
  if (t.m_max < 3) throw ContractViolation("check_identities needs m_max >= 3");
  IdentityReport rep;
  rep.threshold = std::max(1e-6, kIdentityKRef * t.shape().h());
  const double a2 = tensor_norm(t.abar[2]);

  std::map<std::pair<int, int>, SymTensor<double>> cache;
  auto T = [&](int n, int m) -> const SymTensor<double>& {
    auto key = std::make_pair(n, m);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, energy_tensor(t, n, m)).first;
    return it->second;
  };
  auto add = [&](std::string name, const SymTensor<double>& lhs, const SymTensor<double>& rhs) {
    IdentityCheck c;
    c.name = std::move(name);
    c.lhs_norm = tensor_norm(lhs);
    c.rhs_norm = tensor_norm(rhs);
    const double scale = std::max({c.lhs_norm, c.rhs_norm, a2});
    c.discrepancy = scale > 0 ? tensor_norm(lhs - rhs) / scale : 0.0;
    c.pass = c.discrepancy <= rep.threshold;
    rep.pass = rep.pass && c.pass;
    rep.checks.push_back(std::move(c));
  };

  for (int n = 1; n <= t.m_max; ++n)
    for (int m = 2; n + m <= t.m_max; ++m) {
      SymTensor<double> rhs = T(n + 1, m - 1);
      rhs *= -1.0;
      add("energy(" + std::to_string(n) + "," + std::to_string(m) + ")", T(n, m), rhs);
    }
  for (int n = 2; n <= t.m_max; ++n)
    for (int k = 1; k < n; ++k) {
      SymTensor<double> rhs = T(k, n - k);
      if (k % 2) rhs *= -1.0;
      add("abar" + std::to_string(n) + "_k" + std::to_string(k), t.abar[n], rhs);
    }
  for (int m = 1; m <= t.m_max; m += 2) {
    const double r = a2 > 0 ? tensor_norm(t.abar[m]) / a2 : 0.0;
    rep.odd_ratio[m] = r;
    IdentityCheck c;
    c.name = "odd" + std::to_string(m);
    c.lhs_norm = tensor_norm(t.abar[m]);
    c.discrepancy = r;
    c.pass = r <= rep.threshold;
    rep.pass = rep.pass && c.pass;
    rep.checks.push_back(std::move(c));
  }
  for (int m = 0; m <= t.m_max; ++m) rep.sup_norms.push_back(t.sup_norm(m));
  return rep;
}

}  // namespace homog
