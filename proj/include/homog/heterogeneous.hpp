#pragma once

#include <memory>
#include <span>
#include <vector>

#include "homog/correctors.hpp"
#include "homog/homogop.hpp"

namespace homog {

/// int_E q^2, int_E q w and int_E w^2 where w = psi - q. q^2 is integrated in
/// closed form, the other two by the midpoint rule with Q samples per unit
/// cell per axis. error_* compare Q against 2Q.
struct PsiIntegrals {
  double qq = 0, qw = 0, ww = 0;
  double error_qw = 0, error_ww = 0;
  double volume = 0;
  int samples_per_cell = 0;

  double psi_sq() const { return qq + 2 * qw + ww; }
  double psi_sq_error() const { return 2 * error_qw + error_ww; }
};

struct ResidualOptions;

/// psi = sum_n grad^n q : phi_n with phi_n interpolated multilinearly.
class HeterogeneousPolynomial {
 public:
  HeterogeneousPolynomial(AHarmonicPolynomial q, std::shared_ptr<const CorrectorTable> table,
                          bool allow_truncated = false);

  const AHarmonicPolynomial& q() const { return q_; }
  const CorrectorTable& table() const { return *table_; }
  std::size_t dim() const { return q_.q.dim(); }
  /// Highest corrector order used (min(deg q, m_max)).
  int order_used() const { return order_used_; }

  double operator()(std::span<const double> x) const;
  /// w = psi - q
  double corrector_part(std::span<const double> x) const;
  /// psi at the grid nodes origin + i h, i in [0, cells N]^d; origin in whole cells.
  std::vector<double> window_values(std::span<const long> origin_cells, std::size_t cells) const;

  PsiIntegrals integrals(const Ellipsoid& e, int samples_per_cell = 8) const;
  /// Several ellipsoids sharing the per-phase tables.
  std::vector<PsiIntegrals> integrals(std::span<const Ellipsoid> es, int samples_per_cell = 8) const;

 private:
  friend double residual_psi(const HeterogeneousPolynomial&, const ResidualOptions&);
  struct Term {
    const GridFunction* phi;
    RealPolynomial weight;  // binom(n, beta) d^beta q
  };
  // w and q restricted to each sample phase, as dense polynomials in the cell index
  struct PhaseTables {
    int nq = 0, deg = 0;
    std::vector<MultiIndex> basis;
    std::vector<std::vector<double>> wj, qj;
    std::vector<std::pair<MultiIndex, double>> cqw, cww;  // phase averages of w q and w^2
  };
  PhaseTables phase_tables(int nq) const;
  void integrate_tables(const PhaseTables& tb, const Ellipsoid& e, double& qw, double& ww) const;

  AHarmonicPolynomial q_;
  std::shared_ptr<const CorrectorTable> table_;
  std::vector<Term> terms_;
  int order_used_ = 0;
};

HeterogeneousPolynomial build_heterogeneous(const AHarmonicPolynomial& q, std::shared_ptr<const CorrectorTable> table,
                                            bool allow_truncated = false);

struct ResidualOptions {
  /// Window of `cells` unit cells per axis starting at origin (whole cells).
  std::size_t cells = 2;
  std::vector<long> origin;  // empty = zeros
};

/// Weak residual r_i = int a grad psi . grad N_i over a window (Gauss quadrature,
/// exact for the polynomial factors). Returns the RMS of r_i / h^d over interior
/// window nodes divided by the RMS of psi at the window nodes.
double residual_psi(const HeterogeneousPolynomial& psi, const ResidualOptions& opt = {});

/// ||psi - q||_{L2(E_r)} / ||psi||_{L2(E_r)}, E_r built from abar.
double psi_poly_error(const HeterogeneousPolynomial& psi, double r, int samples_per_cell = 8);

}  // namespace homog
