#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "homog/periodic_solver.hpp"
#include "homog/sym_tensor.hpp"

namespace homog {

/// Correctors phi_m (one grid function per multi-index |alpha| = m) and
/// homogenized tensors abar_m for m = 0..m_max.
struct CorrectorTable {
  std::shared_ptr<const CoefficientField> field;
  int m_max = 0;
  double solver_tol = 1e-10;
  std::vector<std::map<MultiIndex, GridFunction>> phi;
  std::vector<SymTensor<double>> abar;
  /// Largest CG iteration count per order.
  std::vector<std::size_t> iterations;

  std::size_t dim() const { return field->dim(); }
  const GridShape& shape() const { return field->shape(); }
  /// phi_m^alpha; phi_{-1} and absent entries are zero, phi_0 = 1.
  const GridFunction* component(int m, const MultiIndex& alpha) const;
  /// Largest nodal |phi_m^alpha| over alpha.
  double sup_norm(int m) const;
  /// Copy keeping orders 0..m (correctors and tensors).
  CorrectorTable truncated(int m) const;
};

CorrectorTable compute_correctors(std::shared_ptr<const CoefficientField> a, int m_max, SolveOptions opt = {});
CorrectorTable compute_correctors(const CoefficientField& a, int m_max, SolveOptions opt = {});

/// abar_2 as a row-major d x d matrix (M_ij = T_{e_i + e_j}).
SquareMatrix<double> homogenized_matrix(const CorrectorTable& t);

/// T^{(n,m)} = < grad phi_n a grad phi_m - phi_{n-1} a phi_{m-1} >, symmetrized
/// into an order n+m tensor. Exact discrete integrals of the Q1 fields.
SymTensor<double> energy_tensor(const CorrectorTable& t, int n, int m);

struct IdentityCheck {
  std::string name;
  double lhs_norm = 0;
  double rhs_norm = 0;
  double discrepancy = 0;  // |lhs - rhs| / max(|lhs|, |rhs|, |abar_2|)
  bool pass = false;
};

struct IdentityReport {
  double threshold = 0;
  std::vector<IdentityCheck> checks;
  /// |abar_m| / |abar_2| for odd m.
  std::map<int, double> odd_ratio;
  /// sup norms of phi_m.
  std::vector<double> sup_norms;
  bool pass = true;
};

/// Reference constant of the tolerance schedule max(1e-6, K h).
inline constexpr double kIdentityKRef = 0.05;

/// Energy identity for n >= 1, m >= 2, n + m <= m_max; the formula
/// abar_n = (-1)^k T^{(k, n-k)} for 1 <= k < n <= m_max (covers the even-order
/// formula); and vanishing of odd tensors. Needs m_max >= 3.
IdentityReport check_identities(const CorrectorTable& t);

}  // namespace homog
