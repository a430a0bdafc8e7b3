#pragma once

#include <memory>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

/// Reference-element tables for Q1 on [0,1]^d (tensor products of the 1D
/// mass, stiffness and derivative-mass matrices).
struct Q1Tables {
  std::size_t dim = 2;
  std::size_t nc = 4;
  /// stiff[k*d + l][b*nc + c] = int d_k N_b d_l N_c
  std::vector<std::vector<double>> stiff;
  /// grad_mass[k][b*nc + c] = int d_k N_b N_c
  std::vector<std::vector<double>> grad_mass;
  /// mass[b*nc + c] = int N_b N_c
  std::vector<double> mass;

  explicit Q1Tables(std::size_t d);
};

/// Matrix-free periodic Q1 stiffness operator for element-constant a.
class PeriodicOperator {
 public:
  explicit PeriodicOperator(const CoefficientField& a);

  const CoefficientField& coefficients() const { return *a_; }
  const Q1Tables& tables() const { return tables_; }
  const GridShape& shape() const { return a_->shape(); }

  /// y = K x
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  /// Local element matrix h^{d-2} sum_kl a_kl stiff_kl for element e.
  void element_matrix(std::size_t e, std::vector<double>& out) const;
  /// int grad u . a grad w (exact for Q1 u, w).
  double energy(const GridFunction& u, const GridFunction& w) const;

 private:
  const CoefficientField* a_;
  Q1Tables tables_;
  std::vector<double> laplace_local_;  // h^{d-2} sum_k stiff_kk
};

struct SolveOptions {
  double rel_tol = 1e-10;
  /// 0 means 50 N.
  std::size_t max_iterations = 0;
};

struct SolveStats {
  std::size_t iterations = 0;
  double relative_residual = 0;
  std::vector<double> residual_history;
};

struct SolveResult {
  GridFunction solution;
  SolveStats stats;
};

/// Spectral preconditioner: inverse of the constant-coefficient operator
/// with the cell-mean matrix, applied by FFT, zero mode removed.
class FftPreconditioner {
 public:
  explicit FftPreconditioner(const PeriodicOperator& op);
  ~FftPreconditioner();
  FftPreconditioner(const FftPreconditioner&) = delete;
  FftPreconditioner& operator=(const FftPreconditioner&) = delete;

  void apply(const std::vector<double>& r, std::vector<double>& z) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Solver bound to one coefficient field: reuses the preconditioner across
/// right-hand sides. Safe to call solve() concurrently.
class PeriodicSolver {
 public:
  explicit PeriodicSolver(const CoefficientField& a, SolveOptions opt = {});

  const PeriodicOperator& op() const { return op_; }
  const SolveOptions& options() const { return opt_; }

  /// Finds the mean-zero Q1 phi with
  ///   int grad v . a grad phi = -int grad v . F + int v g  for all Q1 v.
  /// flux: d element fields (or empty); scalar: element field (or empty).
  /// Throws ContractViolation if int g != 0 and SolverError on stagnation.
  SolveResult solve(const std::vector<ElementField>& flux, const ElementField& scalar) const;
  /// Assembled load vector for the right-hand side above.
  std::vector<double> assemble_rhs(const std::vector<ElementField>& flux, const ElementField& scalar) const;
  /// PCG on K x = b restricted to mean-zero vectors.
  SolveResult solve_assembled(std::vector<double> b) const;

 private:
  PeriodicOperator op_;
  SolveOptions opt_;
  std::shared_ptr<FftPreconditioner> pre_;
};

/// One-shot convenience wrapper.
SolveResult solve_periodic(const CoefficientField& a, const std::vector<ElementField>& flux,
                           const ElementField& scalar, SolveOptions opt = {});

}  // namespace homog
