#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homog/matrix.hpp"

namespace homog {

/// Periodic N^d grid on the unit torus. Nodes sit at i*h, h = 1/N; element
/// (cell) e is [e*h, (e+1)*h] and shares its flat index with its lower
/// corner node. Flat index is row-major with axis 0 slowest.
struct GridShape {
  std::size_t dim = 2;
  std::size_t n = 0;

  GridShape() = default;
  GridShape(std::size_t d, std::size_t n_per_axis);

  std::size_t size() const;
  std::size_t corners() const { return std::size_t{1} << dim; }
  double h() const { return 1.0 / static_cast<double>(n); }
  std::size_t stride(std::size_t axis) const;
  std::array<std::size_t, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const std::size_t> idx) const;
  /// Flat node indices of the 2^d corners of element e; corner c has bit k
  /// set when it is offset by one along axis k.
  void corner_nodes(std::size_t e, std::span<std::size_t> out) const;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Nodal values of a periodic grid function (the Q1 interpolant).
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridShape s, double fill = 0.0) : shape_(s), v_(s.size(), fill) {}
  GridFunction(GridShape s, std::vector<double> values);

  const GridShape& shape() const { return shape_; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  /// Arithmetic mean of the nodal values, equal to the integral of the
  /// Q1 interpolant over the torus.
  double mean() const;
  double max_abs() const;
  /// Relative L^2 of the Q1 interpolant: sqrt(int f^2) (exact for Q1).
  double l2_norm() const;
  /// Multilinear periodic interpolation at a physical point.
  double interpolate(std::span<const double> x) const;

 private:
  GridShape shape_;
  std::vector<double> v_;
};

/// Discontinuous Q1 field: 2^d corner values per element.
class ElementField {
 public:
  ElementField() = default;
  explicit ElementField(GridShape s) : shape_(s), v_(s.size() * s.corners(), 0.0) {}

  const GridShape& shape() const { return shape_; }
  double* element(std::size_t e) { return v_.data() + e * shape_.corners(); }
  const double* element(std::size_t e) const { return v_.data() + e * shape_.corners(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }
  bool empty() const { return v_.empty(); }

  /// Exact integral over the torus.
  double integral() const;
  double mean_abs() const;
  /// Continuous field restricted to each element.
  static ElementField from_nodal(const GridFunction& f);

 private:
  GridShape shape_;
  std::vector<double> v_;
};

/// Element-constant symmetric matrix field a(x) sampled at cell centers.
class CoefficientField {
 public:
  CoefficientField() = default;
  /// values: N^d blocks of d*d row-major entries.
  CoefficientField(GridShape s, std::vector<double> values, double lambda, std::string description);

  static CoefficientField constant(std::size_t dim, std::size_t n, const SquareMatrix<double>& a, double lambda = 0);
  /// a on x1 in [0, 1/2), b on [1/2, 1), times the identity.
  static CoefficientField laminate(std::size_t dim, std::size_t n, double a, double b);
  /// a where floor(2 x1) + ... + floor(2 xd) is even, else b, times the identity.
  static CoefficientField checkerboard(std::size_t dim, std::size_t n, double a, double b);
  /// (c + sin 2 pi x1 sin 2 pi x2) I, sampled at cell centers; needs c >= 2.
  static CoefficientField smooth(std::size_t dim, std::size_t n, double c);

  const GridShape& shape() const { return shape_; }
  std::size_t dim() const { return shape_.dim; }
  double lambda() const { return lambda_; }
  const std::string& description() const { return description_; }
  const double* at(std::size_t cell) const { return v_.data() + cell * dim() * dim(); }
  const std::vector<double>& values() const { return v_; }
  /// True when every sample is a multiple of the identity.
  bool isotropic() const { return isotropic_; }
  /// Cell-average matrix.
  SquareMatrix<double> mean() const;

 private:
  GridShape shape_;
  std::vector<double> v_;
  double lambda_ = 1.0;
  std::string description_;
  bool isotropic_ = false;
};

struct CoefficientReport {
  bool ok = true;
  double min_eigenvalue = 0;
  double max_eigenvalue = 0;
  std::optional<std::size_t> offending_cell;
  std::string message;
};

/// Checks symmetry and I <= a(x) <= lambda I at every sample.
CoefficientReport validate_coefficients(const CoefficientField& a);
/// validate_coefficients, throwing ContractViolation on failure.
void require_valid(const CoefficientField& a);

}  // namespace homog
