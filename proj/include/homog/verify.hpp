#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homog/heterogeneous.hpp"
#include "homog/serialize.hpp"

namespace homog {

/// Volume-normalized L2 norm with an absolute error estimate.
struct NormEstimate {
  double value = 0;
  double error = 0;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Midpoint rule over the bounding box of E with `samples_per_unit` points per
/// unit length per axis; error from comparing against half the resolution.
/// Refuses fewer than 8 samples per unit cell.
NormEstimate norm_on_ellipsoid(const PointFunction& f, const Ellipsoid& e, int samples_per_unit = 8);
/// Closed form; error 0.
NormEstimate norm_on_ellipsoid(const RealPolynomial& p, const Ellipsoid& e);
/// Closed form for q plus lattice quadrature of the corrector part.
NormEstimate norm_on_ellipsoid(const HeterogeneousPolynomial& psi, const Ellipsoid& e, int samples_per_unit = 8);

/// ||f||^2_{L2(E_{theta r})} / (||f||_{L2(E_{theta^2 r})} ||f||_{L2(E_r)}), unnormalized norms.
double three_ellipsoid_ratio(const RealPolynomial& p, double r, double theta, const SquareMatrix<double>& abar);
double three_ellipsoid_ratio(const HeterogeneousPolynomial& psi, double r, double theta, int samples_per_unit = 8);
double three_ellipsoid_ratio(const PointFunction& f, double r, double theta, const SquareMatrix<double>& abar,
                             int samples_per_unit = 8);

/// ||f||_{uL2(E_r)} / ||f||_{uL2(E_{theta r})} for each r (volume-normalized).
std::vector<double> doubling_profile(const RealPolynomial& p, std::span<const double> r_list, double theta,
                                     const SquareMatrix<double>& abar);
std::vector<double> doubling_profile(const HeterogeneousPolynomial& psi, std::span<const double> r_list, double theta,
                                     int samples_per_unit = 8);

struct ScalingConfig {
  double theta = 0.5;
  std::vector<int> m_list{2, 4, 6};
  std::vector<double> r_list{64, 128, 256, 512, 1024};
  int seeds_per_degree = 1;
  std::uint64_t rng_seed = 20240601;
  int quadrature_n = 8;  // samples per unit cell per axis
  /// Use the seed itself as q (skips the higher-order correction).
  bool negative_control = false;
  /// Bands for the property flags.
  double slope_r_lo = -1.3, slope_r_hi = -0.7;
  double slope_m_max = 5.0;
  double doubling_variation_max = 0.10;

  void validate() const;
};

struct ScalingRow {
  int m = 0;
  int seed_index = 0;
  double r = 0, theta = 0;
  double norm_inner = 0, norm_mid = 0, norm_outer = 0;  // volume-normalized, radii theta^2 r, theta r, r
  double three_ratio = 0, doubling_ratio = 0;
  double quad_err = 0;  // relative error bound of three_ratio from the quadrature estimates
};

struct SlopeFit {
  double slope = 0, intercept = 0;
  std::size_t points = 0;
};

struct DegreeSummary {
  int m = 0;
  int seed_index = 0;
  SlopeFit r_fit;  // log|ratio - 1| vs log r
  bool r_slope_ok = false;
  bool eventually_decreasing = false;
  /// Doubling ratios over r in [m^4, max r]; empty when that range is.
  std::vector<double> doubling_window;
  double doubling_variation = 0;
  bool doubling_ok = true;
  bool ratio_above_floor = true;  // ratio >= 1 - quad_err
  double min_ratio_minus_one = 0;
};

struct ScalingReport {
  ScalingConfig config;
  std::string coefficients;
  std::vector<ScalingRow> rows;
  std::vector<DegreeSummary> degrees;
  SlopeFit m_fit;  // log|ratio - 1| vs log m at the largest r
  bool m_slope_ok = true;
  bool pass = false;
  std::vector<std::string> errors;

  std::string csv() const;
  Json summary() const;
};

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

ScalingReport run_scaling_study(const ScalingConfig& cfg, std::shared_ptr<const CorrectorTable> table);

struct MinimalScaleEntry {
  int m = 0;
  int seed_index = 0;
  std::vector<double> r;            // descending sweep
  std::vector<double> ratio_minus_one;
  std::vector<std::optional<double>> crossing;  // per threshold: largest r with ratio - 1 > threshold
};

struct MinimalScaleReport {
  std::vector<double> thresholds{0.5, 1.0, 2.0};
  std::vector<MinimalScaleEntry> entries;
  Json to_json() const;
};

/// Sweeps r from 4 m^4 down to m (factor sqrt 2) for each m in cfg.m_list.
MinimalScaleReport minimal_scale_probe(const ScalingConfig& cfg, std::shared_ptr<const CorrectorTable> table);

}  // namespace homog
