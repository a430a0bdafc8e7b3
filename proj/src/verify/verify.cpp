#include "homog/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "homog/harmonic_basis.hpp"
#include "homog/parallel.hpp"

namespace homog {

namespace {

// Midpoint rule on lines along axis 0; each line is clipped to the exact chord
// of E, and partial cells are sampled at the midpoint of the clipped piece.
double midpoint_sq(const PointFunction& f, const Ellipsoid& e, int q) {
  const std::size_t d = e.dim();
  const auto& b = e.abar_inverse();
  const double r2 = e.radius() * e.radius();
  std::vector<long> lo(d), cnt(d);
  for (std::size_t k = 1; k < d; ++k) {
    const double ext = e.half_extent(k);
    lo[k] = static_cast<long>(std::floor(-ext * q));
    cnt[k] = static_cast<long>(std::ceil(ext * q)) - lo[k];
  }
  std::size_t lines = 1;
  for (std::size_t k = 1; k < d; ++k) lines *= static_cast<std::size_t>(cnt[k]);
  std::vector<double> part(lines, 0.0);
  const double hx = 1.0 / q;
  parallel_for(lines, [&](std::size_t line) {
    std::vector<double> x(d);
    std::size_t f2 = line;
    for (std::size_t k = d; k-- > 1;) {
      const auto c = static_cast<std::size_t>(cnt[k]);
      x[k] = (static_cast<double>(lo[k] + static_cast<long>(f2 % c)) + 0.5) * hx;
      f2 /= c;
    }
    // x . B x <= r^2 as a quadratic in x0
    double lin = 0, c0 = -r2;
    for (std::size_t k = 1; k < d; ++k) {
      lin += b(0, k) * x[k];
      for (std::size_t l = 1; l < d; ++l) c0 += x[k] * b(k, l) * x[l];
    }
    const double disc = lin * lin - b(0, 0) * c0;
    if (disc <= 0) return;
    const double sq = std::sqrt(disc);
    const double a0 = (-lin - sq) / b(0, 0), a1 = (-lin + sq) / b(0, 0);
    std::vector<double> acc;
    for (long k = static_cast<long>(std::floor(a0 * q)); k * hx < a1; ++k) {
      const double u0 = std::max(a0, k * hx), u1 = std::min(a1, (k + 1) * hx);
      if (u1 <= u0) continue;
      x[0] = 0.5 * (u0 + u1);
      const double v = f(x);
      acc.push_back(v * v * (u1 - u0));
    }
    part[line] = pairwise_sum(acc);
  });
  return pairwise_sum(part) * std::pow(hx, static_cast<double>(d - 1));
}

void check_samples(int q) {
  if (q < 8) throw ContractViolation("quadrature needs at least 8 samples per unit cell per axis");
}

void check_ratio_args(double r, double theta) {
  if (!(r > 0)) throw ContractViolation("radius must be positive");
  if (!(theta > 0 && theta <= 0.5)) throw ContractViolation("theta must lie in (0, 1/2]");
}

double ratio_from_sq(double inner, double mid, double outer) {
  if (!(inner > 0)) throw ContractViolation("function vanishes on the inner ellipsoid");
  return mid / std::sqrt(inner * outer);
}

std::uint64_t seed_for(std::uint64_t base, int m, int idx) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(idx)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

HeterogeneousPolynomial make_psi(const ScalingConfig& cfg, const std::shared_ptr<const HomogenizedOperator>& op,
                                 const std::shared_ptr<const CorrectorTable>& table, int m, int idx) {
  const auto h = random_harmonic_seed(op->dim(), m, seed_for(cfg.rng_seed, m, idx));
  const RealPolynomial seed = abar_harmonic_from(*op, h);
  AHarmonicPolynomial q = build_A_harmonic(op, seed);
  if (cfg.negative_control) {
    q.q = q.seed;
    q.q_exact.reset();
  }
  return build_heterogeneous(q, table);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

NormEstimate norm_on_ellipsoid(const PointFunction& f, const Ellipsoid& e, int samples_per_unit) {
  check_samples(samples_per_unit);
  const double vol = e.volume();
  const double n1 = std::sqrt(midpoint_sq(f, e, samples_per_unit) / vol);
  const double n2 = std::sqrt(midpoint_sq(f, e, 2 * samples_per_unit) / vol);
  return {n2, std::fabs(n1 - n2)};
}

NormEstimate norm_on_ellipsoid(const RealPolynomial& p, const Ellipsoid& e) { return {mean_l2_norm_ellipsoid(p, e), 0}; }

NormEstimate norm_on_ellipsoid(const HeterogeneousPolynomial& psi, const Ellipsoid& e, int samples_per_unit) {
  const auto in = psi.integrals(e, samples_per_unit);
  const double sq = std::max(0.0, in.psi_sq());
  const double v = std::sqrt(sq / in.volume);
  return {v, sq > 0 ? 0.5 * v * in.psi_sq_error() / sq : 0.0};
}

double three_ellipsoid_ratio(const RealPolynomial& p, double r, double theta, const SquareMatrix<double>& abar) {
  check_ratio_args(r, theta);
  auto sq = [&](double s) { return l2_sq_inner_ellipsoid(p, p, Ellipsoid(abar, s)); };
  return ratio_from_sq(sq(theta * theta * r), sq(theta * r), sq(r));
}

double three_ellipsoid_ratio(const HeterogeneousPolynomial& psi, double r, double theta, int samples_per_unit) {
  check_ratio_args(r, theta);
  const auto abar = psi.q().op->abar();
  std::vector<Ellipsoid> es{Ellipsoid(abar, theta * theta * r), Ellipsoid(abar, theta * r), Ellipsoid(abar, r)};
  const auto in = psi.integrals(es, samples_per_unit);
  return ratio_from_sq(in[0].psi_sq(), in[1].psi_sq(), in[2].psi_sq());
}

double three_ellipsoid_ratio(const PointFunction& f, double r, double theta, const SquareMatrix<double>& abar,
                             int samples_per_unit) {
  check_ratio_args(r, theta);
  check_samples(samples_per_unit);
  auto sq = [&](double s) { return midpoint_sq(f, Ellipsoid(abar, s), 2 * samples_per_unit); };
  return ratio_from_sq(sq(theta * theta * r), sq(theta * r), sq(r));
}

std::vector<double> doubling_profile(const RealPolynomial& p, std::span<const double> r_list, double theta,
                                     const SquareMatrix<double>& abar) {
  std::vector<double> out;
  for (double r : r_list) {
    check_ratio_args(r, theta);
    const double inner = mean_l2_norm_ellipsoid(p, Ellipsoid(abar, theta * r));
    if (!(inner > 0)) throw ContractViolation("function vanishes on the inner ellipsoid");
    out.push_back(mean_l2_norm_ellipsoid(p, Ellipsoid(abar, r)) / inner);
  }
  return out;
}

std::vector<double> doubling_profile(const HeterogeneousPolynomial& psi, std::span<const double> r_list, double theta,
                                     int samples_per_unit) {
  const auto abar = psi.q().op->abar();
  std::vector<Ellipsoid> es;
  for (double r : r_list) {
    check_ratio_args(r, theta);
    es.emplace_back(abar, theta * r);
    es.emplace_back(abar, r);
  }
  const auto in = psi.integrals(es, samples_per_unit);
  std::vector<double> out;
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    const double inner = in[2 * i].psi_sq() / in[2 * i].volume;
    if (!(inner > 0)) throw ContractViolation("function vanishes on the inner ellipsoid");
    out.push_back(std::sqrt(in[2 * i + 1].psi_sq() / in[2 * i + 1].volume / inner));
  }
  return out;
}

void ScalingConfig::validate() const {
  if (!(theta > 0 && theta <= 0.5)) throw ConfigError("study.theta must lie in (0, 1/2]");
  if (m_list.empty()) throw ConfigError("study.m_list is empty");
  for (int m : m_list)
    if (m < 0) throw ConfigError("study.m_list entries must be >= 0");
  if (r_list.size() < 2) throw ConfigError("study.r_list needs at least two radii");
  for (std::size_t i = 1; i < r_list.size(); ++i)
    if (!(r_list[i] > r_list[i - 1])) throw ConfigError("study.r_list must be strictly ascending");
  const int mmax = *std::max_element(m_list.begin(), m_list.end());
  if (r_list.front() < 4.0 * mmax) throw ConfigError("study.r_list: every r must be >= 4 m");
  if (seeds_per_degree < 1) throw ConfigError("study.seeds must be >= 1");
  if (quadrature_n < 8) throw ConfigError("study.quadrature_n must be >= 8 samples per unit cell");
}

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  SlopeFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++f.points;
  }
  if (f.points < 2) {
    f.slope = f.intercept = std::nan("");
    return f;
  }
  const double n = static_cast<double>(f.points);
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

ScalingReport run_scaling_study(const ScalingConfig& cfg, std::shared_ptr<const CorrectorTable> table) {
  cfg.validate();
  if (!table) throw ContractViolation("scaling study needs a corrector table");
  ScalingReport rep;
  rep.config = cfg;
  rep.coefficients = table->field->description();
  auto op = std::make_shared<const HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  const auto abar = op->abar();
  const double th = cfg.theta;

  std::set<double> radii;
  for (double r : cfg.r_list) {
    radii.insert(th * th * r);
    radii.insert(th * r);
    radii.insert(r);
  }
  const std::vector<double> rad(radii.begin(), radii.end());
  std::vector<Ellipsoid> es;
  for (double s : rad) es.emplace_back(abar, s);
  auto pos = [&](double s) { return static_cast<std::size_t>(std::lower_bound(rad.begin(), rad.end(), s) - rad.begin()); };

  std::map<int, std::vector<double>> top_dev;  // |ratio - 1| at the largest r, per m
  for (int m : cfg.m_list)
    for (int idx = 0; idx < cfg.seeds_per_degree; ++idx) {
      try {
        const auto psi = make_psi(cfg, op, table, m, idx);
        const auto in = psi.integrals(es, cfg.quadrature_n);
        DegreeSummary ds;
        ds.m = m;
        ds.seed_index = idx;
        std::vector<double> dev, err;
        for (double r : cfg.r_list) {
          const auto& a = in[pos(th * th * r)];
          const auto& b = in[pos(th * r)];
          const auto& c = in[pos(r)];
          ScalingRow row;
          row.m = m;
          row.seed_index = idx;
          row.r = r;
          row.theta = th;
          row.norm_inner = std::sqrt(a.psi_sq() / a.volume);
          row.norm_mid = std::sqrt(b.psi_sq() / b.volume);
          row.norm_outer = std::sqrt(c.psi_sq() / c.volume);
          row.three_ratio = ratio_from_sq(a.psi_sq(), b.psi_sq(), c.psi_sq());
          row.doubling_ratio = row.norm_outer / row.norm_mid;
          row.quad_err =
              b.psi_sq_error() / b.psi_sq() + 0.5 * (a.psi_sq_error() / a.psi_sq() + c.psi_sq_error() / c.psi_sq());
          rep.rows.push_back(row);
          dev.push_back(std::fabs(row.three_ratio - 1));
          err.push_back(row.quad_err);
          ds.min_ratio_minus_one = dev.size() == 1 ? row.three_ratio - 1 : std::min(ds.min_ratio_minus_one, row.three_ratio - 1);
          if (row.three_ratio < 1 - row.quad_err) ds.ratio_above_floor = false;
          if (r >= std::pow(static_cast<double>(m), 4)) ds.doubling_window.push_back(row.doubling_ratio);
        }
        // deviations at the quadrature floor carry no slope information
        std::vector<double> rx, dy;
        for (std::size_t i = 0; i < dev.size(); ++i)
          if (dev[i] > err[i]) {
            rx.push_back(cfg.r_list[i]);
            dy.push_back(dev[i]);
          }
        ds.r_fit = fit_loglog(rx, dy);
        ds.r_slope_ok = rx.empty() || (ds.r_fit.points >= 2 && ds.r_fit.slope >= cfg.slope_r_lo &&
                                       ds.r_fit.slope <= cfg.slope_r_hi);
        int inversions = 0;
        for (std::size_t i = 1; i < dev.size(); ++i)
          if (dev[i] > dev[i - 1] && dev[i] > err[i]) ++inversions;
        ds.eventually_decreasing = inversions <= 1;
        if (!ds.doubling_window.empty()) {
          const auto [lo, hi] = std::minmax_element(ds.doubling_window.begin(), ds.doubling_window.end());
          ds.doubling_variation = (*hi - *lo) / *lo;
          ds.doubling_ok = ds.doubling_variation <= cfg.doubling_variation_max;
        }
        top_dev[m].push_back(dev.back());
        rep.degrees.push_back(std::move(ds));
      } catch (const std::exception& ex) {
        rep.errors.push_back("m=" + std::to_string(m) + " seed=" + std::to_string(idx) + ": " + ex.what());
      }
    }

  std::vector<double> mx, my;
  for (const auto& [m, v] : top_dev) {
    double s = 0;
    for (double x : v) s += x;
    mx.push_back(m);
    my.push_back(s / static_cast<double>(v.size()));
  }
  rep.m_fit = fit_loglog(mx, my);
  rep.m_slope_ok = rep.m_fit.points < 2 || rep.m_fit.slope <= cfg.slope_m_max;
  rep.pass = rep.errors.empty() && rep.m_slope_ok;
  for (const auto& ds : rep.degrees)
    rep.pass = rep.pass && ds.r_slope_ok && ds.eventually_decreasing && ds.doubling_ok && ds.ratio_above_floor;
  return rep;
}

std::string ScalingReport::csv() const {
  std::string out = "m,r,theta,norm_inner,norm_mid,norm_outer,three_ratio,doubling_ratio,quad_err,seed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m) + "," + fmt(r.r) + "," + fmt(r.theta) + "," + fmt(r.norm_inner) + "," +
           fmt(r.norm_mid) + "," + fmt(r.norm_outer) + "," + fmt(r.three_ratio) + "," + fmt(r.doubling_ratio) + "," +
           fmt(r.quad_err) + "," + std::to_string(r.seed_index) + "\n";
  }
  return out;
}

namespace {

Json fit_json(const SlopeFit& f) {
  Json j;
  j["points"] = f.points;
  if (f.points >= 2) {
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
  } else {
    j["slope"] = nullptr;
    j["intercept"] = nullptr;
  }
  return j;
}

}  // namespace

Json ScalingReport::summary() const {
  Json j;
  j["format"] = "homog-scaling-report";
  j["version"] = 1;
  j["coefficients"] = coefficients;
  j["config"] = {{"theta", config.theta},
                 {"m_list", config.m_list},
                 {"r_list", config.r_list},
                 {"seeds", config.seeds_per_degree},
                 {"rng_seed", config.rng_seed},
                 {"quadrature_n", config.quadrature_n},
                 {"negative_control", config.negative_control},
                 {"slope_r_band", {config.slope_r_lo, config.slope_r_hi}},
                 {"slope_m_max", config.slope_m_max},
                 {"doubling_variation_max", config.doubling_variation_max}};
  Json degs = Json::array();
  for (const auto& d : degrees) {
    degs.push_back({{"m", d.m},
                    {"seed", d.seed_index},
                    {"r_fit", fit_json(d.r_fit)},
                    {"r_slope_ok", d.r_slope_ok},
                    {"eventually_decreasing", d.eventually_decreasing},
                    {"doubling_window", d.doubling_window},
                    {"doubling_variation", d.doubling_variation},
                    {"doubling_ok", d.doubling_ok},
                    {"ratio_above_floor", d.ratio_above_floor},
                    {"min_ratio_minus_one", d.min_ratio_minus_one}});
  }
  j["degrees"] = degs;
  j["m_fit"] = fit_json(m_fit);
  j["m_slope_ok"] = m_slope_ok;
  j["errors"] = errors;
  j["pass"] = pass;
  return j;
}

Json MinimalScaleReport::to_json() const {
  Json j;
  j["thresholds"] = thresholds;
  Json arr = Json::array();
  for (const auto& e : entries) {
    Json c = Json::array();
    for (const auto& x : e.crossing) c.push_back(x ? Json(*x) : Json(nullptr));
    arr.push_back({{"m", e.m}, {"seed", e.seed_index}, {"r", e.r}, {"ratio_minus_one", e.ratio_minus_one}, {"crossing", c}});
  }
  j["entries"] = arr;
  return j;
}

MinimalScaleReport minimal_scale_probe(const ScalingConfig& cfg, std::shared_ptr<const CorrectorTable> table) {
  if (!table) throw ContractViolation("minimal scale probe needs a corrector table");
  if (!(cfg.theta > 0 && cfg.theta <= 0.5)) throw ConfigError("study.theta must lie in (0, 1/2]");
  MinimalScaleReport rep;
  auto op = std::make_shared<const HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  const auto abar = op->abar();
  const double th = cfg.theta;
  for (int m : cfg.m_list)
    for (int idx = 0; idx < cfg.seeds_per_degree; ++idx) {
      MinimalScaleEntry ent;
      ent.m = m;
      ent.seed_index = idx;
      const double top = 4.0 * std::pow(static_cast<double>(m), 4), bottom = std::max(1.0, static_cast<double>(m));
      for (int k = 0;; ++k) {
        const double r = top * std::pow(2.0, -0.5 * k);
        if (r < bottom * (1 - 1e-12)) break;
        ent.r.push_back(r);
      }
      const auto psi = make_psi(cfg, op, table, m, idx);
      std::vector<Ellipsoid> es;
      for (double r : ent.r) {
        es.emplace_back(abar, th * th * r);
        es.emplace_back(abar, th * r);
        es.emplace_back(abar, r);
      }
      const auto in = psi.integrals(es, cfg.quadrature_n);
      for (std::size_t i = 0; i < ent.r.size(); ++i)
        ent.ratio_minus_one.push_back(ratio_from_sq(in[3 * i].psi_sq(), in[3 * i + 1].psi_sq(), in[3 * i + 2].psi_sq()) - 1);
      for (double t : rep.thresholds) {
        std::optional<double> cross;
        for (std::size_t i = 0; i < ent.r.size() && !cross; ++i)
          if (ent.ratio_minus_one[i] > t) cross = ent.r[i];
        ent.crossing.push_back(cross);
      }
      rep.entries.push_back(std::move(ent));
    }
  return rep;
}

}  // namespace homog
