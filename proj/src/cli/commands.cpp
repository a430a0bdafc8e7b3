#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "homog/algebra.hpp"
#include "homog/cli.hpp"
#include "homog/field_io.hpp"
#include "homog/harmonic_basis.hpp"

namespace homog {

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << s;
}

std::shared_ptr<const CorrectorTable> solve_table(const RunConfig& cfg, std::size_t n, int m_max) {
  RunConfig c = cfg;
  c.n = n;
  auto a = std::make_shared<const CoefficientField>(make_coefficients(c));
  require_valid(*a);
  return std::make_shared<const CorrectorTable>(compute_correctors(a, m_max, cfg.solver));
}

Json identity_json(const IdentityReport& r) {
  Json j;
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"lhs_norm", c.lhs_norm}, {"rhs_norm", c.rhs_norm},
                      {"discrepancy", c.discrepancy}, {"pass", c.pass}});
  j["checks"] = checks;
  Json odd = Json::object();
  for (const auto& [m, v] : r.odd_ratio) odd[std::to_string(m)] = v;
  j["odd_ratio"] = odd;
  j["sup_norms"] = r.sup_norms;
  return j;
}

double identity_worst(const IdentityReport& r) {
  double w = 0;
  for (const auto& c : r.checks) w = std::max(w, c.discrepancy);
  for (const auto& [m, v] : r.odd_ratio) w = std::max(w, v);
  return w;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Check {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool pass = false;
  std::string category;  // "" when passing, else DEFECT or TOLERANCE
  std::string detail;
};

Json check_json(const Check& c) {
  Json j{{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}};
  j["category"] = c.pass ? Json(nullptr) : Json(c.category);
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

// below this a measured error is treated as roundoff
constexpr double kRoundoffFloor = 1e-12;

Check exact_algebra_check() {
  Check c{"polyalg.S_inverse_and_orthogonality", 0, 0, true, "", ""};
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> u(-9, 9);
  long bad = 0;
  for (std::size_t d : {2u, 3u})
    for (int m = 0; m <= 8; ++m) {
      RationalPolynomial p(d);
      for (const auto& a : multi_indices_of_order(d, m)) p.add_term(a, Rational(u(rng), 7));
      const auto s = apply_S(p);
      if (!(laplacian(s) == p)) ++bad;
      for (const auto& h : harmonic_basis(d, m + 2))
        if (sgn(poly_inner(s, h)) != 0) ++bad;
    }
  c.value = static_cast<double>(bad);
  c.pass = bad == 0;
  c.category = c.pass ? "" : "DEFECT";
  return c;
}

Check contract_check(const std::shared_ptr<const CorrectorTable>& table, bool negative) {
  Check c{"homogop.A_harmonic_contract", 0, 1e-10, true, "", ""};
  // exact path over small synthetic operators
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> u(-6, 6);
  const std::size_t d = table->dim();
  const auto id = SymTensor<Rational>::from_avatar(RationalPolynomial::radius_squared(d), 2);
  for (int trial = 0; trial < 3; ++trial) {
    std::map<int, SymTensor<Rational>> ts{{2, id}};
    for (int order : {4, 6}) {
      SymTensor<Rational> t(d, order);
      for (const auto& a : multi_indices_of_order(d, order)) t.set(a, Rational(u(rng), 64));
      ts[order] = t;
    }
    auto op = std::make_shared<const HomogenizedOperator>(HomogenizedOperator::synthetic(ts));
    for (int m = 0; m <= 6; ++m) {
      const auto p = random_harmonic_seed(d, m, 1000 + m + 10 * trial);
      const auto q = build_A_harmonic(op, p);
      const auto& qe = negative ? p : *q.q_exact;
      if (!apply_A(*op, qe).is_zero()) {
        c.pass = false;
        c.value = std::max(c.value, poly_norm(apply_A(*op, qe).to_double()) / std::max(1.0, poly_norm(qe.to_double())));
      }
    }
  }
  // real path over the table's own operator
  auto op = std::make_shared<const HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  for (int m = 0; m <= table->m_max; ++m) {
    const auto seed = abar_harmonic_from(*op, random_harmonic_seed(d, m, 2000 + m));
    const auto q = build_A_harmonic(op, seed);
    const auto& qq = negative ? seed : q.q;
    const double rel = poly_norm(apply_A(*op, qq)) / std::max(1.0, poly_norm(qq));
    c.value = std::max(c.value, rel);
    if (rel > c.tolerance) c.pass = false;
  }
  c.category = c.pass ? "" : "DEFECT";
  return c;
}

Check bounds_check(const CorrectorTable& t) {
  // <a^{-1}>^{-1} <= abar_2 <= <a> in the Loewner order
  Check c{"cell.abar2_voigt_reuss_bounds", 0, 1e-9, true, "", ""};
  const auto& a = *t.field;
  const std::size_t d = a.dim(), cells = a.shape().size();
  SquareMatrix<double> mean(d), inv_mean(d);
  for (std::size_t e = 0; e < cells; ++e) {
    SquareMatrix<double> ae(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) ae(i, j) = a.at(e)[i * d + j];
    const auto ai = spd_inverse(ae);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        mean(i, j) += ae(i, j) / static_cast<double>(cells);
        inv_mean(i, j) += ai(i, j) / static_cast<double>(cells);
      }
  }
  const auto reuss = spd_inverse(inv_mean);
  const auto ab = homogenized_matrix(t);
  SquareMatrix<double> up(d), lo(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      up(i, j) = mean(i, j) - ab(i, j);
      lo(i, j) = ab(i, j) - reuss(i, j);
    }
  auto sym = [&](SquareMatrix<double> m) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i) = 0.5 * (m(i, j) + m(j, i));
    return m;
  };
  const double scale = std::max(1.0, symmetric_eigenvalues(sym(mean)).back());
  const double worst = std::min(symmetric_eigenvalues(sym(up)).front(), symmetric_eigenvalues(sym(lo)).front());
  c.value = std::max(0.0, -worst) / scale;
  c.pass = c.value <= c.tolerance;
  c.category = c.pass ? "" : "DEFECT";
  return c;
}

double psi_residual(const std::shared_ptr<const CorrectorTable>& table, int degree, bool truncate) {
  auto op = std::make_shared<const HomogenizedOperator>(HomogenizedOperator::from_table(*table));
  const auto seed = abar_harmonic_from(*op, random_harmonic_seed(table->dim(), degree, 77));
  const auto q = build_A_harmonic(op, seed);
  if (truncate) {
    auto t = std::make_shared<const CorrectorTable>(table->truncated(degree - 1));
    return residual_psi(build_heterogeneous(q, t, true));
  }
  return residual_psi(build_heterogeneous(q, table));
}

}  // namespace

int run_guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "file error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitProperty;
  }
}

int cmd_correctors(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto table = solve_table(cfg, cfg.n, cfg.m_max);
  const auto manifest = write_corrector_table(*table, cfg.output_dir / "correctors");
  out << "coefficients: " << table->field->description() << "\n";
  out << "manifest: " << manifest.lexically_normal().string() << "\n";
  for (int m = 0; m <= table->m_max; ++m) out << "abar_" << m << " = " << to_json(table->abar[m]).dump() << "\n";
  if (table->m_max >= 3) {
    const auto rep = check_identities(*table);
    const auto j = identity_json(rep);
    write_text(cfg.output_dir / "identities.json", j.dump(2) + "\n");
    out << "identities: " << (rep.pass ? "pass" : "fail") << " (threshold " << rep.threshold << ", worst "
        << identity_worst(rep) << ")\n";
  }
  return kExitPass;
}

int cmd_study(const RunConfig& cfg, std::ostream& out, bool negative_control) {
  cfg.validate();
  ScalingConfig sc = cfg.study;
  sc.negative_control = sc.negative_control || negative_control;
  const int need = *std::max_element(sc.m_list.begin(), sc.m_list.end());
  std::shared_ptr<const CorrectorTable> table;
  if (cfg.table) {
    table = std::make_shared<const CorrectorTable>(read_corrector_table(*cfg.table));
  } else {
    if (cfg.m_max < need) throw ConfigError("m_max is below the largest study degree");
    table = solve_table(cfg, cfg.n, cfg.m_max);
  }
  if (table->m_max < need) throw ConfigError("corrector table order is below the largest study degree");
  const auto rep = run_scaling_study(sc, table);
  write_text(cfg.output_dir / "study.csv", rep.csv());
  write_text(cfg.output_dir / "study.json", rep.summary().dump(2) + "\n");
  if (cfg.minimal_scale) {
    const auto ms = minimal_scale_probe(sc, table);
    write_text(cfg.output_dir / "minimal_scale.json", ms.to_json().dump(2) + "\n");
  }
  for (const auto& d : rep.degrees) {
    out << "m=" << d.m << " seed=" << d.seed_index << " slope(r)=";
    if (d.r_fit.points >= 2)
      out << d.r_fit.slope;
    else
      out << "n/a";
    out << (d.r_slope_ok ? " ok" : " FAIL") << " doubling_var=" << d.doubling_variation
        << (d.doubling_ok ? " ok" : " FAIL") << " decreasing=" << (d.eventually_decreasing ? "yes" : "NO")
        << " ratio_floor=" << (d.ratio_above_floor ? "ok" : "FAIL") << "\n";
  }
  for (const auto& e : rep.errors) out << "error: " << e << "\n";
  if (sc.negative_control) out << "negative control: q is the uncorrected seed\n";
  out << "study: " << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? kExitPass : kExitProperty;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, bool negative_control) {
  cfg.validate();
  std::vector<Check> checks;
  checks.push_back(exact_algebra_check());

  const auto coarse = solve_table(cfg, cfg.n, cfg.m_max);
  const auto fine = solve_table(cfg, 2 * cfg.n, cfg.m_max);
  checks.push_back(contract_check(coarse, negative_control));
  checks.push_back(bounds_check(*coarse));

  if (cfg.m_max >= 3) {
    const auto rc = check_identities(*coarse);
    Check c{"cell.identities", identity_worst(rc), cfg.identity_tol.value_or(rc.threshold), true, "", ""};
    c.pass = c.value <= c.tolerance;
    if (!c.pass) {
      // a discretization floor shrinks under refinement; a defect does not
      const double vf = identity_worst(check_identities(*fine));
      c.category = (vf < c.value || c.value <= kRoundoffFloor) ? "TOLERANCE" : "DEFECT";
      c.detail = "value at 2N: " + num(vf);
    }
    checks.push_back(c);
  }

  {
    const int deg = cfg.verify_degree;
    const double rn = psi_residual(coarse, deg, negative_control), rf = psi_residual(fine, deg, negative_control);
    Check c{"homogop.psi_residual_refinement", rf > 0 ? rn / rf : INFINITY, cfg.residual_ratio_min, true, "", ""};
    const bool at_floor = rn <= 1e-10 && rf <= 1e-10;
    c.pass = at_floor || c.value >= c.tolerance;
    c.detail = "residual N: " + num(rn) + ", 2N: " + num(rf);
    if (!c.pass) c.category = (c.value > 1.0 && !negative_control) ? "TOLERANCE" : "DEFECT";
    checks.push_back(c);
  }

  std::optional<std::filesystem::path> manifest = cfg.table;
  if (!manifest && std::filesystem::exists(cfg.output_dir / "correctors" / "manifest.json"))
    manifest = cfg.output_dir / "correctors" / "manifest.json";
  if (manifest) {
    Check c{"io.corrector_table", 0, 0, true, "", manifest->string()};
    try {
      (void)read_corrector_table(*manifest);
    } catch (const FormatError& e) {
      c.pass = false;
      c.value = 1;
      c.category = "DEFECT";
      c.detail = e.what();
    }
    checks.push_back(c);
  }

  Json j;
  j["format"] = "homog-verify-report";
  j["coefficients"] = coarse->field->description();
  j["N"] = cfg.n;
  j["negative_control"] = negative_control;
  bool pass = true;
  Json arr = Json::array();
  for (const auto& c : checks) {
    arr.push_back(check_json(c));
    pass = pass && c.pass;
  }
  j["checks"] = arr;
  j["pass"] = pass;
  const std::string text = j.dump(2) + "\n";
  write_text(cfg.output_dir / "verify.json", text);
  out << text;
  return pass ? kExitPass : kExitProperty;
}

}  // namespace homog
